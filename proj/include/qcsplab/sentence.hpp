#pragma once

#include "qcsplab/dnf.hpp"
#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/model.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace qcsplab {

enum class Quantifier { forall, exists };

struct QuantifiedVariable {
    Quantifier quantifier = Quantifier::exists;
    std::string name;

    friend auto operator==(const QuantifiedVariable &, const QuantifiedVariable &) -> bool = default;
};

// An atom argument: a prefix variable (by position) or a domain constant.
struct Term {
    enum class Kind { variable, constant };

    Kind kind = Kind::variable;
    std::size_t index = 0;

    static auto var(std::size_t i) -> Term { return {Kind::variable, i}; }
    static auto constant(Element e) -> Term { return {Kind::constant, e}; }

    auto is_var() const -> bool { return kind == Kind::variable; }

    friend auto operator==(const Term &, const Term &) -> bool = default;
    friend auto operator<(const Term & a, const Term & b) -> bool
    {
        return std::tie(a.kind, a.index) < std::tie(b.kind, b.index);
    }
};

struct Atom {
    std::string relation;
    std::vector<Term> args;

    auto is_equality() const -> bool { return relation == equality_relation_name; }

    friend auto operator==(const Atom &, const Atom &) -> bool = default;
};

// Prenex positive-Horn sentence: quantifier prefix and a conjunction of atoms.
struct PHSentence {
    std::vector<QuantifiedVariable> prefix;
    std::vector<Atom> body;

    auto find_variable(std::string_view name) const -> std::optional<std::size_t>
    {
        for (std::size_t i = 0; i < prefix.size(); ++i)
            if (prefix[i].name == name)
                return i;
        return std::nullopt;
    }

    auto is_universal(std::size_t v) const -> bool { return prefix[v].quantifier == Quantifier::forall; }

    auto is_existential_only() const -> bool
    {
        for (auto & q : prefix)
            if (q.quantifier != Quantifier::exists)
                return false;
        return true;
    }

    auto is_universal_only() const -> bool
    {
        for (auto & q : prefix)
            if (q.quantifier != Quantifier::forall)
                return false;
        return true;
    }

    // Length of the leading block of universal quantifiers.
    auto leading_universals() const -> std::size_t
    {
        std::size_t m = 0;
        while (m < prefix.size() && prefix[m].quantifier == Quantifier::forall)
            ++m;
        return m;
    }

    // One universal block followed by one existential block (either may be empty).
    auto is_pi2() const -> bool
    {
        for (auto i = leading_universals(); i < prefix.size(); ++i)
            if (prefix[i].quantifier != Quantifier::exists)
                return false;
        return true;
    }

    auto count(Quantifier q) const -> std::size_t
    {
        std::size_t c = 0;
        for (auto & v : prefix)
            c += v.quantifier == q;
        return c;
    }

    friend auto operator==(const PHSentence &, const PHSentence &) -> bool = default;
};

// Structural checks that do not need a structure: names unique, terms in range.
inline auto check_sentence(const PHSentence & s, std::size_t domain_size) -> void
{
    std::set<std::string> names;
    for (auto & v : s.prefix) {
        if (v.name.empty())
            throw InvalidArgument("empty variable name");
        if (! names.insert(v.name).second)
            throw InvalidArgument("variable '" + v.name + "' quantified more than once");
    }
    for (auto & a : s.body)
        for (auto & t : a.args) {
            if (t.is_var() && t.index >= s.prefix.size())
                throw InvalidArgument("atom '" + a.relation + "' refers to an unquantified variable");
            if (! t.is_var() && t.index >= domain_size)
                throw InvalidArgument("atom '" + a.relation + "' has a constant outside the domain");
        }
}

inline auto to_string(const Term & t, const PHSentence & s, const Domain & d) -> std::string
{
    return t.is_var() ? s.prefix[t.index].name : d.name(static_cast<Element>(t.index));
}

inline auto to_string(const Atom & a, const PHSentence & s, const Domain & d) -> std::string
{
    std::string out = a.relation + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i)
        out += (i ? "," : "") + to_string(a.args[i], s, d);
    return out + ")";
}

// `A x1 E y1 : tau_1(x1,x1,y1) & eq(y1,1)`
inline auto to_string(const PHSentence & s, const Domain & d) -> std::string
{
    std::string out;
    for (auto & v : s.prefix)
        out += (v.quantifier == Quantifier::forall ? "A " : "E ") + v.name + " ";
    out += ":";
    for (std::size_t i = 0; i < s.body.size(); ++i)
        out += (i ? " & " : " ") + to_string(s.body[i], s, d);
    return out;
}

namespace detail {

    class SentenceLexer {
    public:
        explicit SentenceLexer(std::string_view text) : text_(text) {}

        auto skip_space() -> void
        {
            while (pos_ < text_.size()) {
                if (std::isspace(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
                else if (text_[pos_] == '#') {
                    while (pos_ < text_.size() && text_[pos_] != '\n')
                        ++pos_;
                }
                else
                    break;
            }
        }

        auto peek() -> char
        {
            skip_space();
            return pos_ < text_.size() ? text_[pos_] : '\0';
        }

        auto accept(char c) -> bool
        {
            if (peek() != c)
                return false;
            ++pos_;
            return true;
        }

        auto expect(char c) -> void
        {
            if (! accept(c))
                fail(std::string("expected '") + c + "'");
        }

        auto name() -> std::string
        {
            skip_space();
            auto start = pos_;
            while (pos_ < text_.size() && DnfLexer::is_name_char(text_[pos_]))
                ++pos_;
            if (start == pos_)
                fail("expected a name");
            return std::string(text_.substr(start, pos_ - start));
        }

        auto at_end() -> bool { return peek() == '\0'; }
        auto position() const -> std::size_t { return pos_; }

        [[noreturn]] auto fail(const std::string & what) const -> void { throw ParseError(what, pos_); }

    private:
        std::string_view text_;
        std::size_t pos_ = 0;
    };

} // namespace detail

// Prefix tokens `A <var>` / `E <var>`, a colon, then `&`-joined atoms
// `rel(arg,...)`; arguments are prefix variables or bare domain names.
// Variable names may not shadow domain element names. `#` starts a comment.
inline auto parse_sentence(std::string_view text, const Domain & d) -> PHSentence
{
    detail::SentenceLexer lex(text);
    PHSentence s;
    while (! lex.accept(':')) {
        if (lex.at_end())
            lex.fail("expected ':' after the quantifier prefix");
        auto start = lex.position();
        auto q = lex.name();
        if (q != "A" && q != "E")
            throw ParseError("expected quantifier 'A' or 'E', got '" + q + "'", start);
        start = lex.position();
        auto v = lex.name();
        if (d.find(v))
            throw ParseError("variable '" + v + "' shadows a domain element", start);
        if (s.find_variable(v))
            throw ParseError("variable '" + v + "' quantified more than once", start);
        s.prefix.push_back({q == "A" ? Quantifier::forall : Quantifier::exists, v});
    }
    if (lex.at_end())
        return s;
    do {
        Atom a;
        a.relation = lex.name();
        lex.expect('(');
        if (! lex.accept(')')) {
            do {
                auto start = lex.position();
                auto arg = lex.name();
                if (auto v = s.find_variable(arg))
                    a.args.push_back(Term::var(*v));
                else if (auto c = d.find(arg))
                    a.args.push_back(Term::constant(*c));
                else
                    throw ParseError("'" + arg + "' is neither a quantified variable nor a domain element", start);
            } while (lex.accept(','));
            lex.expect(')');
        }
        s.body.push_back(std::move(a));
    } while (lex.accept('&'));
    if (! lex.at_end())
        lex.fail(std::string("unexpected character '") + lex.peek() + "'");
    return s;
}

} // namespace qcsplab
