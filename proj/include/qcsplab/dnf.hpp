#pragma once

#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace qcsplab {

// One positive equality atom over positional variables: x_var = x_rhs or
// x_var = c.
struct DnfAtom {
    enum class Kind { var_eq_var, var_eq_const };

    Kind kind = Kind::var_eq_var;
    std::size_t var = 0;
    std::size_t rhs = 0; // variable index or element index, per kind

    static auto eq_var(std::size_t i, std::size_t j) -> DnfAtom { return {Kind::var_eq_var, i, j}; }
    static auto eq_const(std::size_t i, Element c) -> DnfAtom { return {Kind::var_eq_const, i, c}; }

    auto holds(std::span<const Element> t) const -> bool
    {
        return kind == Kind::var_eq_var ? t[var] == t[rhs] : t[var] == rhs;
    }

    friend auto operator==(const DnfAtom &, const DnfAtom &) -> bool = default;
};

using DnfConjunct = std::vector<DnfAtom>;

// Quantifier-free disjunction of conjunctions of equality atoms. An empty
// conjunct is the constant true.
struct DnfFormula {
    std::size_t arity = 0;
    std::vector<DnfConjunct> disjuncts;

    // Total atom count; the measure the gadget size bounds are stated in.
    auto size() const -> std::size_t
    {
        std::size_t total = 0;
        for (auto & d : disjuncts)
            total += d.size();
        return total;
    }

    friend auto operator==(const DnfFormula &, const DnfFormula &) -> bool = default;
};

// Throws InvalidArgument if an index is out of range or a constant is not in
// a domain of size n.
inline auto check_dnf(const DnfFormula & f, std::size_t n) -> void
{
    if (f.arity == 0)
        throw InvalidArgument("dnf arity must be positive");
    if (f.disjuncts.empty())
        throw InvalidArgument("dnf must have at least one disjunct");
    for (auto & conj : f.disjuncts)
        for (auto & a : conj) {
            if (a.var >= f.arity || (a.kind == DnfAtom::Kind::var_eq_var && a.rhs >= f.arity))
                throw InvalidArgument("dnf variable index out of range for arity " + std::to_string(f.arity));
            if (a.kind == DnfAtom::Kind::var_eq_const && a.rhs >= n)
                throw InvalidArgument("dnf constant out of domain range");
        }
}

inline auto eval_dnf(const DnfFormula & f, std::span<const Element> t) -> bool
{
    if (t.size() != f.arity)
        throw InvalidArgument("tuple length " + std::to_string(t.size()) + " does not match dnf arity " + std::to_string(f.arity));
    for (auto & conj : f.disjuncts) {
        bool all = true;
        for (auto & a : conj)
            if (! a.holds(t)) {
                all = false;
                break;
            }
        if (all)
            return true;
    }
    return false;
}

inline auto dnf_to_extension(const DnfFormula & f, std::size_t n) -> TupleSet
{
    TupleSet ext(n, f.arity);
    Tuple t(f.arity, 0);
    std::uint64_t code = 0;
    do {
        if (eval_dnf(f, t))
            ext.insert_code(code);
        ++code;
    } while (next_tuple(t, n));
    return ext;
}

// Canonical certificate: one disjunct per tuple, each a full conjunction of
// constant atoms.
inline auto extension_to_dnf(const TupleSet & ext) -> DnfFormula
{
    if (ext.empty())
        throw InvalidArgument("the empty relation has no DNF encoding");
    DnfFormula f{ext.arity(), {}};
    for (auto & t : ext.tuples()) {
        DnfConjunct conj;
        for (std::size_t i = 0; i < t.size(); ++i)
            conj.push_back(DnfAtom::eq_const(i, t[i]));
        f.disjuncts.push_back(std::move(conj));
    }
    return f;
}

inline auto to_string(const DnfAtom & a, const Domain & d) -> std::string
{
    std::string s = "x" + std::to_string(a.var) + "=";
    if (a.kind == DnfAtom::Kind::var_eq_var)
        s += "x" + std::to_string(a.rhs);
    else
        s += d.name(static_cast<Element>(a.rhs));
    return s;
}

inline auto to_string(const DnfConjunct & conj, const Domain & d) -> std::string
{
    // an empty conjunct is true; print it as the tautology x0=x0
    if (conj.empty())
        return "x0=x0";
    std::string s;
    for (std::size_t i = 0; i < conj.size(); ++i) {
        if (i)
            s += " & ";
        s += to_string(conj[i], d);
    }
    return s;
}

inline auto to_string(const DnfFormula & f, const Domain & d) -> std::string
{
    std::string s;
    for (std::size_t i = 0; i < f.disjuncts.size(); ++i) {
        if (i)
            s += " | ";
        s += to_string(f.disjuncts[i], d);
    }
    return s;
}

namespace detail {

    class DnfLexer {
    public:
        explicit DnfLexer(std::string_view text) : text_(text) {}

        auto skip_space() -> void
        {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }

        auto at_end() -> bool
        {
            skip_space();
            return pos_ == text_.size();
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

        static auto is_name_char(char c) -> bool
        {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
        }

        auto name() -> std::string
        {
            skip_space();
            auto start = pos_;
            while (pos_ < text_.size() && is_name_char(text_[pos_]))
                ++pos_;
            if (start == pos_)
                fail("expected a variable or constant name");
            return std::string(text_.substr(start, pos_ - start));
        }

        [[noreturn]] auto fail(const std::string & what) const -> void { throw ParseError(what, pos_); }

        auto position() const -> std::size_t { return pos_; }

    private:
        std::string_view text_;
        std::size_t pos_ = 0;
    };

    // "x<digits>" names a positional variable.
    inline auto positional_index(const std::string & token) -> std::optional<std::size_t>
    {
        if (token.size() < 2 || token[0] != 'x')
            return std::nullopt;
        std::size_t v = 0;
        for (std::size_t i = 1; i < token.size(); ++i) {
            if (! std::isdigit(static_cast<unsigned char>(token[i])))
                return std::nullopt;
            v = v * 10 + static_cast<std::size_t>(token[i] - '0');
        }
        return v;
    }

    inline auto parse_dnf_atom(DnfLexer & lex, std::size_t arity, const Domain & d) -> DnfAtom
    {
        auto start = lex.position();
        auto lhs = lex.name();
        auto var = positional_index(lhs);
        if (! var)
            throw ParseError("left side of an atom must be a positional variable x<i>, got '" + lhs + "'", start);
        if (*var >= arity)
            throw ParseError("variable index " + std::to_string(*var) + " out of range for arity " + std::to_string(arity), start);
        if (lex.peek() == '!')
            lex.fail("negated atoms are not part of the DNF grammar");
        if (! lex.accept('='))
            lex.fail("expected '='");
        auto rhs_start = lex.position();
        auto rhs = lex.name();
        if (auto j = positional_index(rhs)) {
            if (*j >= arity)
                throw ParseError("variable index " + std::to_string(*j) + " out of range for arity " + std::to_string(arity), rhs_start);
            return DnfAtom::eq_var(*var, *j);
        }
        auto c = d.find(rhs);
        if (! c)
            throw ParseError("unknown constant '" + rhs + "'", rhs_start);
        return DnfAtom::eq_const(*var, *c);
    }

    inline auto parse_dnf_conjunct(DnfLexer & lex, std::size_t arity, const Domain & d) -> DnfConjunct
    {
        DnfConjunct conj;
        conj.push_back(parse_dnf_atom(lex, arity, d));
        while (lex.accept('&'))
            conj.push_back(parse_dnf_atom(lex, arity, d));
        return conj;
    }

} // namespace detail

// formula := disjunct ('|' disjunct)* ; disjunct := atom ('&' atom)* ;
// atom := 'x' INT '=' ('x' INT | CONSTNAME). Whitespace is insignificant.
inline auto parse_dnf(std::string_view text, std::size_t arity, const Domain & d) -> DnfFormula
{
    if (arity == 0)
        throw InvalidArgument("dnf arity must be positive");
    detail::DnfLexer lex(text);
    DnfFormula f{arity, {}};
    f.disjuncts.push_back(detail::parse_dnf_conjunct(lex, arity, d));
    while (lex.accept('|'))
        f.disjuncts.push_back(detail::parse_dnf_conjunct(lex, arity, d));
    if (! lex.at_end())
        lex.fail(std::string("unexpected character '") + lex.peek() + "'");
    return f;
}

// A single disjunct, as stored in the string form of structure files.
inline auto parse_dnf_disjunct(std::string_view text, std::size_t arity, const Domain & d) -> DnfConjunct
{
    detail::DnfLexer lex(text);
    auto conj = detail::parse_dnf_conjunct(lex, arity, d);
    if (! lex.at_end())
        lex.fail(std::string("unexpected character '") + lex.peek() + "'");
    return conj;
}

} // namespace qcsplab
