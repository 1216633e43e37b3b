#pragma once

#include "qcsplab/dnf.hpp"
#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace qcsplab {

// Name of the built-in binary equality relation available in every structure.
inline constexpr std::string_view equality_relation_name = "eq";

// A named relation. The extension is the semantic ground truth; the DNF is an
// optional certificate. Very wide gadget relations may carry only the DNF, in
// which case membership is decided by evaluating it.
struct Relation {
    std::string name;
    std::size_t arity = 0;
    std::optional<TupleSet> extension;
    std::optional<DnfFormula> dnf;

    static auto from_tuples(std::string name, std::size_t n, std::size_t arity, const std::vector<Tuple> & tuples) -> Relation
    {
        TupleSet ext(n, arity);
        for (auto & t : tuples)
            ext.insert(t);
        return Relation{std::move(name), arity, std::move(ext), std::nullopt};
    }

    // Materializes the extension when A^arity fits in `budget` cells.
    static auto from_dnf(std::string name, std::size_t n, DnfFormula dnf, std::uint64_t budget = default_budget) -> Relation
    {
        check_dnf(dnf, n);
        Relation r{std::move(name), dnf.arity, std::nullopt, std::nullopt};
        if (saturating_pow(n, dnf.arity) <= std::min(budget, TupleSet::max_dense))
            r.extension = dnf_to_extension(dnf, n);
        r.dnf = std::move(dnf);
        return r;
    }

    auto contains(std::span<const Element> t) const -> bool
    {
        if (extension)
            return extension->contains(t);
        if (dnf)
            return t.size() == arity && eval_dnf(*dnf, t);
        throw InvalidArgument("relation '" + name + "' has neither extension nor dnf");
    }

    auto tuples() const -> std::vector<Tuple>
    {
        if (! extension)
            throw InvalidArgument("relation '" + name + "' has no materialized extension");
        return extension->tuples();
    }

    auto size() const -> std::size_t
    {
        if (! extension)
            throw InvalidArgument("relation '" + name + "' has no materialized extension");
        return extension->size();
    }

    friend auto operator==(const Relation &, const Relation &) -> bool = default;
};

// A total k-ary operation on a domain of size n. The table is indexed by the
// lexicographic rank of the argument tuple.
struct Operation {
    std::string name;
    std::size_t arity = 0;
    std::size_t domain_size = 0;
    std::vector<Element> table;

    template <typename F>
    static auto from_function(std::string name, std::size_t n, std::size_t arity, F && f) -> Operation
    {
        Operation op{std::move(name), arity, n, {}};
        op.table.reserve(saturating_pow(n, arity));
        Tuple args(arity, 0);
        do
            op.table.push_back(static_cast<Element>(f(std::span<const Element>(args))));
        while (next_tuple(args, n));
        return op;
    }

    static auto projection(std::size_t n, std::size_t arity, std::size_t coordinate) -> Operation
    {
        return from_function("pr" + std::to_string(coordinate) + "_" + std::to_string(arity), n, arity,
            [coordinate](std::span<const Element> a) { return a[coordinate]; });
    }

    auto operator()(std::span<const Element> args) const -> Element
    {
        if (args.size() != arity)
            throw InvalidArgument("operation '" + name + "' of arity " + std::to_string(arity) + " applied to " + std::to_string(args.size()) + " arguments");
        return table[tuple_code(args, domain_size)];
    }

    auto at_code(std::uint64_t code) const -> Element { return table[code]; }

    auto is_idempotent() const -> bool
    {
        Tuple diag(arity);
        for (Element a = 0; a < domain_size; ++a) {
            std::fill(diag.begin(), diag.end(), a);
            if ((*this)(diag) != a)
                return false;
        }
        return true;
    }

    auto is_well_formed() const -> bool
    {
        if (arity == 0 || domain_size == 0 || table.size() != saturating_pow(domain_size, arity))
            return false;
        return std::all_of(table.begin(), table.end(), [&](Element e) { return e < domain_size; });
    }
};

struct Algebra {
    std::string name;
    Domain domain;
    std::vector<Operation> operations;

    auto idempotent() const -> bool
    {
        return std::all_of(operations.begin(), operations.end(), [](const Operation & f) { return f.is_idempotent(); });
    }
};

// Componentwise action: result[i] = f(args[0][i], ..., args[k-1][i]).
inline auto apply_operation(const Operation & f, std::span<const Tuple> args) -> Tuple
{
    if (args.size() != f.arity)
        throw InvalidArgument("operation '" + f.name + "' expects " + std::to_string(f.arity) + " argument tuples, got " + std::to_string(args.size()));
    if (args.empty())
        return {};
    auto m = args[0].size();
    for (auto & a : args)
        if (a.size() != m)
            throw InvalidArgument("argument tuples of differing lengths");
    Tuple column(f.arity), result(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < f.arity; ++j)
            column[j] = args[j][i];
        result[i] = f(column);
    }
    return result;
}

// Pair of strict subsets (alpha, beta) of A with alpha ∪ beta = A.
class CutPair {
public:
    CutPair() = default;

    static auto make(std::size_t n, std::vector<Element> alpha, std::vector<Element> beta) -> CutPair
    {
        auto normalize = [n](std::vector<Element> & s, const char * which) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            if (s.empty())
                throw InvalidArgument(std::string("cut side ") + which + " is empty");
            if (s.back() >= n)
                throw InvalidArgument(std::string("cut side ") + which + " has an element outside the domain");
            if (s.size() == n)
                throw InvalidArgument(std::string("cut side ") + which + " is not a strict subset");
        };
        normalize(alpha, "alpha");
        normalize(beta, "beta");
        CutPair c;
        c.n_ = n;
        c.in_alpha_.assign(n, false);
        c.in_beta_.assign(n, false);
        for (auto a : alpha)
            c.in_alpha_[a] = true;
        for (auto b : beta)
            c.in_beta_[b] = true;
        for (std::size_t e = 0; e < n; ++e)
            if (! c.in_alpha_[e] && ! c.in_beta_[e])
                throw InvalidArgument("cut sides do not cover element " + std::to_string(e));
        c.alpha_ = std::move(alpha);
        c.beta_ = std::move(beta);
        return c;
    }

    auto domain_size() const noexcept -> std::size_t { return n_; }
    auto alpha() const noexcept -> const std::vector<Element> & { return alpha_; }
    auto beta() const noexcept -> const std::vector<Element> & { return beta_; }
    auto in_alpha(Element e) const -> bool { return in_alpha_[e]; }
    auto in_beta(Element e) const -> bool { return in_beta_[e]; }

    auto common() const -> std::vector<Element> { return filter([&](Element e) { return in_alpha_[e] && in_beta_[e]; }); }
    auto alpha_only() const -> std::vector<Element> { return filter([&](Element e) { return in_alpha_[e] && ! in_beta_[e]; }); }
    auto beta_only() const -> std::vector<Element> { return filter([&](Element e) { return in_beta_[e] && ! in_alpha_[e]; }); }
    auto intersects() const -> bool { return ! common().empty(); }

    auto least_common() const -> std::optional<Element>
    {
        auto c = common();
        if (c.empty())
            return std::nullopt;
        return c.front();
    }

    friend auto operator==(const CutPair & a, const CutPair & b) -> bool
    {
        return a.n_ == b.n_ && a.alpha_ == b.alpha_ && a.beta_ == b.beta_;
    }

private:
    template <typename P>
    auto filter(P && p) const -> std::vector<Element>
    {
        std::vector<Element> out;
        for (Element e = 0; e < n_; ++e)
            if (p(e))
                out.push_back(e);
        return out;
    }

    std::size_t n_ = 0;
    std::vector<Element> alpha_, beta_;
    std::vector<bool> in_alpha_, in_beta_;
};

// "0,1:1,2" with element names from d.
inline auto parse_cut(const std::string & text, const Domain & d) -> CutPair
{
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ParseError("cut must have the form alpha:beta", 0);
    auto side = [&](const std::string & part) {
        std::vector<Element> out;
        std::size_t start = 0;
        while (start <= part.size()) {
            auto comma = part.find(',', start);
            auto token = part.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (token.empty())
                throw ParseError("empty element in cut '" + text + "'", start);
            out.push_back(d.index(token));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        return out;
    };
    return CutPair::make(d.size(), side(text.substr(0, colon)), side(text.substr(colon + 1)));
}

inline auto to_string(const CutPair & c, const Domain & d) -> std::string
{
    auto side = [&](const std::vector<Element> & s) {
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i)
            out += (i ? "," : "") + d.name(s[i]);
        return out;
    };
    return side(c.alpha()) + ":" + side(c.beta());
}

// Every cut pair over a domain of size n, in a fixed order (alpha mask major).
inline auto all_cut_pairs(std::size_t n) -> std::vector<CutPair>
{
    std::vector<CutPair> out;
    std::uint64_t full = (std::uint64_t{1} << n) - 1;
    auto members = [n](std::uint64_t mask) {
        std::vector<Element> s;
        for (std::size_t e = 0; e < n; ++e)
            if (mask >> e & 1)
                s.push_back(static_cast<Element>(e));
        return s;
    };
    for (std::uint64_t a = 1; a < full; ++a)
        for (std::uint64_t b = 1; b < full; ++b)
            if ((a | b) == full)
                out.push_back(CutPair::make(n, members(a), members(b)));
    return out;
}

// An infinite parameterized family of gadget relations, instantiated on
// demand as <name>_<k>.
struct FamilySpec {
    enum class Kind { sigma, tau };

    std::string name;
    Kind kind = Kind::tau;
    CutPair cut;

    auto instance_name(std::size_t k) const -> std::string { return name + "_" + std::to_string(k); }
    auto instance_arity(std::size_t k) const -> std::size_t { return (kind == Kind::sigma ? 2 : 3) * k; }

    friend auto operator==(const FamilySpec &, const FamilySpec &) -> bool = default;
};

inline auto to_string(FamilySpec::Kind k) -> std::string { return k == FamilySpec::Kind::sigma ? "sigma" : "tau"; }

inline auto parse_family_kind(const std::string & s) -> FamilySpec::Kind
{
    if (s == "sigma")
        return FamilySpec::Kind::sigma;
    if (s == "tau")
        return FamilySpec::Kind::tau;
    throw InvalidArgument("unknown family kind '" + s + "'");
}

struct Structure {
    Domain domain;
    std::vector<Relation> relations;
    std::vector<FamilySpec> families;
    // Expanded with all constants: every singleton {a} is implicitly a
    // relation, so polymorphisms must be idempotent.
    bool constants = false;

    auto find(std::string_view name) const -> const Relation *
    {
        for (auto & r : relations)
            if (r.name == name)
                return &r;
        return nullptr;
    }

    auto find_family(std::string_view name) const -> const FamilySpec *
    {
        for (auto & f : families)
            if (f.name == name)
                return &f;
        return nullptr;
    }

    auto relation_names() const -> std::vector<std::string>
    {
        std::vector<std::string> out;
        for (auto & r : relations)
            out.push_back(r.name);
        return out;
    }

    friend auto operator==(const Structure &, const Structure &) -> bool = default;
};

// Every invariant violation of s, empty iff s is well formed.
inline auto validate_structure(const Structure & s) -> std::vector<std::string>
{
    std::vector<std::string> out;
    auto n = s.domain.size();
    if (n == 0)
        out.push_back("domain is empty");
    std::set<std::string> seen;
    for (auto & r : s.relations) {
        auto where = "relation '" + r.name + "': ";
        if (r.name.empty())
            out.push_back("relation with empty name");
        if (r.name == equality_relation_name)
            out.push_back(where + "name is reserved for built-in equality");
        if (! seen.insert(r.name).second)
            out.push_back(where + "duplicate relation name");
        if (r.arity == 0)
            out.push_back(where + "arity must be positive");
        if (! r.extension && ! r.dnf)
            out.push_back(where + "neither extension nor dnf present");
        if (r.extension) {
            if (r.extension->arity() != r.arity)
                out.push_back(where + "arity mismatch: declared " + std::to_string(r.arity) + ", tuples have length " + std::to_string(r.extension->arity()));
            if (r.extension->domain_size() != n)
                out.push_back(where + "extension is over a domain of size " + std::to_string(r.extension->domain_size()));
        }
        if (r.dnf) {
            bool dnf_ok = true;
            if (r.dnf->arity != r.arity) {
                out.push_back(where + "dnf arity " + std::to_string(r.dnf->arity) + " differs from declared arity");
                dnf_ok = false;
            }
            else {
                try {
                    check_dnf(*r.dnf, n);
                }
                catch (const InvalidArgument & e) {
                    out.push_back(where + e.what());
                    dnf_ok = false;
                }
            }
            if (dnf_ok && r.extension && r.extension->arity() == r.arity && r.extension->domain_size() == n
                && ! (dnf_to_extension(*r.dnf, n) == *r.extension))
                out.push_back(where + "dnf mismatch: expansion differs from extension");
        }
    }
    for (auto & f : s.families) {
        if (! seen.insert(f.name).second)
            out.push_back("family '" + f.name + "': name collides with another relation or family");
        if (f.cut.domain_size() != n)
            out.push_back("family '" + f.name + "': cut is over a domain of size " + std::to_string(f.cut.domain_size()));
    }
    return out;
}

// Restriction of s to the named relations (and named families).
inline auto structure_reduct(const Structure & s, const std::set<std::string> & names) -> Structure
{
    for (auto & name : names)
        if (! s.find(name) && ! s.find_family(name))
            throw InvalidArgument("reduct names unknown relation '" + name + "'");
    Structure out{s.domain, {}, {}, s.constants};
    for (auto & r : s.relations)
        if (names.count(r.name))
            out.relations.push_back(r);
    for (auto & f : s.families)
        if (names.count(f.name))
            out.families.push_back(f);
    return out;
}

} // namespace qcsplab
