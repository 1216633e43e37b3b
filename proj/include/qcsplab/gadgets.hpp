#pragma once

#include "qcsplab/dnf.hpp"
#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace qcsplab {

namespace detail {

    inline auto check_cut(const Domain & d, const CutPair & cut) -> void
    {
        if (cut.domain_size() != d.size() || d.size() == 0)
            throw InvalidArgument("cut pair is over a domain of size " + std::to_string(cut.domain_size()) + ", expected " + std::to_string(d.size()));
    }

    // One disjunct per tuple of side^width, each a conjunction of constant
    // atoms on positions offset..offset+width-1.
    inline auto append_cube(std::vector<DnfConjunct> & out, const std::vector<Element> & side, std::size_t width, std::size_t offset) -> void
    {
        std::vector<std::size_t> pick(width, 0);
        while (true) {
            DnfConjunct conj;
            for (std::size_t i = 0; i < width; ++i)
                conj.push_back(DnfAtom::eq_const(offset + i, side[pick[i]]));
            out.push_back(std::move(conj));
            std::size_t q = width;
            while (q-- > 0) {
                if (++pick[q] < side.size())
                    break;
                pick[q] = 0;
            }
            if (q == static_cast<std::size_t>(-1))
                break;
        }
    }

    // (alpha^width ∪ beta^width) repeated as a disjunction over k blocks.
    inline auto block_dnf(const CutPair & cut, std::size_t width, std::size_t k) -> DnfFormula
    {
        DnfFormula f{width * k, {}};
        for (std::size_t block = 0; block < k; ++block) {
            append_cube(f.disjuncts, cut.alpha(), width, block * width);
            append_cube(f.disjuncts, cut.beta(), width, block * width);
        }
        return f;
    }

} // namespace detail

// Direct membership tests, independent of any DNF.
inline auto in_rho(const CutPair & cut, Element x, Element y) -> bool
{
    return (cut.in_alpha(x) && cut.in_alpha(y)) || (cut.in_beta(x) && cut.in_beta(y));
}

inline auto in_rho_prime(const CutPair & cut, Element x, Element y, Element z) -> bool
{
    return (cut.in_alpha(x) && cut.in_alpha(y) && cut.in_alpha(z)) || (cut.in_beta(x) && cut.in_beta(y) && cut.in_beta(z));
}

// Some block (t[3i], t[3i+1], t[3i+2]) lies in rho'.
inline auto in_tau(const CutPair & cut, std::span<const Element> t) -> bool
{
    for (std::size_t i = 0; i + 2 < t.size(); i += 3)
        if (in_rho_prime(cut, t[i], t[i + 1], t[i + 2]))
            return true;
    return false;
}

// rho = (alpha x alpha) ∪ (beta x beta)
inline auto build_rho(const Domain & d, const CutPair & cut) -> Relation
{
    detail::check_cut(d, cut);
    return Relation::from_dnf("rho", d.size(), detail::block_dnf(cut, 2, 1));
}

// rho' = alpha^3 ∪ beta^3, with the |alpha|^3 + |beta|^3 disjunct DNF.
inline auto build_rho_prime(const Domain & d, const CutPair & cut) -> Relation
{
    detail::check_cut(d, cut);
    return Relation::from_dnf("rho_prime", d.size(), detail::block_dnf(cut, 3, 1));
}

// sigma_k = rho(x1,y1) ∨ ... ∨ rho(xk,yk). The extension is materialized only
// when n^(2k) fits the budget; the DNF is always present.
inline auto build_sigma(const Domain & d, const CutPair & cut, std::size_t k, std::uint64_t budget = default_budget) -> Relation
{
    detail::check_cut(d, cut);
    if (k == 0)
        throw InvalidArgument("sigma_k needs k >= 1");
    return Relation::from_dnf("sigma_" + std::to_string(k), d.size(), detail::block_dnf(cut, 2, k), budget);
}

// tau_k = rho'(x1,y1,z1) ∨ ... ∨ rho'(xk,yk,zk)
inline auto build_tau(const Domain & d, const CutPair & cut, std::size_t k, std::uint64_t budget = default_budget) -> Relation
{
    detail::check_cut(d, cut);
    if (k == 0)
        throw InvalidArgument("tau_k needs k >= 1");
    return Relation::from_dnf("tau_" + std::to_string(k), d.size(), detail::block_dnf(cut, 3, k), budget);
}

// The relation defined by the conjunction, over every choice of two of
// (x_i, y_i, z_i) for each i, of the sigma_k atom on the chosen pairs: 3^k
// atoms in all.
inline auto tau_via_sigma_conjunction(const Domain & d, const CutPair & cut, std::size_t k, std::uint64_t budget = default_budget) -> Relation
{
    detail::check_cut(d, cut);
    if (k == 0)
        throw InvalidArgument("k must be at least 1");
    auto n = d.size();
    auto cells = saturating_pow(n, 3 * k);
    auto choices = saturating_pow(3, k);
    if (cells > budget || choices > budget || saturating_pow(n, 2 * k) > budget)
        throw BudgetExceeded("sigma-conjunction definition of tau_" + std::to_string(k), std::max(cells, choices), budget);
    auto sigma = build_sigma(d, cut, k, budget);

    static constexpr std::array<std::array<std::size_t, 2>, 3> pairs{{{0, 1}, {1, 2}, {0, 2}}};
    Relation out{"tau_via_sigma_" + std::to_string(k), 3 * k, TupleSet(n, 3 * k), std::nullopt};
    Tuple t(3 * k, 0), pair_args(2 * k);
    std::vector<std::size_t> choice(k);
    std::uint64_t code = 0;
    do {
        bool all = true;
        std::fill(choice.begin(), choice.end(), 0);
        while (all) {
            for (std::size_t i = 0; i < k; ++i) {
                pair_args[2 * i] = t[3 * i + pairs[choice[i]][0]];
                pair_args[2 * i + 1] = t[3 * i + pairs[choice[i]][1]];
            }
            if (! sigma.contains(pair_args))
                all = false;
            std::size_t q = k;
            while (q-- > 0) {
                if (++choice[q] < 3)
                    break;
                choice[q] = 0;
            }
            if (q == static_cast<std::size_t>(-1))
                break;
        }
        if (all)
            out.extension->insert_code(code);
        ++code;
    } while (next_tuple(t, n));
    return out;
}

// Instance k of a family, named <family>_k.
inline auto instantiate_family(const Domain & d, const FamilySpec & fam, std::size_t k, std::uint64_t budget = default_budget) -> Relation
{
    auto r = fam.kind == FamilySpec::Kind::sigma ? build_sigma(d, fam.cut, k, budget) : build_tau(d, fam.cut, k, budget);
    r.name = fam.instance_name(k);
    return r;
}

// The finite reduct {fam_1, ..., fam_K} of an infinite family signature.
inline auto family_truncation(const Structure & s, const FamilySpec & fam, std::size_t k_max, std::uint64_t budget = default_budget) -> Structure
{
    Structure out{s.domain, {}, {}, s.constants};
    for (std::size_t k = 1; k <= k_max; ++k)
        out.relations.push_back(instantiate_family(s.domain, fam, k, budget));
    return out;
}

} // namespace qcsplab
