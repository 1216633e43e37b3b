#pragma once

#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/gadgets.hpp"
#include "qcsplab/model.hpp"
#include "qcsplab/powers.hpp"
#include "qcsplab/sentence.hpp"
#include "qcsplab/solver.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qcsplab {

// A set of adversaries of length m; each adversary is a nonempty set of m-tuples.
struct AdversarySet {
    std::size_t m = 0;
    std::vector<std::vector<Tuple>> adversaries;
};

inline auto check_adversaries(const AdversarySet & omega, std::size_t n) -> void
{
    if (omega.m == 0)
        throw InvalidArgument("adversary length must be positive");
    if (omega.adversaries.empty())
        throw InvalidArgument("no adversaries given");
    for (auto & o : omega.adversaries) {
        if (o.empty())
            throw InvalidArgument("empty adversary");
        for (auto & t : o) {
            if (t.size() != omega.m)
                throw InvalidArgument("adversary tuple of length " + std::to_string(t.size()) + ", expected " + std::to_string(omega.m));
            for (auto e : t)
                if (e >= n)
                    throw InvalidArgument("adversary tuple entry outside the domain");
        }
    }
}

// Omega = {A^m}
inline auto full_adversary(std::size_t n, std::size_t m) -> AdversarySet
{
    return {m, {all_tuples(n, m)}};
}

// Omega = {tuples of A^m with at most k switches}
inline auto switch_adversary(std::size_t n, std::size_t m, std::size_t k) -> AdversarySet
{
    return {m, {switch_tuples(n, m, k)}};
}

// Maps mu : [n] x [m] -> A, stored row-major (index i*m + j), such that every
// choice of one row per column lands in the adversary; equivalently
// S_1 x ... x S_m ⊆ O where S_j is the image of column j. Lexicographic order.
inline auto consistent_maps(std::size_t n, const std::vector<Tuple> & adversary, std::size_t m, std::uint64_t budget = default_budget)
    -> std::vector<Tuple>
{
    auto cells = n * m;
    auto total = saturating_pow(n, cells);
    if (total > budget)
        throw BudgetExceeded("consistent map enumeration", total, budget);
    TupleSet allowed(n, m);
    for (auto & t : adversary)
        allowed.insert(t);
    std::vector<Tuple> out;
    Tuple mu(cells, 0);
    std::vector<std::vector<Element>> columns(m);
    do {
        for (std::size_t j = 0; j < m; ++j) {
            columns[j].clear();
            for (std::size_t i = 0; i < n; ++i)
                columns[j].push_back(mu[i * m + j]);
            std::sort(columns[j].begin(), columns[j].end());
            columns[j].erase(std::unique(columns[j].begin(), columns[j].end()), columns[j].end());
        }
        bool ok = true;
        std::vector<std::size_t> pick(m, 0);
        Tuple t(m);
        while (ok) {
            for (std::size_t j = 0; j < m; ++j)
                t[j] = columns[j][pick[j]];
            if (! allowed.contains(t))
                ok = false;
            std::size_t q = m;
            while (q-- > 0) {
                if (++pick[q] < columns[q].size())
                    break;
                pick[q] = 0;
            }
            if (q == static_cast<std::size_t>(-1))
                break;
        }
        if (ok)
            out.push_back(mu);
    } while (next_tuple(mu, n));
    return out;
}

struct CanonicalSentence {
    PHSentence sentence;
    // product coordinates: the consistent maps of every adversary, in order
    std::vector<Tuple> maps;
    std::size_t product_size = 0;
    // product element (code) of each prefix variable
    std::vector<std::uint64_t> element_of_variable;
};

// Canonical query of the product, over all consistent maps, of copies of s
// expanded with constants c_ij = mu(i,j): one variable per product element and
// one atom per tuple of each product relation. The n*m constant elements
// become the outermost universal variables w<i>_<j> in (i,j) order; every other
// element becomes an existential variable e<r>, ranked by coordinate vector.
inline auto build_canonical_sentence(const Structure & s, const AdversarySet & omega, std::uint64_t budget = default_budget) -> CanonicalSentence
{
    auto n = s.domain.size();
    check_adversaries(omega, n);
    auto m = omega.m;
    CanonicalSentence out;
    for (auto & o : omega.adversaries)
        for (auto & mu : consistent_maps(n, o, m, budget))
            out.maps.push_back(mu);
    auto p = out.maps.size();
    auto size = saturating_pow(n, p);
    if (size > budget)
        throw BudgetExceeded("product domain of the canonical sentence", size, budget);
    out.product_size = size;

    std::uint64_t atoms = 0;
    for (auto & r : s.relations) {
        if (! r.extension)
            throw InvalidArgument("relation '" + r.name + "' has no materialized extension");
        atoms = std::min<std::uint64_t>(budget + 1, atoms + saturating_pow(r.extension->size(), p));
    }
    if (atoms > budget)
        throw BudgetExceeded("atoms of the canonical sentence", atoms, budget);

    std::vector<std::uint64_t> constants;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Tuple coords;
            for (auto & mu : out.maps)
                coords.push_back(mu[i * m + j]);
            constants.push_back(tuple_code(coords, n));
        }
    if (std::set<std::uint64_t>(constants.begin(), constants.end()).size() != constants.size())
        throw InvalidArgument("degenerate adversary: constants are not pairwise distinct");

    std::vector<std::size_t> variable_of(size, 0);
    std::vector<bool> is_constant(size, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            auto c = constants[i * m + j];
            is_constant[c] = true;
            variable_of[c] = out.sentence.prefix.size();
            out.sentence.prefix.push_back({Quantifier::forall, "w" + std::to_string(i + 1) + "_" + std::to_string(j + 1)});
            out.element_of_variable.push_back(c);
        }
    std::size_t rank = 0;
    for (std::uint64_t e = 0; e < size; ++e) {
        if (is_constant[e])
            continue;
        variable_of[e] = out.sentence.prefix.size();
        out.sentence.prefix.push_back({Quantifier::exists, "e" + std::to_string(rank++)});
        out.element_of_variable.push_back(e);
    }
    for (auto & v : out.sentence.prefix)
        if (s.domain.find(v.name))
            throw InvalidArgument("variable name '" + v.name + "' clashes with a domain element");

    for (auto & r : s.relations) {
        auto rows = r.extension->tuples();
        if (rows.empty() || p == 0)
            continue;
        std::vector<std::size_t> pick(p, 0);
        while (true) {
            Atom atom{r.name, {}};
            for (std::size_t a = 0; a < r.arity; ++a) {
                std::uint64_t code = 0;
                for (std::size_t q = 0; q < p; ++q)
                    code = code * n + rows[pick[q]][a];
                atom.args.push_back(Term::var(variable_of[code]));
            }
            out.sentence.body.push_back(std::move(atom));
            std::size_t q = p;
            while (q-- > 0) {
                if (++pick[q] < rows.size())
                    break;
                pick[q] = 0;
            }
            if (q == static_cast<std::size_t>(-1))
                break;
        }
    }
    return out;
}

struct CompactnessRow {
    std::size_t k = 0;
    bool verdict = false;
    std::size_t atoms = 0;
};

struct WitnessStability {
    Tuple universal;
    // existential assignments that solve this universal branch at every K
    std::size_t common = 0;
    std::optional<Tuple> example;
};

struct CompactnessReport {
    std::size_t universals = 0;
    std::size_t existentials = 0;
    std::vector<CompactnessRow> rows;
    // a true verdict at K implies a true verdict at every smaller K
    bool monotone = true;
    std::vector<WitnessStability> witnesses;
    // some branch hit the enumeration cap; witness intersections are then partial
    bool capped = false;
};

// Evaluates the canonical sentence of each structure in order (typically the
// truncations {fam_1..fam_K}, K = 1, 2, ...) and intersects, per universal
// branch, the sets of existential witnesses across all of them.
inline auto compactness_probe(const std::vector<Structure> & truncations, const AdversarySet & omega, std::size_t witness_cap = 4096,
    std::uint64_t budget = default_budget) -> CompactnessReport
{
    CompactnessReport report;
    if (truncations.empty())
        return report;
    auto n = truncations.front().domain.size();
    std::vector<std::set<Tuple>> common;
    std::vector<Tuple> branches;
    for (std::size_t idx = 0; idx < truncations.size(); ++idx) {
        auto canon = build_canonical_sentence(truncations[idx], omega, budget);
        auto & phi = canon.sentence;
        auto u = phi.leading_universals();
        report.universals = u;
        report.existentials = phi.prefix.size() - u;
        if (idx == 0) {
            branches = all_tuples(n, u);
            common.resize(branches.size());
        }
        CompactnessRow row{idx + 1, true, phi.body.size()};
        for (std::size_t b = 0; b < branches.size(); ++b) {
            std::set<Tuple> found;
            CspSearch search(instantiate_prefix(phi, branches[b]), truncations[idx], budget);
            search.enumerate([&](const std::vector<Element> & a) {
                found.insert(a);
                return found.size() < witness_cap;
            });
            if (found.size() >= witness_cap)
                report.capped = true;
            if (found.empty())
                row.verdict = false;
            if (idx == 0)
                common[b] = std::move(found);
            else {
                std::set<Tuple> keep;
                std::set_intersection(common[b].begin(), common[b].end(), found.begin(), found.end(), std::inserter(keep, keep.end()));
                common[b] = std::move(keep);
            }
        }
        if (! report.rows.empty() && row.verdict && ! report.rows.back().verdict)
            report.monotone = false;
        report.rows.push_back(row);
    }
    for (std::size_t b = 0; b < branches.size(); ++b) {
        WitnessStability w{branches[b], common[b].size(), std::nullopt};
        if (! common[b].empty())
            w.example = *common[b].begin();
        report.witnesses.push_back(std::move(w));
    }
    return report;
}

// The probe over the reducts {fam_1, ..., fam_K} for K = 1..k_max.
inline auto reduct_compactness_probe(const Structure & s, const std::string & family, const AdversarySet & omega, std::size_t k_max,
    std::size_t witness_cap = 4096, std::uint64_t budget = default_budget) -> CompactnessReport
{
    auto fam = s.find_family(family);
    if (! fam)
        throw InvalidArgument("unknown family '" + family + "'");
    if (k_max == 0)
        throw InvalidArgument("k-max must be at least 1");
    std::vector<Structure> truncations;
    for (std::size_t k = 1; k <= k_max; ++k)
        truncations.push_back(family_truncation(s, *fam, k, budget));
    return compactness_probe(truncations, omega, witness_cap, budget);
}

} // namespace qcsplab
