#pragma once

#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace qcsplab {

// Raised when the exact generating-set search runs out of budget. All sizes
// below `lower` were excluded; a generating set of size `upper` is known.
class GeneratingSearchExhausted : public BudgetExceeded {
public:
    GeneratingSearchExhausted(std::size_t m, std::size_t lower, std::size_t upper, std::uint64_t used, std::uint64_t budget) :
        BudgetExceeded("minimal generating set search for A^" + std::to_string(m) + " (f in [" + std::to_string(lower) + ", " + std::to_string(upper) + "])", used, budget),
        lower_(lower),
        upper_(upper)
    {
    }

    auto lower() const noexcept -> std::size_t { return lower_; }
    auto upper() const noexcept -> std::size_t { return upper_; }

private:
    std::size_t lower_, upper_;
};

// Subalgebra generation inside A^m, with tuples handled by lexicographic rank.
class PowerClosure {
public:
    PowerClosure(const Algebra & alg, std::size_t m) :
        ops_(&alg.operations),
        n_(alg.domain.size()),
        m_(m),
        count_(saturating_pow(n_, m))
    {
        if (m == 0)
            throw InvalidArgument("power exponent must be positive");
        if (count_ > TupleSet::max_dense)
            throw BudgetExceeded("A^" + std::to_string(m) + " too large", count_, TupleSet::max_dense);
        for (auto & f : alg.operations)
            if (f.domain_size != n_)
                throw InvalidArgument("operation '" + f.name + "' is over a different domain than the algebra");
        digits_.resize(count_ * m_);
        for (std::uint64_t c = 0; c < count_; ++c) {
            auto t = decode_tuple(c, n_, m_);
            std::copy(t.begin(), t.end(), digits_.begin() + static_cast<std::ptrdiff_t>(c * m_));
        }
    }

    auto size() const noexcept -> std::uint64_t { return count_; }
    auto exponent() const noexcept -> std::size_t { return m_; }
    auto domain_size() const noexcept -> std::size_t { return n_; }
    auto work() const noexcept -> std::uint64_t { return work_; }

    auto digit(std::uint64_t code, std::size_t i) const -> Element { return digits_[code * m_ + i]; }

    // Closes `members` (with indicator `in`) under every operation. Only
    // argument choices involving at least one element added since the last
    // round are evaluated; the loop stops after a round that adds nothing.
    // The first `closed_prefix` members must already form a closed set.
    auto close(std::vector<std::uint64_t> & members, std::vector<char> & in, std::uint64_t budget, std::size_t closed_prefix = 0) -> void
    {
        std::uint64_t work = 0;
        std::size_t done = closed_prefix;
        while (done < members.size()) {
            auto fresh = done;
            auto end = members.size();
            for (auto & f : *ops_)
                apply_round(f, members, in, fresh, end, work, budget);
            done = end;
        }
        work_ += work;
    }

    auto closure_of(const std::vector<std::uint64_t> & seeds, std::uint64_t budget) -> std::vector<char>
    {
        std::vector<char> in(count_, 0);
        std::vector<std::uint64_t> members;
        for (auto s : seeds)
            if (! in[s]) {
                in[s] = 1;
                members.push_back(s);
            }
        close(members, in, budget);
        return in;
    }

private:
    auto apply_round(const Operation & f, std::vector<std::uint64_t> & members, std::vector<char> & in, std::size_t fresh,
        std::size_t end, std::uint64_t & work, std::uint64_t budget) -> void
    {
        auto k = f.arity;
        std::vector<std::size_t> idx(k);
        // the first argument drawn from the fresh range sits at position p
        for (std::size_t p = 0; p < k; ++p) {
            if (p > 0 && fresh == 0)
                break;
            std::vector<std::size_t> lo(k), hi(k);
            for (std::size_t j = 0; j < k; ++j) {
                lo[j] = j == p ? fresh : 0;
                hi[j] = j < p ? fresh : end;
            }
            bool empty = false;
            for (std::size_t j = 0; j < k; ++j) {
                if (lo[j] >= hi[j])
                    empty = true;
                idx[j] = lo[j];
            }
            if (empty)
                continue;
            while (true) {
                if (++work > budget)
                    throw BudgetExceeded("subpower closure in A^" + std::to_string(m_), work, budget);
                std::uint64_t image = 0;
                for (std::size_t i = 0; i < m_; ++i) {
                    std::uint64_t arg = 0;
                    for (std::size_t j = 0; j < k; ++j)
                        arg = arg * n_ + digits_[members[idx[j]] * m_ + i];
                    image = image * n_ + f.at_code(arg);
                }
                if (! in[image]) {
                    in[image] = 1;
                    members.push_back(image);
                }
                std::size_t q = k;
                while (q-- > 0) {
                    if (++idx[q] < hi[q])
                        break;
                    idx[q] = lo[q];
                }
                if (q == static_cast<std::size_t>(-1))
                    break;
            }
        }
    }

    const std::vector<Operation> * ops_;
    std::size_t n_, m_;
    std::uint64_t count_;
    std::vector<Element> digits_;
    std::uint64_t work_ = 0;
};

// Least superset of the seeds closed under the componentwise action of every
// operation, in lexicographic order.
inline auto generate_subpower(const Algebra & alg, const std::vector<Tuple> & seeds, std::uint64_t budget = default_budget * 10)
    -> std::vector<Tuple>
{
    if (seeds.empty())
        return {};
    auto m = seeds.front().size();
    PowerClosure pc(alg, m);
    std::vector<std::uint64_t> codes;
    for (auto & s : seeds) {
        if (s.size() != m)
            throw InvalidArgument("seed tuples of differing lengths");
        for (auto e : s)
            if (e >= alg.domain.size())
                throw InvalidArgument("seed entry outside the domain");
        codes.push_back(tuple_code(s, alg.domain.size()));
    }
    auto in = pc.closure_of(codes, budget);
    std::vector<Tuple> out;
    for (std::uint64_t c = 0; c < pc.size(); ++c)
        if (in[c])
            out.push_back(decode_tuple(c, alg.domain.size(), m));
    return out;
}

struct GeneratingSetResult {
    std::size_t size = 0;
    std::vector<Tuple> generators;
    // tuples that lie in every generating set
    std::size_t essential = 0;
    std::uint64_t closures = 0;
};

namespace detail {

    // Tuples not produced by one operation application from the other tuples
    // are essential and seeded first. A greedy run gives an upper bound;
    // iterative deepening below it explores closed sets only, never adds an
    // already generated tuple, and memoizes failed (closed set, remaining
    // slots) states.
    inline auto min_generating_size(const Algebra & alg, PowerClosure & pc, std::size_t m, std::uint64_t budget, std::uint64_t & closures,
        std::size_t & lower, std::size_t & upper) -> GeneratingSetResult
    {
        auto total = pc.size();
        auto n = alg.domain.size();

        std::vector<char> essential(total, 1);
        std::uint64_t step_work = 0;
        for (auto & f : alg.operations)
            step_work += saturating_pow(total, f.arity);
        if (step_work <= budget) {
            for (auto & f : alg.operations) {
                std::vector<std::uint64_t> args(f.arity, 0);
                while (true) {
                    std::uint64_t image = 0;
                    for (std::size_t i = 0; i < m; ++i) {
                        std::uint64_t arg = 0;
                        for (auto a : args)
                            arg = arg * n + pc.digit(a, i);
                        image = image * n + f.at_code(arg);
                    }
                    if (std::find(args.begin(), args.end(), image) == args.end())
                        essential[image] = 0;
                    std::size_t q = args.size();
                    while (q-- > 0) {
                        if (++args[q] < total)
                            break;
                        args[q] = 0;
                    }
                    if (q == static_cast<std::size_t>(-1))
                        break;
                }
            }
        }
        else
            std::fill(essential.begin(), essential.end(), 0);

        std::vector<std::uint64_t> forced;
        for (std::uint64_t c = 0; c < total; ++c)
            if (essential[c])
                forced.push_back(c);

        auto full = [&](const std::vector<char> & in) { return std::all_of(in.begin(), in.end(), [](char b) { return b != 0; }); };
        auto to_tuples = [&](const std::vector<std::uint64_t> & codes) {
            std::vector<Tuple> out;
            for (auto c : codes)
                out.push_back(decode_tuple(c, n, m));
            std::sort(out.begin(), out.end());
            return out;
        };

        auto base = pc.closure_of(forced, budget);
        ++closures;

        std::vector<std::uint64_t> greedy = forced;
        {
            auto in = base;
            while (! full(in)) {
                auto missing = static_cast<std::uint64_t>(std::find(in.begin(), in.end(), 0) - in.begin());
                greedy.push_back(missing);
                in = pc.closure_of(greedy, budget);
                ++closures;
            }
        }
        upper = greedy.size();
        lower = std::max<std::size_t>(forced.size(), 1);

        std::unordered_set<std::string> failed;
        std::vector<std::uint64_t> chosen;
        auto search = [&](auto && self, const std::vector<char> & in, std::size_t slots) -> bool {
            if (full(in))
                return true;
            if (slots == 0)
                return false;
            std::string key(in.begin(), in.end());
            key.push_back(static_cast<char>(slots));
            if (failed.count(key))
                return false;
            for (std::uint64_t t = 0; t < total; ++t) {
                if (in[t])
                    continue;
                if (++closures > budget)
                    throw GeneratingSearchExhausted(m, lower, upper, closures, budget);
                std::vector<std::uint64_t> next_members;
                auto next = in;
                for (std::uint64_t c = 0; c < total; ++c)
                    if (next[c])
                        next_members.push_back(c);
                auto closed = next_members.size();
                next[t] = 1;
                next_members.push_back(t);
                pc.close(next_members, next, budget * 16, closed);
                chosen.push_back(t);
                if (self(self, next, slots - 1))
                    return true;
                chosen.pop_back();
            }
            failed.insert(std::move(key));
            return false;
        };

        for (auto s = lower; s < upper; ++s) {
            chosen.clear();
            if (s < forced.size())
                continue;
            if (search(search, base, s - forced.size())) {
                auto gens = forced;
                gens.insert(gens.end(), chosen.begin(), chosen.end());
                return {s, to_tuples(gens), forced.size(), closures};
            }
            lower = s + 1;
        }
        return {upper, to_tuples(greedy), forced.size(), closures};
    }

} // namespace detail

// Exact f(m): the least s such that some s-subset of A^m generates A^m.
inline auto min_generating_size(const Algebra & alg, std::size_t m, std::uint64_t budget = default_budget) -> GeneratingSetResult
{
    PowerClosure pc(alg, m);
    std::uint64_t closures = 0;
    std::size_t lower = 1, upper = static_cast<std::size_t>(pc.size());
    try {
        return detail::min_generating_size(alg, pc, m, budget, closures, lower, upper);
    }
    catch (const GeneratingSearchExhausted &) {
        throw;
    }
    catch (const BudgetExceeded &) {
        throw GeneratingSearchExhausted(m, lower, upper, closures, budget);
    }
}

// Tuples in which some value occurs at least m-k times.
inline auto collapse_tuples(std::size_t n, std::size_t m, std::size_t k) -> std::vector<Tuple>
{
    if (k > m)
        throw InvalidArgument("collapsibility parameter k exceeds m");
    std::vector<Tuple> out;
    std::vector<std::size_t> count(n);
    for (auto & t : all_tuples(n, m)) {
        std::fill(count.begin(), count.end(), 0);
        for (auto e : t)
            ++count[e];
        if (*std::max_element(count.begin(), count.end()) + k >= m)
            out.push_back(t);
    }
    return out;
}

// Number of positions i > 0 with t[i] != t[i-1].
inline auto switch_count(std::span<const Element> t) -> std::size_t
{
    std::size_t c = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        c += t[i] != t[i - 1];
    return c;
}

// Indices (0-based) at which the tuple switches value.
inline auto switch_indices(std::span<const Element> t) -> std::vector<std::size_t>
{
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] != t[i - 1])
            out.push_back(i);
    return out;
}

inline auto switch_tuples(std::size_t n, std::size_t m, std::size_t k) -> std::vector<Tuple>
{
    if (m == 0)
        throw InvalidArgument("switch tuples need m >= 1");
    std::vector<Tuple> out;
    for (auto & t : all_tuples(n, m))
        if (switch_count(t) <= k)
            out.push_back(t);
    return out;
}

namespace detail {

    inline auto generates_everything(const Algebra & alg, std::size_t m, const std::vector<Tuple> & seeds, std::uint64_t budget) -> bool
    {
        return generate_subpower(alg, seeds, budget).size() == saturating_pow(alg.domain.size(), m);
    }

} // namespace detail

inline auto test_collapsibility(const Algebra & alg, std::size_t m, std::size_t k, std::uint64_t budget = default_budget * 10) -> bool
{
    return detail::generates_everything(alg, m, collapse_tuples(alg.domain.size(), m, k), budget);
}

inline auto test_switchability(const Algebra & alg, std::size_t m, std::size_t k, std::uint64_t budget = default_budget * 10) -> bool
{
    return detail::generates_everything(alg, m, switch_tuples(alg.domain.size(), m, k), budget);
}

struct GrowthRow {
    std::size_t m = 0;
    std::optional<std::size_t> f;
    // bounds when the exact search ran out of budget
    std::optional<std::pair<std::size_t, std::size_t>> bounds;
    std::map<std::size_t, bool> collapse;
    std::map<std::size_t, bool> switching;
};

struct GrowthProfile {
    enum class Hint { consistent_with_pgp, consistent_with_egp, inconclusive };

    std::string algebra;
    std::vector<GrowthRow> rows;
    Hint hint = Hint::inconclusive;
};

inline auto to_string(GrowthProfile::Hint h) -> std::string
{
    switch (h) {
    case GrowthProfile::Hint::consistent_with_pgp:
        return "consistent-with-PGP";
    case GrowthProfile::Hint::consistent_with_egp:
        return "consistent-with-EGP";
    default:
        return "inconclusive";
    }
}

// Heuristic reading of a finite prefix f(1..M) of the growth function: the
// successive ratios f(m+1)/f(m) shrink for polynomial growth and stay put (or
// grow) for exponential growth. Needs at least three exact values. This never
// decides PGP or EGP, which are statements about all m.
inline auto classify_growth(const std::vector<std::size_t> & f) -> GrowthProfile::Hint
{
    if (f.size() < 3)
        return GrowthProfile::Hint::inconclusive;
    std::vector<double> ratio;
    for (std::size_t i = 1; i < f.size(); ++i)
        ratio.push_back(static_cast<double>(f[i]) / static_cast<double>(f[i - 1]));
    constexpr double eps = 1e-9;
    if (std::all_of(ratio.begin(), ratio.end(), [](double r) { return std::abs(r - 1.0) < eps; }))
        return GrowthProfile::Hint::consistent_with_pgp;
    if (ratio.back() < ratio.front() - eps)
        return GrowthProfile::Hint::consistent_with_pgp;
    if (ratio.back() > 1.0 + eps && ratio.back() >= ratio.front() - eps)
        return GrowthProfile::Hint::consistent_with_egp;
    return GrowthProfile::Hint::inconclusive;
}

// f(m) for m = 1..m_max where the exact search completes within budget, plus
// collapsibility and switchability verdicts for k = 0..min(k_max, m).
inline auto growth_profile(const Algebra & alg, std::size_t m_max, std::size_t k_max, std::uint64_t budget = default_budget) -> GrowthProfile
{
    GrowthProfile p{alg.name, {}, GrowthProfile::Hint::inconclusive};
    std::vector<std::size_t> exact;
    bool exact_prefix = true;
    for (std::size_t m = 1; m <= m_max; ++m) {
        GrowthRow row;
        row.m = m;
        if (exact_prefix) {
            try {
                row.f = min_generating_size(alg, m, budget).size;
                exact.push_back(*row.f);
            }
            catch (const GeneratingSearchExhausted & e) {
                row.bounds = std::pair{e.lower(), e.upper()};
                exact_prefix = false;
            }
            catch (const BudgetExceeded &) {
                exact_prefix = false;
            }
        }
        for (std::size_t k = 0; k <= std::min(k_max, m); ++k) {
            try {
                row.collapse[k] = test_collapsibility(alg, m, k, budget * 10);
                row.switching[k] = test_switchability(alg, m, k, budget * 10);
            }
            catch (const BudgetExceeded &) {
                break;
            }
        }
        p.rows.push_back(std::move(row));
    }
    p.hint = classify_growth(exact);
    return p;
}

} // namespace qcsplab
