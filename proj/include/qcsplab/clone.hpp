#pragma once

#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qcsplab {

// k tuples of a relation whose componentwise image under an operation falls
// outside the relation.
struct PreservationWitness {
    std::string operation;
    std::string relation;
    std::vector<Tuple> arguments;
    Tuple image;
};

struct PreservationResult {
    bool preserved = true;
    std::optional<PreservationWitness> witness;

    explicit operator bool() const noexcept { return preserved; }
};

// Checks f over every k-choice (with repetition) of tuples of r.
inline auto preserves(const Operation & f, const Relation & r, std::uint64_t budget = default_budget) -> PreservationResult
{
    if (! r.extension)
        throw InvalidArgument("preservation needs a materialized extension of '" + r.name + "'");
    if (r.extension->domain_size() != f.domain_size)
        throw InvalidArgument("operation '" + f.name + "' and relation '" + r.name + "' are over different domains");
    auto rows = r.extension->tuples();
    auto k = f.arity;
    auto m = r.arity;
    auto n = f.domain_size;
    if (rows.empty())
        return {};
    auto work = saturating_pow(rows.size(), k);
    if (work > budget)
        throw BudgetExceeded("preservation check of '" + f.name + "' on '" + r.name + "'", work, budget);

    // partial[j][i]: table index contribution of the first j+1 chosen rows at coordinate i
    std::vector<std::size_t> choice(k, 0);
    std::vector<std::vector<std::uint64_t>> partial(k, std::vector<std::uint64_t>(m, 0));
    auto refresh = [&](std::size_t from) {
        for (auto j = from; j < k; ++j)
            for (std::size_t i = 0; i < m; ++i)
                partial[j][i] = (j ? partial[j - 1][i] * n : 0) + rows[choice[j]][i];
    };
    refresh(0);
    Tuple image(m);
    while (true) {
        for (std::size_t i = 0; i < m; ++i)
            image[i] = f.at_code(partial[k - 1][i]);
        if (! r.extension->contains(image)) {
            PreservationWitness w{f.name, r.name, {}, image};
            for (auto c : choice)
                w.arguments.push_back(rows[c]);
            return {false, std::move(w)};
        }
        std::size_t p = k;
        while (p-- > 0) {
            if (++choice[p] < rows.size())
                break;
            choice[p] = 0;
        }
        if (p == static_cast<std::size_t>(-1))
            break;
        refresh(p);
    }
    return {};
}

// Membership in Pol(s). Equality is preserved by every operation; a structure
// expanded with constants additionally requires idempotency.
inline auto is_polymorphism(const Operation & f, const Structure & s, std::uint64_t budget = default_budget) -> bool
{
    if (f.domain_size != s.domain.size())
        throw InvalidArgument("operation '" + f.name + "' is over a different domain than the structure");
    if (s.constants && ! f.is_idempotent())
        return false;
    for (auto & r : s.relations)
        if (! preserves(f, r, budget))
            return false;
    return true;
}

// Visits, in lexicographic order of tables, every operation of the given
// arity that is a polymorphism of s. Returns the number visited.
inline auto for_each_polymorphism(const Structure & s, std::size_t arity, bool idempotent_only, std::uint64_t budget,
    const std::function<void(const Operation &)> & visit) -> std::uint64_t
{
    if (arity == 0)
        throw InvalidArgument("polymorphism arity must be positive");
    auto n = s.domain.size();
    auto cells = saturating_pow(n, arity);
    if (cells == std::numeric_limits<std::uint64_t>::max())
        throw BudgetExceeded("polymorphism enumeration", cells, budget);
    std::vector<bool> fixed(cells, false);
    std::vector<Element> table(cells, 0);
    if (idempotent_only || s.constants)
        for (Element a = 0; a < n; ++a) {
            auto code = tuple_code(Tuple(arity, a), n);
            fixed[code] = true;
            table[code] = a;
        }
    std::vector<std::uint64_t> free_cells;
    for (std::uint64_t c = 0; c < cells; ++c)
        if (! fixed[c])
            free_cells.push_back(c);
    auto total = saturating_pow(n, free_cells.size());
    if (total > budget)
        throw BudgetExceeded("polymorphism enumeration of arity " + std::to_string(arity), total, budget);

    // One constraint per relation and choice of `arity` rows: the image of the
    // chosen rows must lie in the relation. It is checked as soon as the last
    // free cell it reads is assigned, so the search prunes partial tables.
    struct Constraint {
        const Relation * relation;
        std::vector<std::uint64_t> cells;
    };
    std::vector<std::size_t> position(cells, 0);
    for (std::size_t p = 0; p < free_cells.size(); ++p)
        position[free_cells[p]] = p + 1;
    std::vector<std::vector<Constraint>> at(free_cells.size() + 1);
    std::uint64_t work = 0;
    for (auto & r : s.relations) {
        if (! r.extension)
            throw InvalidArgument("polymorphism enumeration needs a materialized extension of '" + r.name + "'");
        auto rows = r.extension->tuples();
        if (rows.empty())
            continue;
        work = std::min(budget + 1, work + saturating_pow(rows.size(), arity));
        if (work > budget)
            throw BudgetExceeded("polymorphism constraints of arity " + std::to_string(arity), work, budget);
        std::vector<std::size_t> choice(arity, 0);
        while (true) {
            Constraint c{&r, std::vector<std::uint64_t>(r.arity, 0)};
            std::size_t last = 0;
            for (std::size_t i = 0; i < r.arity; ++i) {
                for (auto q : choice)
                    c.cells[i] = c.cells[i] * n + rows[q][i];
                last = std::max(last, position[c.cells[i]]);
            }
            at[last].push_back(std::move(c));
            std::size_t q = arity;
            while (q-- > 0) {
                if (++choice[q] < rows.size())
                    break;
                choice[q] = 0;
            }
            if (q == static_cast<std::size_t>(-1))
                break;
        }
    }

    std::uint64_t found = 0;
    Operation op{"", arity, n, table};
    Tuple image;
    auto satisfied = [&](std::size_t level) {
        for (auto & c : at[level]) {
            image.resize(c.cells.size());
            for (std::size_t i = 0; i < c.cells.size(); ++i)
                image[i] = op.table[c.cells[i]];
            if (! c.relation->extension->contains(image))
                return false;
        }
        return true;
    };
    if (! satisfied(0))
        return 0;
    // cells in increasing order with the last one fastest: lexicographic on tables
    auto search = [&](auto && self, std::size_t p, std::uint64_t index) -> void {
        if (p == free_cells.size()) {
            op.name = "f" + std::to_string(arity) + "_" + std::to_string(index);
            visit(op);
            ++found;
            return;
        }
        for (Element v = 0; v < n; ++v) {
            op.table[free_cells[p]] = v;
            if (satisfied(p + 1))
                self(self, p + 1, index * n + v);
        }
        op.table[free_cells[p]] = 0;
    };
    search(search, 0, 0);
    return found;
}

inline auto enumerate_polymorphisms(const Structure & s, std::size_t arity, bool idempotent_only, std::uint64_t budget = default_budget)
    -> std::vector<Operation>
{
    std::vector<Operation> out;
    for_each_polymorphism(s, arity, idempotent_only, budget, [&](const Operation & f) { out.push_back(f); });
    return out;
}

namespace detail {

    // The value occurring at least arity-1 times, if any.
    inline auto near_unanimous_value(std::span<const Element> args, std::size_t n) -> std::optional<Element>
    {
        if (args.size() < 3)
            return std::nullopt;
        std::vector<std::size_t> count(n, 0);
        for (auto a : args)
            ++count[a];
        for (Element x = 0; x < n; ++x)
            if (count[x] + 1 >= args.size())
                return x;
        return std::nullopt;
    }

} // namespace detail

// Near-unanimity operation of the given arity that sends every input not
// settled by the near-unanimity identities to the least element of
// alpha ∩ beta.
inline auto build_nu_operation(const Domain & d, const CutPair & cut, std::size_t arity) -> Operation
{
    if (arity < 3)
        throw InvalidArgument("near-unanimity operations need arity at least 3");
    if (cut.domain_size() != d.size())
        throw InvalidArgument("cut is over a different domain");
    auto fallback = cut.least_common();
    if (! fallback)
        throw InvalidArgument("alpha and beta do not intersect");
    auto n = d.size();
    return Operation::from_function("nu" + std::to_string(arity), n, arity, [&](std::span<const Element> args) {
        return detail::near_unanimous_value(args, n).value_or(*fallback);
    });
}

// f(y,x,...,x) = f(x,y,x,...,x) = ... = f(x,...,x,y) = x for all x, y.
inline auto check_nu_identities(const Operation & f) -> bool
{
    if (f.arity < 3)
        return false;
    Tuple args(f.arity);
    for (Element x = 0; x < f.domain_size; ++x)
        for (Element y = 0; y < f.domain_size; ++y)
            for (std::size_t p = 0; p < f.arity; ++p) {
                std::fill(args.begin(), args.end(), x);
                args[p] = y;
                if (f(args) != x)
                    return false;
            }
    return true;
}

struct NuPreservationResult {
    enum class Status { preserved, violated, unresolved };

    Status status = Status::preserved;
    // image tuple outside the relation that the pigeonhole argument could not rule out
    std::optional<Tuple> unresolved_image;
    std::optional<PreservationWitness> witness;
    std::uint64_t images_examined = 0;
};

// Preservation of r by a near-unanimity operation f, without enumerating
// |r|^arity row choices. Let D be the set of values f takes on inputs that are
// not near-unanimous. An image coordinate outside D comes from a column in
// which at most one row deviates, so an image t with fewer than arity such
// coordinates J(t) agrees with some chosen row on all of J(t). Hence if no
// tuple of r agrees with t on J(t), t is not an image. Images that cannot be
// ruled out this way fall back to the full check when |r|^arity fits the
// budget, and are reported as unresolved otherwise.
inline auto preserves_nu_pigeonhole(const Operation & f, const Relation & r, std::uint64_t budget = default_budget) -> NuPreservationResult
{
    if (! check_nu_identities(f))
        throw InvalidArgument("operation '" + f.name + "' is not a near-unanimity operation");
    if (! r.extension)
        throw InvalidArgument("relation '" + r.name + "' has no materialized extension");
    if (r.extension->domain_size() != f.domain_size)
        throw InvalidArgument("operation and relation are over different domains");
    auto n = f.domain_size;
    auto m = r.arity;

    std::vector<bool> off_nu(n, false);
    {
        Tuple args(f.arity, 0);
        std::uint64_t code = 0;
        do {
            if (! detail::near_unanimous_value(args, n))
                off_nu[f.at_code(code)] = true;
            ++code;
        } while (next_tuple(args, n));
    }

    auto rows = r.extension->tuples();
    NuPreservationResult result;
    Tuple image(m, 0);
    do {
        if (r.extension->contains(image))
            continue;
        ++result.images_examined;
        std::vector<std::size_t> forced;
        for (std::size_t j = 0; j < m; ++j)
            if (! off_nu[image[j]])
                forced.push_back(j);
        bool ruled_out = false;
        if (forced.size() < f.arity) {
            ruled_out = true;
            for (auto & row : rows) {
                bool agrees = true;
                for (auto j : forced)
                    if (row[j] != image[j]) {
                        agrees = false;
                        break;
                    }
                if (agrees) {
                    ruled_out = false;
                    break;
                }
            }
        }
        if (! ruled_out) {
            result.unresolved_image = image;
            break;
        }
    } while (next_tuple(image, n));

    if (! result.unresolved_image)
        return result;
    if (saturating_pow(rows.size(), f.arity) > budget) {
        result.status = NuPreservationResult::Status::unresolved;
        return result;
    }
    auto full = preserves(f, r, budget);
    result.status = full.preserved ? NuPreservationResult::Status::preserved : NuPreservationResult::Status::violated;
    result.witness = std::move(full.witness);
    return result;
}

} // namespace qcsplab
