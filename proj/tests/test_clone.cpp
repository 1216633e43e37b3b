#include "qcsplab/algebras.hpp"
#include "qcsplab/clone.hpp"
#include "qcsplab/gadgets.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qcsplab;

namespace {

const Domain d2 = Domain::of_size(2);
const Domain d3 = Domain::of_size(3);

Relation disequality() { return Relation::from_tuples("neq", 2, 2, {{0, 1}, {1, 0}}); }

// Preservation straight from the definition: every choice of k rows.
bool preserved_by_definition(const Operation & f, const Relation & r)
{
    auto rows = r.tuples();
    for (auto & pick : all_tuples(rows.size(), f.arity)) {
        Tuple image;
        for (std::size_t i = 0; i < r.arity; ++i) {
            Tuple column;
            for (auto p : pick)
                column.push_back(rows[p][i]);
            image.push_back(f(column));
        }
        if (! r.contains(image))
            return false;
    }
    return true;
}

} // namespace

TEST(Preserves, ProjectionsPreserveEverything)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Tuple> rows;
        for (auto & t : all_tuples(3, 2))
            if (rng() % 2)
                rows.push_back(t);
        auto r = Relation::from_tuples("R", 3, 2, rows);
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_TRUE(preserves(Operation::projection(3, 3, i), r).preserved);
    }
}

TEST(Preserves, MajorityPreservesDisequality)
{
    EXPECT_TRUE(preserves(majority_algebra(2).operations[0], disequality()).preserved);
}

TEST(Preserves, MeetBreaksDisequalityWithWitness)
{
    auto f = meet_semilattice(2).operations[0];
    auto r = preserves(f, disequality());
    ASSERT_FALSE(r.preserved);
    ASSERT_TRUE(r.witness);
    EXPECT_EQ(r.witness->arguments, (std::vector<Tuple>{{0, 1}, {1, 0}}));
    EXPECT_EQ(r.witness->image, (Tuple{0, 0}));
    // replaying the witness reproduces the failure
    EXPECT_EQ(apply_operation(f, r.witness->arguments), r.witness->image);
    EXPECT_FALSE(disequality().contains(r.witness->image));
}

TEST(Preserves, AgreesWithDefinitionOnRandomInputs)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 2 + rng() % 2, arity = 1 + rng() % 2, k = 1 + rng() % 3;
        std::vector<Tuple> rows;
        for (auto & t : all_tuples(n, arity))
            if (rng() % 2)
                rows.push_back(t);
        auto r = Relation::from_tuples("R", n, arity, rows);
        auto f = Operation::from_function("f", n, k, [&](std::span<const Element>) { return static_cast<Element>(rng() % n); });
        EXPECT_EQ(preserves(f, r).preserved, preserved_by_definition(f, r));
    }
}

TEST(Preserves, DomainMismatchAndBudget)
{
    EXPECT_THROW(preserves(Operation::projection(3, 2, 0), disequality()), InvalidArgument);
    auto tau = build_tau(d3, CutPair::make(3, {0, 1}, {1, 2}), 1);
    EXPECT_THROW(preserves(Operation::projection(3, 7, 0), tau, 1000), BudgetExceeded);
}

TEST(IsPolymorphism, ProjectionAndNu)
{
    auto cut = CutPair::make(3, {0, 1}, {1, 2});
    Structure s{d3, {build_tau(d3, cut, 1)}, {}, false};
    EXPECT_TRUE(is_polymorphism(Operation::projection(3, 2, 1), s));
    // brute force over (tau_1)^4 argument choices
    EXPECT_TRUE(is_polymorphism(build_nu_operation(d3, cut, 4), s));
}

TEST(IsPolymorphism, ConstantsForceIdempotency)
{
    Structure s{d2, {}, {}, true};
    auto zero = Operation::from_function("zero", 2, 1, [](std::span<const Element>) { return 0; });
    EXPECT_FALSE(is_polymorphism(zero, s));
    s.constants = false;
    EXPECT_TRUE(is_polymorphism(zero, s));
}

TEST(EnumeratePolymorphisms, UnaryIdempotentIsIdentity)
{
    auto cut = CutPair::make(3, {0, 1}, {1, 2});
    Structure s{d3, {build_rho(d3, cut)}, {}, false};
    auto ops = enumerate_polymorphisms(s, 1, true);
    ASSERT_EQ(ops.size(), 1u);
    EXPECT_EQ(ops[0].table, (std::vector<Element>{0, 1, 2}));
}

TEST(EnumeratePolymorphisms, FourIdempotentBinaryTables)
{
    Structure s{d2, {}, {}, false};
    auto ops = enumerate_polymorphisms(s, 2, true);
    EXPECT_EQ(ops.size(), 4u);
    for (auto & f : ops)
        EXPECT_TRUE(f.is_idempotent());
    // lexicographic on tables
    for (std::size_t i = 1; i < ops.size(); ++i)
        EXPECT_LT(ops[i - 1].table, ops[i].table);
}

TEST(EnumeratePolymorphisms, BudgetError)
{
    Structure s{d3, {}, {}, false};
    try {
        enumerate_polymorphisms(s, 2, false, 1000);
        FAIL() << "expected a budget error";
    }
    catch (const BudgetExceeded & e) {
        EXPECT_EQ(e.required(), 19683u);
    }
    EXPECT_EQ(enumerate_polymorphisms(s, 2, false).size(), 19683u);
}

TEST(EnumeratePolymorphisms, GaloisSanityAndComposition)
{
    auto s = Structure{d2, {disequality(), Relation::from_tuples("le", 2, 2, {{0, 0}, {0, 1}, {1, 1}})}, {}, false};
    auto binary = enumerate_polymorphisms(s, 2, false);
    auto ternary = enumerate_polymorphisms(s, 3, false);
    for (auto & f : ternary)
        for (auto & r : s.relations)
            EXPECT_TRUE(preserved_by_definition(f, r));
    // superposition g(f(x,y,z), x) stays a polymorphism
    for (auto & g : binary)
        for (auto & f : ternary) {
            auto h = Operation::from_function("h", 2, 3, [&](std::span<const Element> a) {
                return g(Tuple{f(a), a[0]});
            });
            EXPECT_TRUE(is_polymorphism(h, s));
        }
}

TEST(BuildNu, Values)
{
    auto cut = CutPair::make(3, {0, 1}, {1, 2});
    auto f = build_nu_operation(d3, cut, 4);
    EXPECT_EQ(f(Tuple{2, 2, 2, 0}), 2u);
    EXPECT_EQ(f(Tuple{0, 2, 1, 0}), 1u);
    EXPECT_TRUE(check_nu_identities(f));
    EXPECT_THROW(build_nu_operation(d2, CutPair::make(2, {0}, {1}), 4), InvalidArgument);
    EXPECT_THROW(build_nu_operation(d3, cut, 2), InvalidArgument);
}

TEST(CheckNu, MajorityAndProjection)
{
    EXPECT_TRUE(check_nu_identities(majority_algebra(2).operations[0]));
    EXPECT_FALSE(check_nu_identities(Operation::projection(2, 3, 0)));
    EXPECT_FALSE(check_nu_identities(Operation::projection(2, 2, 0)));
}

TEST(NuPigeonhole, AgreesWithFullCheck)
{
    for (auto & cut : all_cut_pairs(3)) {
        if (! cut.intersects())
            continue;
        auto f = build_nu_operation(d3, cut, 4);
        for (auto & r : {build_tau(d3, cut, 1), build_rho(d3, cut), build_sigma(d3, cut, 1)}) {
            auto quick = preserves_nu_pigeonhole(f, r);
            auto full = preserves(f, r);
            ASSERT_NE(quick.status, NuPreservationResult::Status::unresolved);
            EXPECT_EQ(quick.status == NuPreservationResult::Status::preserved, full.preserved);
        }
    }
}

TEST(NuPigeonhole, DetectsViolation)
{
    // the NU operation with fallback 1 sends (0,2,0,2)-style columns to 1,
    // which leaves the relation {(0,0),(2,2),(0,2),(2,0)}
    auto cut = CutPair::make(3, {0, 1}, {1, 2});
    auto f = build_nu_operation(d3, cut, 4);
    auto r = Relation::from_tuples("R", 3, 2, {{0, 0}, {2, 2}, {0, 2}, {2, 0}});
    auto quick = preserves_nu_pigeonhole(f, r);
    EXPECT_EQ(quick.status, NuPreservationResult::Status::violated);
    ASSERT_TRUE(quick.witness);
    EXPECT_FALSE(r.contains(quick.witness->image));
}

TEST(NuPigeonhole, ArityThirteenOnTau1)
{
    // |tau_1|^13 choices is far beyond brute force; the argument alone decides
    auto cut = CutPair::make(3, {0, 1}, {1, 2});
    auto quick = preserves_nu_pigeonhole(build_nu_operation(d3, cut, 13), build_tau(d3, cut, 1), 1000);
    EXPECT_EQ(quick.status, NuPreservationResult::Status::preserved);
    EXPECT_FALSE(quick.unresolved_image);
}
