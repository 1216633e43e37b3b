#include "qcsplab/canonical.hpp"
#include "qcsplab/gadgets.hpp"
#include "qcsplab/solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qcsplab;

namespace {

const Domain d2 = Domain::of_size(2);

Structure unary_zero() { return {d2, {Relation::from_tuples("R", 2, 1, {{0}})}, {}, false}; }

// All existential assignments that satisfy the body once the universals are fixed,
// by plain enumeration with early exit.
std::set<Tuple> brute_witnesses(const PHSentence & phi, const Structure & s, const Tuple & universal)
{
    auto u = universal.size();
    auto e = phi.prefix.size() - u;
    std::set<Tuple> out;
    Tuple values = universal;
    values.resize(u + e, 0);
    Tuple rest(e, 0);
    do {
        std::copy(rest.begin(), rest.end(), values.begin() + static_cast<std::ptrdiff_t>(u));
        bool ok = true;
        for (auto & a : phi.body) {
            Tuple t;
            for (auto & arg : a.args)
                t.push_back(arg.is_var() ? values[arg.index] : static_cast<Element>(arg.index));
            if (! s.find(a.relation)->contains(t)) {
                ok = false;
                break;
            }
        }
        if (ok)
            out.insert(rest);
    } while (next_tuple(rest, s.domain.size()));
    return out;
}

} // namespace

TEST(ConsistentMaps, FullAdversaryAdmitsEveryMap)
{
    EXPECT_EQ(consistent_maps(2, all_tuples(2, 1), 1).size(), 4u);
    EXPECT_EQ(consistent_maps(3, all_tuples(3, 2), 2).size(), 729u);
}

TEST(ConsistentMaps, MatchesDefinition)
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Tuple> adv;
        for (auto & t : all_tuples(2, 2))
            if (rng() % 2)
                adv.push_back(t);
        if (adv.empty())
            continue;
        std::set<Tuple> allowed(adv.begin(), adv.end());
        std::vector<Tuple> expected;
        for (auto & mu : all_tuples(2, 4)) {
            // every choice of row per column
            bool ok = true;
            for (auto & rows : all_tuples(2, 2))
                if (! allowed.count(Tuple{mu[rows[0] * 2 + 0], mu[rows[1] * 2 + 1]}))
                    ok = false;
            if (ok)
                expected.push_back(mu);
        }
        EXPECT_EQ(consistent_maps(2, adv, 2), expected);
    }
}

TEST(CanonicalSentence, WorkedExampleShape)
{
    auto c = build_canonical_sentence(unary_zero(), full_adversary(2, 1));
    EXPECT_EQ(c.maps.size(), 4u);
    EXPECT_EQ(c.product_size, 16u);
    EXPECT_EQ(c.sentence.count(Quantifier::forall), 2u);
    EXPECT_EQ(c.sentence.count(Quantifier::exists), 14u);
    EXPECT_EQ(c.sentence.leading_universals(), 2u);
    EXPECT_EQ(c.sentence.prefix[0].name, "w1_1");
    EXPECT_EQ(c.sentence.prefix[1].name, "w2_1");
    EXPECT_EQ(c.sentence.prefix[2].name, "e0");
    ASSERT_EQ(c.sentence.body.size(), 1u);
    // the only product tuple of R is the all-zero element
    EXPECT_EQ(c.element_of_variable[c.sentence.body[0].args[0].index], 0u);
    EXPECT_EQ(c.element_of_variable[0], tuple_code(Tuple{0, 0, 1, 1}, 2));
    EXPECT_EQ(c.element_of_variable[1], tuple_code(Tuple{0, 1, 0, 1}, 2));
    EXPECT_TRUE(evaluate_qcsp(c.sentence, unary_zero()).verdict);
}

TEST(CanonicalSentence, UniversalCountIsNTimesM)
{
    auto d3 = Domain::of_size(3);
    Structure s3{d3, {Relation::from_tuples("R", 3, 1, {{1}})}, {}, false};
    auto c = build_canonical_sentence(s3, AdversarySet{1, {{{0}, {1}}}});
    EXPECT_EQ(c.sentence.count(Quantifier::forall), 3u);
    EXPECT_EQ(c.sentence.count(Quantifier::exists), c.product_size - 3);
    Structure s2{d2, {Relation::from_tuples("R", 2, 1, {{1}})}, {}, false};
    for (std::size_t m = 1; m <= 2; ++m) {
        auto c2 = build_canonical_sentence(s2, switch_adversary(2, m, 1), 1u << 22);
        EXPECT_EQ(c2.sentence.count(Quantifier::forall), 2 * m);
        EXPECT_EQ(c2.sentence.count(Quantifier::exists), c2.product_size - 2 * m);
    }
}

TEST(CanonicalSentence, DegenerateAdversaryRejected)
{
    try {
        build_canonical_sentence(unary_zero(), AdversarySet{1, {{{0}}}});
        FAIL() << "expected a degenerate adversary error";
    }
    catch (const InvalidArgument & e) {
        EXPECT_NE(std::string(e.what()).find("constants are not pairwise distinct"), std::string::npos);
    }
    EXPECT_THROW(build_canonical_sentence(unary_zero(), AdversarySet{1, {{}}}), InvalidArgument);
    EXPECT_THROW(build_canonical_sentence(unary_zero(), AdversarySet{2, {{{0}}}}), InvalidArgument);
    EXPECT_THROW(build_canonical_sentence(unary_zero(), AdversarySet{1, {{{5}}}}), InvalidArgument);
}

TEST(CanonicalSentence, Budget)
{
    EXPECT_THROW(build_canonical_sentence(unary_zero(), full_adversary(2, 2), 1000), BudgetExceeded);
}

TEST(CanonicalSentence, ReductCoherence)
{
    Structure s{d2, {Relation::from_tuples("R", 2, 1, {{0}}), Relation::from_tuples("S", 2, 2, {{0, 1}, {1, 0}, {1, 1}})}, {}, false};
    auto omega = full_adversary(2, 1);
    auto full = build_canonical_sentence(s, omega);
    for (std::string keep : {"R", "S"}) {
        auto reduct = build_canonical_sentence(structure_reduct(s, {keep}), omega);
        EXPECT_EQ(reduct.sentence.prefix, full.sentence.prefix);
        std::vector<Atom> kept;
        for (auto & a : full.sentence.body)
            if (a.relation == keep)
                kept.push_back(a);
        EXPECT_EQ(reduct.sentence.body, kept);
    }
}

TEST(Compactness, ConstantFamilyIsStable)
{
    Structure s{d2, {Relation::from_tuples("S", 2, 2, {{0, 1}, {1, 0}, {1, 1}})}, {}, false};
    auto report = compactness_probe({s, s, s}, full_adversary(2, 1), 1u << 15);
    ASSERT_EQ(report.rows.size(), 3u);
    EXPECT_FALSE(report.capped);
    for (auto & row : report.rows)
        EXPECT_EQ(row.verdict, report.rows[0].verdict);
    auto phi = build_canonical_sentence(s, full_adversary(2, 1)).sentence;
    for (auto & w : report.witnesses) {
        EXPECT_EQ(w.common, brute_witnesses(phi, s, w.universal).size());
        EXPECT_GT(w.common, 0u);
    }
}

TEST(Compactness, VerdictsNeverRecover)
{
    // three-tuple adversaries of length 2 over {0,1}: 7 consistent maps each
    std::mt19937_64 rng(31);
    std::size_t falses = 0;
    auto pairs = all_tuples(2, 2);
    for (int trial = 0; trial < 12; ++trial) {
        auto adv = pairs;
        adv.erase(adv.begin() + static_cast<std::ptrdiff_t>(trial % 4));
        AdversarySet omega{2, {adv}};
        std::vector<Structure> chain;
        Structure s{d2, {}, {}, false};
        for (int r = 0; r < 3; ++r) {
            std::vector<Tuple> rows;
            for (auto & t : pairs)
                if (rng() % 2)
                    rows.push_back(t);
            if (rows.empty())
                rows.push_back({1, 1});
            s.relations.push_back(Relation::from_tuples("R" + std::to_string(r), 2, 2, rows));
            chain.push_back(s);
        }
        auto report = compactness_probe(chain, omega, 1);
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            if (report.rows[i].verdict)
                continue;
            ++falses;
            for (auto j = i; j < report.rows.size(); ++j)
                EXPECT_FALSE(report.rows[j].verdict);
        }
        EXPECT_TRUE(report.monotone);
    }
    EXPECT_GT(falses, 0u);
}

TEST(Compactness, SigmaFamilyWitnessTable)
{
    auto cut = CutPair::make(2, {0}, {1});
    Structure s{d2, {}, {{"sig", FamilySpec::Kind::sigma, cut}}, false};
    auto omega = full_adversary(2, 1);
    auto report = reduct_compactness_probe(s, "sig", omega, 2, 1u << 15);
    EXPECT_EQ(report.universals, 2u);
    EXPECT_EQ(report.existentials, 14u);
    EXPECT_FALSE(report.capped);
    ASSERT_EQ(report.witnesses.size(), 4u);
    std::vector<Structure> chain{family_truncation(s, s.families[0], 1), family_truncation(s, s.families[0], 2)};
    for (auto & w : report.witnesses) {
        std::set<Tuple> common;
        for (std::size_t k = 0; k < chain.size(); ++k) {
            auto found = brute_witnesses(build_canonical_sentence(chain[k], omega).sentence, chain[k], w.universal);
            if (k == 0)
                common = found;
            else {
                std::set<Tuple> keep;
                std::set_intersection(common.begin(), common.end(), found.begin(), found.end(), std::inserter(keep, keep.end()));
                common = keep;
            }
        }
        EXPECT_EQ(w.common, common.size());
        if (w.example) {
            EXPECT_TRUE(common.count(*w.example));
        }
    }
}

TEST(Compactness, TinyTauFamily)
{
    auto cut = CutPair::make(2, {0}, {1});
    Structure s{d2, {}, {{"tau", FamilySpec::Kind::tau, cut}}, false};
    auto report = reduct_compactness_probe(s, "tau", full_adversary(2, 1), 2);
    ASSERT_EQ(report.rows.size(), 2u);
    EXPECT_EQ(report.rows[0].atoms, 16u);
    EXPECT_EQ(report.rows[1].atoms, 16u + 28u * 28u * 28u * 28u);
    EXPECT_TRUE(report.monotone);
    EXPECT_THROW(reduct_compactness_probe(s, "nope", full_adversary(2, 1), 2), InvalidArgument);
}
