#include "qcsplab/suites.hpp"

#include <gtest/gtest.h>

#include <atomic>

using namespace qcsplab;

TEST(ParallelFor, VisitsEveryIndexOnce)
{
    for (std::size_t jobs : {1u, 2u, 4u}) {
        std::vector<std::atomic<int>> hits(97);
        parallel_for(hits.size(), jobs, [&](std::size_t i) { ++hits[i]; });
        for (auto & h : hits)
            EXPECT_EQ(h.load(), 1);
    }
}

TEST(ParallelFor, RethrowsFailures)
{
    EXPECT_THROW(parallel_for(50, 3, [](std::size_t i) {
        if (i == 17)
            throw InvalidArgument("boom");
    }),
        InvalidArgument);
}

TEST(NaeInstances, CountMatchesFormula)
{
    std::uint64_t expected = 0;
    for (std::uint64_t v = 1; v <= 3; ++v)
        for (std::uint64_t c = 1; c <= 2; ++c)
            expected += saturating_pow(v, 3 * c);
    auto all = all_nae_instances(3, 2);
    EXPECT_EQ(all.size(), expected);
    std::set<std::string> distinct;
    for (auto & inst : all)
        distinct.insert(to_string(inst));
    EXPECT_EQ(distinct.size(), all.size());
}

TEST(Cuts, SeparatingAndIntersecting)
{
    for (auto & c : separating_cuts(3)) {
        EXPECT_FALSE(c.alpha_only().empty());
        EXPECT_FALSE(c.beta_only().empty());
    }
    for (auto & c : intersecting_cuts(3))
        EXPECT_TRUE(c.intersects());
    std::size_t sep = 0, inter = 0;
    for (auto & c : all_cut_pairs(4)) {
        sep += ! c.alpha_only().empty() && ! c.beta_only().empty();
        inter += c.intersects();
    }
    EXPECT_EQ(separating_cuts(4).size(), sep);
    EXPECT_EQ(intersecting_cuts(4).size(), inter);
}

TEST(NaeReductionSuite, NoCounterexamples)
{
    auto r = verify_theorem3({CutPair::make(3, {0, 1}, {1, 2})}, 3, 2);
    EXPECT_EQ(r["suite"], "theorem3");
    EXPECT_EQ(r["instances"], 830);
    EXPECT_EQ(r["agreements"], r["instances"]);
    EXPECT_EQ(r["counterexample_count"], 0);
    EXPECT_FALSE(r["partial"].get<bool>());
    EXPECT_THROW(verify_theorem3({CutPair::make(3, {0, 1}, {0, 1, 2})}, 1, 1), InvalidArgument);
}

TEST(TauSentenceGrammar, SentencesAreValidAndDistinct)
{
    TauSentenceGrammar g(3, 2);
    auto d = Domain::of_size(3);
    std::set<std::string> seen;
    for (std::uint64_t i = 0; i < g.size(); ++i) {
        auto phi = g.sentence(i);
        EXPECT_NO_THROW(check_sentence(phi, 3));
        seen.insert(to_string(phi, d));
    }
    EXPECT_EQ(seen.size(), g.size());
}

TEST(TauDecisionSuite, SmallSweepAgrees)
{
    auto r = verify_prop1(3, 2, intersecting_cuts(3));
    EXPECT_EQ(r["counterexample_count"], 0);
    EXPECT_EQ(r["agreements"], r["instances"]);
    for (auto rule : {"universal-constant", "clashing-constants", "drop-isolated", "substitute"})
        EXPECT_GT(r["preprocessing_rule_hits"][rule].get<int>(), 0) << rule;
}

TEST(NearUnanimitySuite, NearUnanimityPreservesTau)
{
    auto r = verify_prop2(3, 2, 7);
    EXPECT_EQ(r["counterexample_count"], 0);
    EXPECT_EQ(r["instances"].get<std::size_t>(), intersecting_cuts(3).size() * 3);
}

TEST(TauDefinabilitySuite, NoMismatches)
{
    auto r = verify_taudef(3, 2);
    EXPECT_EQ(r["counterexample_count"], 0);
    EXPECT_GT(r["tuples_compared"].get<std::uint64_t>(), 0u);
}

TEST(TauDefinabilitySuite, BudgetMarksPartial)
{
    SuiteOptions opt;
    opt.budget = 100;
    auto r = verify_taudef(3, 2, opt);
    EXPECT_TRUE(r["partial"].get<bool>());
    EXPECT_GT(r["budget_skipped"].get<int>(), 0);
    EXPECT_EQ(r["counterexample_count"], 0);
}

TEST(PowersSanitySuite, ProjectionsGenerateNothing)
{
    auto r = verify_powers_sanity(2, 3);
    EXPECT_EQ(r["counterexample_count"], 0);
    for (auto & row : r["rows"])
        EXPECT_EQ(row["f"], row["n_pow_m"]);
}

TEST(Pi2Suite, AgreesAndIsDeterministic)
{
    auto a = verify_pi2(7, 200, {"majority:2", "meet:2"}, 1);
    EXPECT_EQ(a["counterexample_count"], 0);
    EXPECT_EQ(a["random"]["instances"], 200);
    SuiteOptions opt;
    opt.jobs = 3;
    EXPECT_EQ(verify_pi2(7, 200, {"majority:2", "meet:2"}, 1, opt).dump(), a.dump());
    EXPECT_NE(verify_pi2(8, 200, {"majority:2"}, 1)["random"].dump(), a["random"].dump());
}

TEST(Suites, ReportsIndependentOfJobCount)
{
    SuiteOptions one, three;
    three.jobs = 3;
    auto cuts = separating_cuts(3);
    EXPECT_EQ(verify_theorem3(cuts, 2, 2, one).dump(), verify_theorem3(cuts, 2, 2, three).dump());
    EXPECT_EQ(verify_prop1(3, 2, intersecting_cuts(3), one).dump(), verify_prop1(3, 2, intersecting_cuts(3), three).dump());
}

TEST(RandomPi2Instance, SeededGenerationRepeats)
{
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 50; ++i) {
        auto x = random_pi2_instance(a), y = random_pi2_instance(b);
        EXPECT_EQ(to_string(x.sentence, x.structure.domain), to_string(y.sentence, y.structure.domain));
        EXPECT_TRUE(x.sentence.is_pi2());
    }
}
