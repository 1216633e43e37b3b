#include "qcsplab/dnf.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace qcsplab;

namespace {

const Domain abc = Domain({"a0", "a1", "a2"});
const Domain d3 = Domain::of_size(3);

// Membership in alpha^k ∪ beta^k written out directly.
bool in_cube_union(const Tuple & t, const std::set<Element> & alpha, const std::set<Element> & beta)
{
    auto all_in = [&](const std::set<Element> & s) {
        for (auto e : t)
            if (! s.count(e))
                return false;
        return true;
    };
    return all_in(alpha) || all_in(beta);
}

} // namespace

TEST(ParseDnf, TwoDisjuncts)
{
    auto f = parse_dnf("x0=x1 & x0=a1 | x2=a2", 3, abc);
    ASSERT_EQ(f.disjuncts.size(), 2u);
    EXPECT_EQ(f.disjuncts[0], (DnfConjunct{DnfAtom::eq_var(0, 1), DnfAtom::eq_const(0, 1)}));
    EXPECT_EQ(f.disjuncts[1], (DnfConjunct{DnfAtom::eq_const(2, 2)}));
    EXPECT_EQ(f.size(), 3u);
}

TEST(ParseDnf, IndexOutOfRange)
{
    EXPECT_THROW(parse_dnf("x0=x1", 1, abc), ParseError);
}

TEST(ParseDnf, NegatedAtomsRejected)
{
    try {
        parse_dnf("x0!=x1 & x0=a1", 2, abc);
        FAIL() << "expected a parse error";
    }
    catch (const ParseError & e) {
        EXPECT_NE(std::string(e.what()).find("negated"), std::string::npos);
        EXPECT_EQ(e.position(), 2u);
    }
}

TEST(ParseDnf, UnknownConstantAndSyntax)
{
    EXPECT_THROW(parse_dnf("x0=zz", 1, abc), ParseError);
    EXPECT_THROW(parse_dnf("x0=", 1, abc), ParseError);
    EXPECT_THROW(parse_dnf("x0=a1 |", 1, abc), ParseError);
    EXPECT_THROW(parse_dnf("y0=a1", 1, abc), ParseError);
    EXPECT_THROW(parse_dnf("", 1, abc), ParseError);
}

TEST(ParseDnf, PrintParseFixpoint)
{
    for (auto text : {"x0=x1 & x0=a1 | x2=a2", "  x1 = a0|x0=x2&x2=x1 ", "x0=x0"}) {
        auto once = to_string(parse_dnf(text, 3, abc), abc);
        auto twice = to_string(parse_dnf(once, 3, abc), abc);
        EXPECT_EQ(once, twice);
        EXPECT_EQ(parse_dnf(once, 3, abc), parse_dnf(text, 3, abc));
    }
}

TEST(EvalDnf, Basics)
{
    auto f = parse_dnf("x0=x1", 2, d3);
    EXPECT_TRUE(eval_dnf(f, Tuple{1, 1}));
    EXPECT_FALSE(eval_dnf(f, Tuple{0, 1}));
    EXPECT_THROW(eval_dnf(f, Tuple{0}), InvalidArgument);
}

TEST(EvalDnf, RhoPrimeFormula)
{
    std::string text;
    for (Element a : {0, 1})
        for (Element b : {0, 1})
            for (Element c : {0, 1})
                text += (text.empty() ? "" : " | ") + ("x0=" + std::to_string(a) + " & x1=" + std::to_string(b) + " & x2=" + std::to_string(c));
    for (Element a : {1, 2})
        for (Element b : {1, 2})
            for (Element c : {1, 2})
                text += " | x0=" + std::to_string(a) + " & x1=" + std::to_string(b) + " & x2=" + std::to_string(c);
    auto f = parse_dnf(text, 3, d3);
    EXPECT_EQ(f.disjuncts.size(), 16u);
    EXPECT_TRUE(eval_dnf(f, Tuple{0, 0, 1}));
    auto ext = dnf_to_extension(f, 3);
    EXPECT_EQ(ext.size(), 15u);
    for (auto & t : all_tuples(3, 3))
        EXPECT_EQ(ext.contains(t), in_cube_union(t, {0, 1}, {1, 2}));
}

TEST(DnfToExtension, Tautology)
{
    auto ext = dnf_to_extension(parse_dnf("x0=x0", 1, d3), 3);
    EXPECT_EQ(ext.tuples(), (std::vector<Tuple>{{0}, {1}, {2}}));
}

TEST(DnfToExtension, RhoHasSevenTuples)
{
    auto f = parse_dnf("x0=0&x1=0 | x0=0&x1=1 | x0=1&x1=0 | x0=1&x1=1 | x0=1&x1=1 | x0=1&x1=2 | x0=2&x1=1 | x0=2&x1=2", 2, d3);
    EXPECT_EQ(dnf_to_extension(f, 3).size(), 7u);
}

TEST(ExtensionToDnf, SingletonAndEmpty)
{
    TupleSet s(3, 2);
    s.insert(Tuple{0, 1});
    auto f = extension_to_dnf(s);
    EXPECT_EQ(to_string(f, d3), "x0=0 & x1=1");
    EXPECT_THROW(extension_to_dnf(TupleSet(3, 2)), InvalidArgument);
}

TEST(ExtensionToDnf, RoundTripRandomRelations)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 4, arity = 1 + rng() % 4;
        TupleSet s(n, arity);
        for (auto & t : all_tuples(n, arity))
            if (rng() % 3 == 0)
                s.insert(t);
        if (s.empty())
            s.insert(Tuple(arity, 0));
        auto f = extension_to_dnf(s);
        EXPECT_EQ(f.disjuncts.size(), s.size());
        EXPECT_EQ(dnf_to_extension(f, n), s);
    }
}

TEST(Dnf, EvalAgreesWithExtensionAndDisjunctsAreMonotone)
{
    std::mt19937_64 rng(11);
    auto d = Domain::of_size(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t arity = 1 + rng() % 3;
        DnfFormula f{arity, {}};
        std::size_t previous = 0;
        for (int k = 0; k < 4; ++k) {
            DnfConjunct conj;
            for (std::size_t a = rng() % 3; a > 0; --a) {
                if (rng() % 2)
                    conj.push_back(DnfAtom::eq_var(rng() % arity, rng() % arity));
                else
                    conj.push_back(DnfAtom::eq_const(rng() % arity, static_cast<Element>(rng() % 3)));
            }
            f.disjuncts.push_back(conj);
            auto ext = dnf_to_extension(f, 3);
            EXPECT_GE(ext.size(), previous);
            previous = ext.size();
            for (auto & t : all_tuples(3, arity))
                EXPECT_EQ(eval_dnf(f, t), ext.contains(t));
        }
    }
}

TEST(CheckDnf, RejectsBadIndices)
{
    EXPECT_THROW(check_dnf(DnfFormula{2, {{DnfAtom::eq_var(0, 2)}}}, 3), InvalidArgument);
    EXPECT_THROW(check_dnf(DnfFormula{2, {{DnfAtom::eq_const(0, 3)}}}, 3), InvalidArgument);
    EXPECT_THROW(check_dnf(DnfFormula{2, {}}, 3), InvalidArgument);
}
