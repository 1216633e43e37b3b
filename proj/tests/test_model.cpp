#include "qcsplab/model.hpp"
#include "qcsplab/sentence.hpp"

#include <gtest/gtest.h>

using namespace qcsplab;

namespace {

Operation meet2() { return Operation::from_function("meet", 2, 2, [](std::span<const Element> a) { return std::min(a[0], a[1]); }); }

Operation majority2()
{
    return Operation::from_function("maj", 2, 3, [](std::span<const Element> a) { return (a[0] + a[1] + a[2]) >= 2 ? 1 : 0; });
}

Structure small_structure()
{
    auto d = Domain::of_size(3);
    Structure s{d, {}, {}, false};
    s.relations.push_back(Relation::from_tuples("R", 3, 2, {{0, 1}, {1, 2}}));
    s.relations.push_back(Relation::from_dnf("E", 3, parse_dnf("x0=x1", 2, d)));
    s.relations.push_back(Relation::from_tuples("U", 3, 1, {{2}}));
    return s;
}

} // namespace

TEST(ApplyOperation, MeetComponentwise)
{
    std::vector<Tuple> args{{0, 1}, {1, 1}};
    EXPECT_EQ(apply_operation(meet2(), args), (Tuple{0, 1}));
}

TEST(ApplyOperation, IdempotentOnDiagonal)
{
    auto f = majority2();
    for (auto & t : all_tuples(2, 3)) {
        std::vector<Tuple> args(3, t);
        EXPECT_EQ(apply_operation(f, args), t);
    }
}

TEST(ApplyOperation, Majority)
{
    std::vector<Tuple> args{{0, 1}, {0, 1}, {1, 0}};
    EXPECT_EQ(apply_operation(majority2(), args), (Tuple{0, 1}));
}

TEST(ApplyOperation, CommutesWithProjection)
{
    auto f = majority2();
    for (auto & a : all_tuples(2, 2))
        for (auto & b : all_tuples(2, 2))
            for (auto & c : all_tuples(2, 2)) {
                std::vector<Tuple> args{a, b, c};
                auto image = apply_operation(f, args);
                for (std::size_t i = 0; i < 2; ++i)
                    EXPECT_EQ(image[i], f(Tuple{a[i], b[i], c[i]}));
            }
}

TEST(ApplyOperation, Errors)
{
    std::vector<Tuple> two{{0, 1}, {1}};
    EXPECT_THROW(apply_operation(meet2(), two), InvalidArgument);
    std::vector<Tuple> one{{0}};
    EXPECT_THROW(apply_operation(meet2(), one), InvalidArgument);
}

TEST(Operation, TableOrderAndIdempotency)
{
    auto f = meet2();
    EXPECT_EQ(f.table, (std::vector<Element>{0, 0, 0, 1}));
    EXPECT_TRUE(f.is_idempotent());
    EXPECT_TRUE(f.is_well_formed());
    auto zero = Operation::from_function("zero", 2, 1, [](std::span<const Element>) { return 0; });
    EXPECT_FALSE(zero.is_idempotent());
}

TEST(ValidateStructure, WellFormed)
{
    EXPECT_TRUE(validate_structure(small_structure()).empty());
}

TEST(ValidateStructure, ArityMismatch)
{
    auto s = small_structure();
    s.relations.push_back(Relation{"Bad", 3, TupleSet(3, 2), std::nullopt});
    s.relations.back().extension->insert(Tuple{0, 1});
    auto v = validate_structure(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("arity mismatch"), std::string::npos);
}

TEST(ValidateStructure, DnfMismatch)
{
    auto s = small_structure();
    auto r = Relation::from_dnf("D", 3, parse_dnf("x0=0", 1, s.domain));
    r.extension->insert(Tuple{1});
    s.relations.push_back(r);
    auto v = validate_structure(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("dnf mismatch"), std::string::npos);
}

TEST(ValidateStructure, ReservedAndDuplicateNames)
{
    auto s = small_structure();
    s.relations.push_back(Relation::from_tuples("eq", 3, 2, {{0, 0}}));
    s.relations.push_back(Relation::from_tuples("R", 3, 2, {{0, 0}}));
    EXPECT_EQ(validate_structure(s).size(), 2u);
}

TEST(StructureReduct, IdentityEmptyAndProjection)
{
    auto s = small_structure();
    EXPECT_EQ(structure_reduct(s, {"R", "E", "U"}), s);
    auto empty = structure_reduct(s, {});
    EXPECT_TRUE(empty.relations.empty());
    EXPECT_EQ(empty.domain, s.domain);
    auto one = structure_reduct(s, {"R"});
    ASSERT_EQ(one.relations.size(), 1u);
    EXPECT_EQ(one.relations[0].name, "R");
    EXPECT_THROW(structure_reduct(s, {"nope"}), InvalidArgument);
}

TEST(StructureReduct, IdempotentAndMonotone)
{
    auto s = small_structure();
    std::set<std::string> n{"R", "E"}, m{"E"};
    EXPECT_EQ(structure_reduct(structure_reduct(s, n), m), structure_reduct(s, m));
    EXPECT_EQ(structure_reduct(structure_reduct(s, n), n), structure_reduct(s, n));
}

TEST(CutPair, ValidationAndAccessors)
{
    auto d = Domain::of_size(3);
    auto c = parse_cut("0,1:1,2", d);
    EXPECT_EQ(c.alpha(), (std::vector<Element>{0, 1}));
    EXPECT_EQ(c.beta(), (std::vector<Element>{1, 2}));
    EXPECT_TRUE(c.intersects());
    EXPECT_EQ(c.least_common(), Element{1});
    EXPECT_EQ(c.alpha_only(), (std::vector<Element>{0}));
    EXPECT_EQ(to_string(c, d), "0,1:1,2");
    EXPECT_THROW(parse_cut("0,1,2:1", d), InvalidArgument);
    EXPECT_THROW(parse_cut("0:1", d), InvalidArgument);
    EXPECT_THROW(parse_cut(":1,2", d), ParseError);
    EXPECT_THROW(parse_cut("0,1", d), ParseError);
    EXPECT_FALSE(parse_cut("0:1,2", d).intersects());
}

TEST(CutPair, AllCutPairsCount)
{
    // ordered pairs of strict nonempty subsets covering A, counted directly
    for (std::size_t n = 2; n <= 4; ++n) {
        std::size_t expected = 0;
        std::uint64_t full = (1u << n) - 1;
        for (std::uint64_t a = 1; a < full; ++a)
            for (std::uint64_t b = 1; b < full; ++b)
                expected += (a | b) == full;
        EXPECT_EQ(all_cut_pairs(n).size(), expected);
    }
    EXPECT_EQ(all_cut_pairs(2).size(), 2u);
}

TEST(Sentence, ParseAndPrint)
{
    auto d = Domain::of_size(3);
    auto s = parse_sentence("A x1 E y1 : tau_1(x1,x1,y1) & eq(y1,1)", d);
    ASSERT_EQ(s.prefix.size(), 2u);
    EXPECT_EQ(s.prefix[0].quantifier, Quantifier::forall);
    EXPECT_EQ(s.body[1].args[1], Term::constant(1));
    EXPECT_TRUE(s.body[1].is_equality());
    EXPECT_TRUE(s.is_pi2());
    EXPECT_EQ(s.leading_universals(), 1u);
    EXPECT_EQ(to_string(s, d), "A x1 E y1 : tau_1(x1,x1,y1) & eq(y1,1)");
    EXPECT_EQ(parse_sentence(to_string(s, d), d), s);
}

TEST(Sentence, CommentsAndEmptyBody)
{
    auto d = Domain::of_size(2);
    auto s = parse_sentence("# header\nA x E y :\n", d);
    EXPECT_TRUE(s.body.empty());
    EXPECT_FALSE(s.is_universal_only());
    EXPECT_EQ(to_string(s, d), "A x E y :");
}

TEST(Sentence, Errors)
{
    auto d = Domain::of_size(3);
    EXPECT_THROW(parse_sentence("A x : R(y)", d), ParseError);
    EXPECT_THROW(parse_sentence("A x A x : R(x)", d), ParseError);
    EXPECT_THROW(parse_sentence("A 1 : R(1)", d), ParseError);
    EXPECT_THROW(parse_sentence("Q x : R(x)", d), ParseError);
    EXPECT_THROW(parse_sentence("A x R(x)", d), ParseError);
    EXPECT_THROW(parse_sentence("A x : R(x", d), ParseError);
    EXPECT_THROW(parse_sentence("A x : R(x) R(x)", d), ParseError);
}
