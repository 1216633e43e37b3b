#include "qcsplab/domain.hpp"

#include <gtest/gtest.h>

using namespace qcsplab;

TEST(Domain, NamesAndIndices)
{
    Domain d({"a", "b", "c"});
    EXPECT_EQ(d.size(), 3u);
    EXPECT_EQ(d.index("b"), 1u);
    EXPECT_EQ(d.name(2), "c");
    EXPECT_FALSE(d.find("z"));
    EXPECT_THROW(d.index("z"), InvalidArgument);
}

TEST(Domain, RejectsEmptyAndDuplicates)
{
    EXPECT_THROW(Domain(std::vector<std::string>{}), InvalidArgument);
    EXPECT_THROW(Domain({"a", "a"}), InvalidArgument);
    EXPECT_THROW(Domain({"a", ""}), InvalidArgument);
}

TEST(Domain, OfSizeUsesDecimalNames)
{
    auto d = Domain::of_size(4);
    EXPECT_EQ(d.names(), (std::vector<std::string>{"0", "1", "2", "3"}));
}

TEST(TupleCode, OrderMatchesLexicographicOrder)
{
    auto all = all_tuples(3, 3);
    ASSERT_EQ(all.size(), 27u);
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(tuple_code(all[i], 3), i);
        EXPECT_EQ(decode_tuple(i, 3, 3), all[i]);
        if (i) {
            EXPECT_LT(all[i - 1], all[i]);
        }
    }
}

TEST(TupleCode, EmptyLengthHasOneTuple)
{
    EXPECT_EQ(all_tuples(3, 0).size(), 1u);
}

TEST(SaturatingPow, Saturates)
{
    EXPECT_EQ(saturating_pow(3, 4), 81u);
    EXPECT_EQ(saturating_pow(7, 0), 1u);
    EXPECT_EQ(saturating_pow(10, 40), std::numeric_limits<std::uint64_t>::max());
}

TEST(TupleSet, InsertContainsIterate)
{
    TupleSet s(3, 2);
    EXPECT_TRUE(s.empty());
    EXPECT_TRUE(s.insert(Tuple{2, 1}));
    EXPECT_FALSE(s.insert(Tuple{2, 1}));
    EXPECT_TRUE(s.insert(Tuple{0, 2}));
    EXPECT_EQ(s.size(), 2u);
    EXPECT_TRUE(s.contains(Tuple{2, 1}));
    EXPECT_FALSE(s.contains(Tuple{1, 2}));
    EXPECT_FALSE(s.contains(Tuple{2}));
    EXPECT_FALSE(s.contains(Tuple{3, 0}));
    EXPECT_EQ(s.tuples(), (std::vector<Tuple>{{0, 2}, {2, 1}}));
}

TEST(TupleSet, TooLargeIsBudgetError)
{
    EXPECT_THROW(TupleSet(4, 20), BudgetExceeded);
}
