#include "pathrev/tree_core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pathrev;

TEST(Star, Shapes)
{
    EXPECT_THROW(star(0), std::invalid_argument);

    const auto t1 = star(1);
    EXPECT_EQ(t1.size(), 1u);
    EXPECT_EQ(t1.root(), 0u);
    EXPECT_FALSE(t1.parent(0));

    const auto t4 = star(4);
    for (NodeId v = 1; v < 4; ++v) {
        EXPECT_EQ(t4.parent(v), std::optional<NodeId>(0));
    }
    EXPECT_EQ(star(2).height_of(1), 2u);
}

TEST(PathReversal, StarExamples)
{
    auto t = star(4);
    EXPECT_EQ(path_reversal(t, 0), 0u);
    EXPECT_EQ(t, star(4));

    EXPECT_EQ(path_reversal(t, 1), 1u);
    EXPECT_EQ(t.root(), 1u);
    EXPECT_EQ(t.parent(0), std::optional<NodeId>(1));
    EXPECT_EQ(t.parent(2), std::optional<NodeId>(0));
    EXPECT_EQ(t.parent(3), std::optional<NodeId>(0));
}

TEST(PathReversal, ThreeNodeChain)
{
    auto t = star(3);
    path_reversal(t, 1);
    EXPECT_EQ(height_of(t, 2), 3u); // 2 -> 0 -> 1
    EXPECT_EQ(path_reversal(t, 2), 2u);
    EXPECT_EQ(t.root(), 2u);
    EXPECT_EQ(t.parent(0), std::optional<NodeId>(2));
    EXPECT_EQ(t.parent(1), std::optional<NodeId>(2));
}

TEST(Height, Examples)
{
    const auto t = star(4);
    EXPECT_EQ(height_of(t, 0), 1u);
    EXPECT_EQ(height_of(t, 3), 2u);
    EXPECT_THROW(height_of(t, 4), std::out_of_range);
}

TEST(PathReversal, UnknownNode)
{
    auto t = star(3);
    EXPECT_THROW(path_reversal(t, 3), std::out_of_range);
}

TEST(RootedTree, RejectsBadParents)
{
    using P = std::vector<std::optional<NodeId>>;
    EXPECT_THROW(RootedTree(P{}), std::invalid_argument);
    EXPECT_THROW(RootedTree(P{std::nullopt, std::nullopt}), std::invalid_argument);
    EXPECT_THROW(RootedTree(P{1, 0}), std::invalid_argument);
    EXPECT_THROW(RootedTree(P{std::nullopt, 2, 1}), std::invalid_argument);
    EXPECT_THROW(RootedTree(P{std::nullopt, 5}), std::invalid_argument);
}

TEST(RootedTree, TextRoundTrip)
{
    EXPECT_EQ(star(3).to_string(), "3;-,0,0");
    auto t = star(5);
    path_reversal(t, 3);
    path_reversal(t, 1);
    EXPECT_EQ(RootedTree::parse(t.to_string()), t);
    EXPECT_THROW(RootedTree::parse("3;-,0"), std::invalid_argument);
    EXPECT_THROW(RootedTree::parse("2;1,0"), std::invalid_argument);
}

// Random reversal sequences: cost is height - 1, the tree stays valid,
// a repeat costs 0, and every node on the old path ends at height 2.
TEST(PathReversal, RandomSequenceProperties)
{
    std::mt19937_64 rng(7);
    for (std::size_t n : {1u, 2u, 5u, 17u, 64u}) {
        auto t = star(n);
        std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
        for (int step = 0; step < 2000; ++step) {
            const NodeId x = pick(rng);
            std::vector<NodeId> path;
            for (auto y = t.parent(x); y; y = t.parent(*y)) {
                path.push_back(*y);
            }
            const auto h = t.height_of(x);
            const auto cost = t.path_reversal(x);
            ASSERT_EQ(cost, h - 1);
            ASSERT_EQ(cost, path.size());
            ASSERT_TRUE(t.valid());
            ASSERT_EQ(t.size(), n);
            ASSERT_EQ(t.root(), x);
            for (NodeId y : path) {
                ASSERT_EQ(t.height_of(y), 2u);
            }
            ASSERT_EQ(t.path_reversal(x), 0u);
        }
    }
}
