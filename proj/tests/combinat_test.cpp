#include "oracles.hpp"
#include "pathrev/combinat.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace pathrev;

TEST(Gamma, Examples)
{
    EXPECT_TRUE(tournament_from_sequence({}).empty());
    EXPECT_EQ(tournament_from_sequence({2, 1, 3}).to_string(), "(1 (2 . .) (3 . .))");
    EXPECT_EQ(tournament_from_sequence({3, 1, 2, 5, 4}).to_string(), "(1 (3 . .) (2 . (4 (5 . .) .)))");
    EXPECT_THROW(tournament_from_sequence({1, 2, 1}), std::invalid_argument);
}

TEST(Gamma, PrioritiesNormalizedToRanks)
{
    EXPECT_EQ(tournament_from_sequence({20, 10, 30}), tournament_from_sequence({2, 1, 3}));
    EXPECT_EQ(ranks_of({-5, 7, 0}), (std::vector<int>{1, 3, 2}));
}

TEST(GammaInverse, Examples)
{
    EXPECT_TRUE(sequence_from_tournament(TournamentTree{}).empty());
    EXPECT_EQ(sequence_from_tournament(tournament_from_sequence({2, 1, 3})), (PrioritySequence{2, 1, 3}));
    // 2 above 1 breaks the min-at-root ordering
    EXPECT_THROW(sequence_from_tournament(TournamentTree::parse("(2 (1 . .) .)")), std::invalid_argument);
    EXPECT_THROW(sequence_from_tournament(TournamentTree::parse("(1 (3 . .) .)")), std::invalid_argument);
}

TEST(TournamentTree, TextRoundTrip)
{
    const std::string text = "(1 (3 . .) (2 . (4 (5 . .) .)))";
    EXPECT_EQ(TournamentTree::parse(text).to_string(), text);
    EXPECT_EQ(TournamentTree::parse(".").to_string(), ".");
    EXPECT_THROW(TournamentTree::parse("(1 . "), std::invalid_argument);
}

TEST(Tau, Spines)
{
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto id = Permutation::identity(n);
        const auto up = tournament_from_permutation(id);
        std::vector<int> rev(id.mapping().rbegin(), id.mapping().rend());
        const auto down = tournament_from_permutation(Permutation(rev));
        EXPECT_EQ(right_branch(up), id.mapping());
        EXPECT_EQ(left_branch(up), (PrioritySequence{1}));
        EXPECT_EQ(left_branch(down), id.mapping());
        EXPECT_EQ(right_branch(down), (PrioritySequence{1}));
    }
    EXPECT_THROW(Permutation({1, 1, 3}), std::invalid_argument);
    EXPECT_THROW(Permutation({0, 1}), std::invalid_argument);
}

TEST(Tau, DistinctOverS4)
{
    std::set<std::string> seen;
    for_each_permutation(4, [&](const std::vector<int>& p) {
        seen.insert(tournament_from_permutation(Permutation(p)).to_string());
    });
    EXPECT_EQ(seen.size(), 24u);
}

// gamma/tau images over S_n are exactly the independently enumerated
// tournament trees, and gamma^{-1} inverts gamma.
TEST(Gamma, ExhaustiveAgainstEnumeration)
{
    for (std::size_t n = 1; n <= 7; ++n) {
        std::vector<int> labels(n);
        std::iota(labels.begin(), labels.end(), 1);
        const auto all = oracle::tournaments_on(labels);
        const std::set<std::string> expected(all.begin(), all.end());
        ASSERT_EQ(all.size(), expected.size());

        std::set<std::string> image;
        std::size_t cases = 0;
        for_each_permutation(n, [&](const std::vector<int>& p) {
            const auto t = tournament_from_sequence(p);
            ASSERT_TRUE(t.valid());
            ASSERT_EQ(sequence_from_tournament(t), p);
            ASSERT_EQ(tournament_from_permutation(Permutation(p)), t);
            const auto rb = right_branch(t);
            ASSERT_TRUE(std::is_sorted(rb.begin(), rb.end()));
            ASSERT_EQ(std::adjacent_find(rb.begin(), rb.end()), rb.end());
            image.insert(t.to_string());
            ++cases;
        });
        EXPECT_EQ(image, expected) << "n = " << n;
        std::size_t fact = 1;
        for (std::size_t i = 2; i <= n; ++i) {
            fact *= i;
        }
        EXPECT_EQ(cases, fact);
        EXPECT_EQ(image.size(), fact);
    }
}

TEST(Alpha, Examples)
{
    EXPECT_TRUE(ordered_tree_from_sequence({}).empty());
    EXPECT_TRUE(sequence_from_ordered_tree(OrderedTree{}).empty());
    const auto one = ordered_tree_from_sequence({42});
    EXPECT_EQ(one.size(), 1u);
    EXPECT_TRUE(one.children(one.root()).empty());
    EXPECT_EQ(sequence_from_ordered_tree(ordered_tree_from_sequence({1, 2, 3})), (PrioritySequence{1, 2, 3}));
    EXPECT_THROW(ordered_tree_from_sequence({2, 2}), std::invalid_argument);
}

TEST(Beta, RejectsChain)
{
    // 0 -> 1 -> 2 -> 3 as a single-child chain
    const OrderedTree chain(0, {{1}, {2}, {3}, {}});
    EXPECT_THROW(sequence_from_ordered_tree(chain), std::invalid_argument);
}

TEST(AlphaBeta, ExhaustiveRoundTrip)
{
    for (std::size_t n = 1; n <= 7; ++n) {
        std::set<std::vector<std::vector<NodeId>>> shapes;
        std::size_t cases = 0;
        for_each_permutation(n, [&](const std::vector<int>& p) {
            const auto t = ordered_tree_from_sequence(p);
            ASSERT_EQ(t.size(), n);
            ASSERT_TRUE(t.tree().valid());
            ASSERT_EQ(sequence_from_ordered_tree(t), p);
            std::vector<std::vector<NodeId>> key;
            for (NodeId v = 0; v < n; ++v) {
                key.push_back(t.children(v));
            }
            key.push_back({t.root()});
            shapes.insert(key);
            ++cases;
        });
        EXPECT_EQ(shapes.size(), cases) << "alpha not injective at n = " << n;
    }
}

TEST(LeftBranch, MeanIsHarmonic)
{
    Rational total(0);
    std::size_t count = 0;
    for_each_permutation(3, [&](const std::vector<int>& p) {
        total += static_cast<unsigned long>(left_branch(tournament_from_sequence(p)).size());
        ++count;
    });
    EXPECT_EQ(Rational(total / static_cast<unsigned long>(count)), make_rational(11, 6));

    for (std::size_t m = 1; m <= 7; ++m) {
        Rational sum(0);
        std::size_t c = 0;
        for_each_permutation(m, [&](const std::vector<int>& p) {
            sum += static_cast<unsigned long>(left_branch(tournament_from_sequence(p)).size());
            ++c;
        });
        EXPECT_EQ(Rational(sum / static_cast<unsigned long>(c)), harmonic(m).h) << "m = " << m;
    }
}
