#include "pathrev/graph.hpp"

#include <gtest/gtest.h>

using namespace pathrev;

TEST(Graph, Basics)
{
    const Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {1, 0}});
    EXPECT_EQ(g.edge_count(), 3u);
    EXPECT_TRUE(g.connected());
    EXPECT_EQ(g.diameter(), 3u);
    EXPECT_EQ(g.distance(0, 3), 3u);
    EXPECT_EQ(g.shortest_path(3, 0), (std::vector<NodeId>{3, 2, 1, 0}));
    EXPECT_THROW(Graph(2, {{0, 0}}), std::invalid_argument);
    EXPECT_THROW(Graph(2, {{0, 2}}), std::invalid_argument);

    const Graph split(4, {{0, 1}, {2, 3}});
    EXPECT_FALSE(split.connected());
    EXPECT_THROW(split.shortest_path(0, 3), std::invalid_argument);
}

TEST(Topology, Complete)
{
    const auto g = generate_topology(TopologySpec::complete(5), 1);
    EXPECT_EQ(g.diameter(), 1u);
    EXPECT_EQ(g.edge_count(), 10u);
}

TEST(Topology, CycleAsTwoRegular)
{
    const auto g = generate_topology(TopologySpec::regular(6, 2), 4);
    EXPECT_EQ(g.diameter(), 3u);
    for (NodeId v = 0; v < 6; ++v) {
        EXPECT_EQ(g.neighbors(v).size(), 2u);
    }
}

TEST(Topology, SparseDeterministic)
{
    const auto a = generate_topology(TopologySpec::sparse(64, 96), 2024);
    const auto b = generate_topology(TopologySpec::sparse(64, 96), 2024);
    EXPECT_TRUE(a.connected());
    EXPECT_EQ(a.edge_count(), 96u);
    EXPECT_EQ(a.diameter(), b.diameter());
    for (NodeId v = 0; v < 64; ++v) {
        ASSERT_EQ(a.neighbors(v), b.neighbors(v));
    }
}

TEST(Topology, RegularDegrees)
{
    for (std::size_t r : {3u, 4u}) {
        const auto g = generate_topology(TopologySpec::regular(64, r), 11);
        EXPECT_TRUE(g.connected());
        for (NodeId v = 0; v < 64; ++v) {
            ASSERT_EQ(g.neighbors(v).size(), r);
        }
    }
}

TEST(Topology, Errors)
{
    EXPECT_THROW(generate_topology(TopologySpec::sparse(10, 5), 1), TopologyError);
    EXPECT_THROW(generate_topology(TopologySpec::sparse(4, 7), 1), TopologyError);
    EXPECT_THROW(generate_topology(TopologySpec::regular(5, 3), 1), TopologyError);
    EXPECT_THROW(generate_topology(TopologySpec::regular(6, 1), 1), TopologyError);
    EXPECT_THROW(generate_topology(TopologySpec::complete(0), 1), TopologyError);
    // a tree-sized sparse graph is almost never connected; retries run out
    EXPECT_THROW(generate_topology(TopologySpec::sparse(200, 199), 1, 3), TopologyError);
}
