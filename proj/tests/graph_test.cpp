#include "dpsp/graph.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "dpsp/random.hpp"
#include "test_util.hpp"

namespace {

using dpsp::Adjacency;
using dpsp::ball;
using dpsp::DistanceMatrix;
using dpsp::exact_apsp;
using dpsp::hop_bounded_distances;
using dpsp::hop_bounded_shortest_path;
using dpsp::hop_distances;
using dpsp::kInf;
using dpsp::RandomStream;
using dpsp::Topology;
using dpsp::WeightedGraph;

TEST(Validate, RejectsMalformedGraphs) {
  WeightedGraph g;
  g.n = 3;
  g.edges = {{0, 1}};
  g.weights = {1.0, 2.0};
  EXPECT_THROW(dpsp::validate(g), std::invalid_argument);  // weight count mismatch
  g.weights = {1.0};
  EXPECT_NO_THROW(dpsp::validate(g));
  g.edges = {{1, 1}};
  EXPECT_THROW(dpsp::validate(g), std::invalid_argument);  // self loop
  g.edges = {{0, 3}};
  EXPECT_THROW(dpsp::validate(g), std::invalid_argument);  // vertex out of range
  g.edges = {{0, 1}};
  g.weights = {-0.5};
  EXPECT_THROW(dpsp::validate(g), std::invalid_argument);  // nonpositive weight
  g.weights = {2.0};
  g.weight_bound = 1.5;
  EXPECT_THROW(dpsp::validate(g), std::invalid_argument);  // exceeds declared bound
  g.weight_bound = 2.0;
  EXPECT_NO_THROW(dpsp::validate(g));
  WeightedGraph dup;
  dup.n = 2;
  dup.edges = {{0, 1}, {1, 0}};
  dup.weights = {1.0, 1.0};
  EXPECT_THROW(dpsp::validate(dup), std::invalid_argument);  // duplicate edge
}

TEST(ExactApsp, SingleVertex) {
  WeightedGraph g;
  g.n = 1;
  DistanceMatrix d = exact_apsp(g);
  ASSERT_EQ(d.n, 1u);
  EXPECT_EQ(d.at(0, 0), 0.0);
}

TEST(ExactApsp, TriangleTakesTwoHopShortcut) {
  WeightedGraph g;
  g.n = 3;
  g.edges = {{0, 1}, {1, 2}, {0, 2}};
  g.weights = {1.0, 2.0, 4.0};
  DistanceMatrix d = exact_apsp(g);
  EXPECT_DOUBLE_EQ(d.at(0, 2), 3.0);
  EXPECT_DOUBLE_EQ(d.at(2, 0), 3.0);
  EXPECT_DOUBLE_EQ(d.at(0, 1), 1.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(d.at(i, i), 0.0);
}

TEST(ExactApsp, DisconnectedPairsAreInfinite) {
  WeightedGraph g;
  g.n = 4;
  g.edges = {{0, 1}, {2, 3}};
  g.weights = {5.0, 1.0};
  DistanceMatrix d = exact_apsp(g);
  EXPECT_DOUBLE_EQ(d.at(0, 1), 5.0);
  EXPECT_EQ(d.at(0, 2), kInf);
  EXPECT_EQ(d.at(1, 3), kInf);
}

TEST(ExactApsp, MatchesFloydWarshallOnRandomGraphs) {
  RandomStream stream(4400, 0);
  for (int trial = 0; trial < 30; ++trial) {
    auto n = static_cast<std::uint32_t>(2 + stream.uniform_below(29));
    WeightedGraph g = testutil::random_connected_graph(n, stream, 0.3, 7.0);
    DistanceMatrix d = exact_apsp(g);
    auto ref = testutil::floyd_warshall(g);
    EXPECT_LE(testutil::max_abs_diff(d, ref), 1e-9) << "trial " << trial;
  }
}

TEST(ExactApsp, SymmetricWithTriangleInequality) {
  RandomStream stream(4401, 0);
  WeightedGraph g = testutil::random_connected_graph(25, stream, 0.15, 3.0);
  DistanceMatrix d = exact_apsp(g);
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t j = 0; j < d.n; ++j) {
      EXPECT_EQ(d.at(i, j), d.at(j, i));
      for (std::size_t k = 0; k < d.n; ++k)
        EXPECT_LE(d.at(i, j), d.at(i, k) + d.at(k, j) + 1e-9);
    }
}

TEST(HopDistances, PathAndCycle) {
  WeightedGraph p = testutil::path_graph(3);
  auto d = hop_distances(p.topology(), 0);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 1.0);
  EXPECT_EQ(d[2], 2.0);

  Topology iso{2, {}};
  auto di = hop_distances(iso, 0);
  EXPECT_EQ(di[0], 0.0);
  EXPECT_EQ(di[1], kInf);

  Topology cycle{4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}};
  auto dc = hop_distances(cycle, 0);
  EXPECT_EQ(dc[1], 1.0);
  EXPECT_EQ(dc[2], 2.0);
  EXPECT_EQ(dc[3], 1.0);

  EXPECT_THROW(hop_distances(cycle, 4), std::invalid_argument);
}

TEST(Ball, RadiusSemantics) {
  WeightedGraph p = testutil::path_graph(5);
  Topology t = p.topology();
  auto b0 = ball(t, 2, 0.0);
  ASSERT_EQ(b0.size(), 1u);
  EXPECT_EQ(b0[0], 2u);
  // Fractional radii truncate to whole hops.
  auto b17 = ball(t, 1, 1.7);
  ASSERT_EQ(b17.size(), 3u);
  EXPECT_EQ(b17[0], 0u);
  EXPECT_EQ(b17[1], 1u);
  EXPECT_EQ(b17[2], 2u);
  auto b1 = ball(t, 1, 1.0);
  EXPECT_EQ(b17, b1);
  // Radius at least the diameter covers everything.
  EXPECT_EQ(ball(t, 0, 10.0).size(), 5u);
  EXPECT_THROW(ball(t, 9, 1.0), std::invalid_argument);
  EXPECT_THROW(ball(t, 0, -0.5), std::invalid_argument);
}

TEST(Ball, MonotoneInRadius) {
  RandomStream stream(88, 0);
  WeightedGraph g = testutil::random_connected_graph(40, stream, 0.05);
  Topology t = g.topology();
  for (double r = 0.0; r < 8.0; r += 0.5) {
    auto small = ball(t, 7, r);
    auto big = ball(t, 7, r + 0.5);
    EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }
}

TEST(BoundedBall, RespectsAliveMaskAndAbortThreshold) {
  WeightedGraph p = testutil::path_graph(7);
  Adjacency adj(p.n, p.edges);
  std::vector<std::uint8_t> alive(p.n, 1);
  alive[4] = 0;  // removing vertex 4 cuts the path
  auto res = dpsp::detail::bounded_ball(adj, alive, 2, 100.0, 7);
  ASSERT_EQ(res.members.size(), 4u);  // {0,1,2,3}
  EXPECT_FALSE(res.exceeded);
  EXPECT_EQ(res.members.back(), 3u);
  std::vector<std::uint8_t> all(p.n, 1);
  auto capped = dpsp::detail::bounded_ball(adj, all, 2, 100.0, 3);
  EXPECT_TRUE(capped.exceeded);
}

TEST(IsConnected, SmallCases) {
  EXPECT_TRUE(dpsp::is_connected(Topology{0, {}}));
  EXPECT_TRUE(dpsp::is_connected(Topology{1, {}}));
  EXPECT_FALSE(dpsp::is_connected(Topology{2, {}}));
  EXPECT_TRUE(dpsp::is_connected(testutil::path_graph(6).topology()));
}

TEST(HopBounded, ExamplesAndErrors) {
  WeightedGraph p = testutil::path_graph(3);
  Topology t = p.topology();
  EXPECT_EQ(hop_bounded_shortest_path(t, p.weights, 1, 1, 0), 0.0);
  EXPECT_EQ(hop_bounded_shortest_path(t, p.weights, 0, 2, 1), kInf);
  EXPECT_DOUBLE_EQ(hop_bounded_shortest_path(t, p.weights, 0, 2, 2), 2.0);
  EXPECT_THROW(hop_bounded_shortest_path(t, p.weights, 0, 5, 2), std::invalid_argument);

  // Negative weights are legal inputs here (noisy weights flow through this
  // routine); a two-hop walk may beat the direct edge.
  Topology tri{3, {{0, 1}, {1, 2}, {0, 2}}};
  std::vector<double> w = {-2.0, 1.0, 0.5};
  EXPECT_DOUBLE_EQ(hop_bounded_shortest_path(tri, w, 0, 2, 2), -1.0);
  EXPECT_DOUBLE_EQ(hop_bounded_shortest_path(tri, w, 0, 2, 1), 0.5);
}

TEST(HopBounded, MatchesBruteForceDynamicProgram) {
  RandomStream stream(505, 0);
  for (int trial = 0; trial < 25; ++trial) {
    auto n = static_cast<std::uint32_t>(2 + stream.uniform_below(12));
    WeightedGraph g = testutil::random_connected_graph(n, stream, 0.4, 2.0);
    // Shift some weights negative to exercise the general case.
    for (auto& w : g.weights) w -= 1.0;
    Topology t = g.topology();
    for (std::uint64_t hops = 0; hops <= n + 2; ++hops) {
      auto got = hop_bounded_distances(t, g.weights, 0, hops);
      auto ref = testutil::brute_hop_bounded(t, g.weights, 0, hops);
      for (std::size_t v = 0; v < t.n; ++v) {
        if (ref[v] == kInf) {
          EXPECT_EQ(got[v], kInf);
        } else {
          EXPECT_NEAR(got[v], ref[v], 1e-12);
        }
      }
    }
  }
}

TEST(HopBounded, FullHopBudgetEqualsExactOnNonnegativeWeights) {
  RandomStream stream(506, 0);
  for (int trial = 0; trial < 15; ++trial) {
    auto n = static_cast<std::uint32_t>(2 + stream.uniform_below(29));
    WeightedGraph g = testutil::random_connected_graph(n, stream, 0.2, 5.0);
    DistanceMatrix d = exact_apsp(g);
    Topology t = g.topology();
    auto hb = hop_bounded_distances(t, g.weights, 0, n - 1);
    for (std::size_t v = 0; v < t.n; ++v) EXPECT_NEAR(hb[v], d.at(0, v), 1e-9);
  }
}

TEST(HopBounded, MonotoneInHopBudget) {
  RandomStream stream(507, 0);
  WeightedGraph g = testutil::random_connected_graph(20, stream, 0.2, 4.0);
  Topology t = g.topology();
  auto prev = hop_bounded_distances(t, g.weights, 3, 0);
  for (std::uint64_t hops = 1; hops <= 20; ++hops) {
    auto cur = hop_bounded_distances(t, g.weights, 3, hops);
    for (std::size_t v = 0; v < t.n; ++v) EXPECT_LE(cur[v], prev[v]);
    prev = cur;
  }
}

TEST(HopBoundedBlock, BitwiseEqualToScalarKernel) {
  RandomStream stream(508, 0);
  for (int trial = 0; trial < 10; ++trial) {
    auto n = static_cast<std::uint32_t>(3 + stream.uniform_below(40));
    WeightedGraph g = testutil::random_connected_graph(n, stream, 0.15, 3.0);
    for (std::size_t e = 0; e < g.weights.size(); ++e)
      if (stream.uniform01() < 0.3) g.weights[e] -= 2.0;  // negatives allowed
    Topology t = g.topology();
    auto n_src = static_cast<std::size_t>(1 + stream.uniform_below(std::min<std::uint64_t>(n, 20)));
    std::vector<std::uint32_t> sources;
    for (std::size_t s = 0; s < n_src; ++s)
      sources.push_back(static_cast<std::uint32_t>(stream.uniform_below(n)));
    std::uint64_t hops = stream.uniform_below(n + 3);
    std::vector<double> block(n_src * n);
    dpsp::detail::hop_bounded_block(t, g.weights, sources.data(), n_src, hops, block.data());
    for (std::size_t s = 0; s < n_src; ++s) {
      auto ref = hop_bounded_distances(t, g.weights, sources[s], hops);
      EXPECT_EQ(std::memcmp(block.data() + s * n, ref.data(), n * sizeof(double)), 0)
          << "trial " << trial << " source lane " << s;
    }
  }
}

TEST(GraphFile, RoundTripPreservesEverything) {
  RandomStream stream(600, 0);
  WeightedGraph g = testutil::random_connected_graph(17, stream, 0.25, 9.0);
  g.weight_bound = 11.5;
  std::ostringstream out;
  dpsp::write_graph(out, g);
  std::istringstream in(out.str());
  WeightedGraph h = dpsp::read_graph(in);
  EXPECT_EQ(h.n, g.n);
  ASSERT_EQ(h.edges, g.edges);
  ASSERT_EQ(h.weights.size(), g.weights.size());
  for (std::size_t e = 0; e < g.weights.size(); ++e)
    EXPECT_EQ(h.weights[e], g.weights[e]) << "weight " << e << " not bit-identical";
}

TEST(GraphFile, CommentsAndErrors) {
  std::istringstream ok("# comment\n3 2\n0 1 1.5\n\n# another\n1 2 2.5\n");
  WeightedGraph g = dpsp::read_graph(ok);
  EXPECT_EQ(g.n, 3u);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_DOUBLE_EQ(g.weights[1], 2.5);

  std::istringstream missing_header("0 1 1.5\n");
  EXPECT_THROW(dpsp::read_graph(missing_header), std::invalid_argument);
  std::istringstream short_file("3 2\n0 1 1.5\n");
  EXPECT_THROW(dpsp::read_graph(short_file), std::invalid_argument);
  std::istringstream bad_weight("2 1\n0 1 -3\n");
  EXPECT_THROW(dpsp::read_graph(bad_weight), std::invalid_argument);
  std::istringstream self_loop("2 1\n1 1 1\n");
  EXPECT_THROW(dpsp::read_graph(self_loop), std::invalid_argument);
}

TEST(Dijkstra, AgreesWithHopDistancesOnUnitWeights) {
  RandomStream stream(601, 0);
  WeightedGraph g = testutil::random_connected_graph(30, stream, 0.1, 1.0);
  for (auto& w : g.weights) w = 1.0;
  Topology t = g.topology();
  auto dd = dpsp::dijkstra_from(t, g.weights, 4);
  auto hd = hop_distances(t, 4);
  for (std::size_t v = 0; v < t.n; ++v) EXPECT_DOUBLE_EQ(dd[v], hd[v]);
}

}  // namespace
