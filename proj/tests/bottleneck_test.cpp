#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace qtbs;
using qtbs::testing::fixture;

namespace {

// Checks the structural invariants of a solution against its network.
void expect_consistent(const BottleneckSolution& s) {
  const Network& net = s.net();
  const auto& g = s.graph;
  const double tol = 1e-9;
  for (std::size_t l = 0; l < net.link_count(); ++l) {
    double load = 0;
    for (std::size_t f : net.flows_on(l)) load += s.rate[f];
    EXPECT_LE(load, net.link(l).capacity + tol * (1 + net.flows_on(l).size()));
    bool saturated = std::fabs(load - net.link(l).capacity) <= tol * (1 + net.flows_on(l).size()) * 10;
    if (saturated) EXPECT_TRUE(s.is_bottleneck_link(l)) << net.link(l).id;
  }
  for (std::size_t f = 0; f < net.flow_count(); ++f) {
    double m = kInf;
    for (std::size_t l : net.path(f)) m = std::min(m, s.fair_share[l]);
    EXPECT_NEAR(s.rate[f], m, tol);
    std::vector<std::size_t> argmin;
    for (std::size_t l : net.path(f))
      if (std::fabs(s.fair_share[l] - m) <= tol) argmin.push_back(l);
    std::sort(argmin.begin(), argmin.end());
    EXPECT_EQ(s.bottlenecks_of[f], argmin) << net.flow(f).id;

    std::size_t fv = g.flow_vertex(f);
    for (std::size_t l : net.path(f)) {
      std::size_t lv = g.link_vertex(l);
      bool bottleneck = std::binary_search(s.bottlenecks_of[f].begin(), s.bottlenecks_of[f].end(), l);
      EXPECT_EQ(g.has_edge(lv, fv, EdgeKind::Bottleneck), bottleneck);
      EXPECT_EQ(g.has_edge(fv, lv, EdgeKind::Backward), bottleneck);
      EXPECT_EQ(g.has_edge(fv, lv, EdgeKind::Traversal), !bottleneck);
    }
  }
}

}  // namespace

TEST(GradientGraph, SingleLinkSymmetric) {
  auto s = gradient_graph(fixture("single_link"));
  for (double r : s.rate) EXPECT_DOUBLE_EQ(r, 4.0);
  EXPECT_DOUBLE_EQ(s.fair_share[0], 4.0);
  for (const auto& b : s.bottlenecks_of) EXPECT_EQ(b, std::vector<std::size_t>{0});
  expect_consistent(s);
}

TEST(GradientGraph, B4TopLevelRates) {
  auto s = gradient_graph(fixture("b4"));
  for (int i : {1, 2, 3, 4, 5, 7, 8, 10, 13, 14, 15, 16}) {
    EXPECT_NEAR(s.rate_of("f" + std::to_string(i)), 5.0 / 3.0, 1e-9);
    EXPECT_NEAR(s.rate_of("f" + std::to_string(i + 24)), 5.0 / 3.0, 1e-9);
  }
  EXPECT_NEAR(s.rate_of("f9"), 15.0 / 7.0, 1e-9);
  EXPECT_NEAR(s.rate_of("f6"), 3.0, 1e-9);
  for (std::size_t f = 0; f < s.rate.size(); ++f) {
    EXPECT_GE(s.rate[f], 5.0 / 3.0 - 1e-9);
    EXPECT_LE(s.rate[f], 3.0 + 1e-9);
  }
  expect_consistent(s);
}

TEST(GradientGraph, FatTreeTau1) {
  auto s = gradient_graph(fixture("fattree_tau1"));
  for (std::size_t f = 0; f < s.rate.size(); ++f) {
    const auto& id = s.net().flow(f).id;
    bool fast = id == "f1" || id == "f4" || id == "f9" || id == "f12";
    EXPECT_NEAR(s.rate[f], fast ? 5.0 : 2.5, 1e-12) << id;
  }
  expect_consistent(s);
}

TEST(GradientGraph, FatTreeAtFoldIsOneLevel) {
  auto net = fixture("fattree_tau1");
  TaperTemplate t{net, {"l5", "l6"}, 20, 1};
  auto s = gradient_graph(scaled_network(t, 4.0 / 3.0));
  for (double r : s.rate) EXPECT_NEAR(r, 10.0 / 3.0, 1e-9);
  EXPECT_EQ(flow_levels(s).size(), 1u);
  expect_consistent(s);
}

TEST(GradientGraph, TiedLinksBothBottleneckTheFlow) {
  // f rides two links with equal fair share; both must hold it.
  Network net({{"a", 4}, {"b", 8}}, {{"f", {"a", "b"}}, {"g", {"a"}}, {"h", {"b"}}, {"k", {"b"}}, {"m", {"b"}}});
  auto s = gradient_graph(net);
  EXPECT_DOUBLE_EQ(s.rate_of("f"), 2.0);
  EXPECT_EQ(s.bottlenecks_of[s.net().flow_index("f")].size(), 2u);
  expect_consistent(s);
}

TEST(GradientGraph, UntraversedLinkReportsCapacity) {
  Network net({{"a", 4}, {"idle", 9}}, {{"f", {"a"}}});
  auto s = gradient_graph(net);
  EXPECT_DOUBLE_EQ(s.fair_share_of("idle"), 9.0);
  EXPECT_TRUE(s.graph.out(s.graph.link_vertex(1)).empty());
  EXPECT_TRUE(s.graph.in(s.graph.link_vertex(1)).empty());
}

TEST(GradientGraph, NonBottleneckLinkHasUnboundedShare) {
  auto s = gradient_graph(fixture("fattree_tau2"));
  EXPECT_TRUE(std::isinf(s.fair_share_of("l5")));
  EXPECT_FALSE(s.is_bottleneck_link(s.net().link_index("l5")));
  for (double r : s.rate) EXPECT_NEAR(r, 10.0 / 3.0, 1e-9);
}

TEST(GradientGraph, RejectsInvalidNetwork) {
  Network net({{"a", 0}}, {{"f", {"a"}}});
  EXPECT_THROW(gradient_graph(net), Error);
}

TEST(GradientGraph, RandomNetworksAreConsistentAndWithinWorkBound) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto net = random_network(seed, {30, 80, 6});
    auto s = gradient_graph(net);
    expect_consistent(s);
    std::size_t h = 0;
    for (std::size_t l = 0; l < net.link_count(); ++l) h = std::max(h, net.flows_on(l).size());
    EXPECT_LE(s.stats.heap_pops, net.link_count());
    EXPECT_LE(s.stats.key_updates, net.link_count() * h);
  }
}

TEST(GradientGraph, FairSharesNonDecreasingAlongPaths) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = gradient_graph(random_network(seed, {25, 60, 5}));
    const auto& g = s.graph;
    for (std::size_t l = 0; l < g.link_count(); ++l)
      for (const auto& e1 : g.out(l))
        for (const auto& e2 : g.out(e1.peer))
          EXPECT_GE(s.fair_share[e2.peer], s.fair_share[l] - 1e-9);
  }
}

TEST(GradientGraph, ConservationOnSaturatedLinks) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = gradient_graph(random_network(seed, {25, 60, 5}));
    const auto& net = s.net();
    for (std::size_t l = 0; l < net.link_count(); ++l) {
      if (!s.is_bottleneck_link(l)) continue;
      double load = 0;
      for (std::size_t f : net.flows_on(l)) load += s.rate[f];
      EXPECT_NEAR(load, net.link(l).capacity, 1e-9 * net.flows_on(l).size() + 1e-12);
    }
  }
}

TEST(GradientGraph, Deterministic) {
  auto net = random_network(7, {30, 100, 5});
  auto a = gradient_graph(net), b = gradient_graph(net);
  EXPECT_EQ(a.rate, b.rate);
  EXPECT_EQ(a.fair_share, b.fair_share);
  EXPECT_EQ(a.level, b.level);
}

TEST(Levels, SingleLinkSingleFlow) {
  auto s = gradient_graph(Network({{"l", 3}}, {{"f", {"l"}}}));
  auto lv = levels(s);
  EXPECT_EQ(lv[s.graph.link_vertex(0)], 0);
  EXPECT_EQ(lv[s.graph.flow_vertex(0)], 1);
}

TEST(Levels, B4HasTwoFlowLevels) {
  auto s = gradient_graph(fixture("b4"));
  ASSERT_EQ(flow_levels(s).size(), 2u);
  int top = flow_levels(s).front();
  for (std::size_t f = 0; f < s.rate.size(); ++f) {
    bool is_top = std::fabs(s.rate[f] - 5.0 / 3.0) < 1e-9;
    EXPECT_EQ(s.level[s.graph.flow_vertex(f)] == top, is_top) << s.net().flow(f).id;
  }
}

TEST(Levels, IncreaseAlongNonBackwardEdges) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto s = gradient_graph(random_network(seed, {20, 50, 5}));
    for (std::size_t v = 0; v < s.graph.size(); ++v) {
      if (s.graph.is_link(v)) {
        bool has_traversal_in = false;
        for (const auto& e : s.graph.in(v)) has_traversal_in |= e.kind == EdgeKind::Traversal;
        if (!has_traversal_in) EXPECT_EQ(s.level[v], 0);
      }
      for (const auto& e : s.graph.out(v))
        if (e.kind != EdgeKind::Backward) EXPECT_GT(s.level[e.peer], s.level[v]);
    }
  }
}

TEST(RegionOfInfluence, LeafIsEmpty) {
  auto s = gradient_graph(fixture("fattree_tau2"));
  EXPECT_TRUE(region_of_influence(s, "l5").empty());
}

TEST(RegionOfInfluence, ShapingFixtureF8DoesNotReachF7) {
  auto s = gradient_graph(fixture("shaping"));
  auto r = region_of_influence(s, "f8");
  EXPECT_EQ(std::count(r.begin(), r.end(), "f7"), 0);
  auto r4 = region_of_influence(s, "f4");
  EXPECT_EQ(std::count(r4.begin(), r4.end(), "f7"), 1);
  EXPECT_EQ(std::count(r4.begin(), r4.end(), "f4"), 0);
}

TEST(RegionOfInfluence, UnknownVertex) {
  auto s = gradient_graph(fixture("shaping"));
  EXPECT_THROW(region_of_influence(s, "nope"), Error);
  EXPECT_THROW(region_of_influence(s, std::size_t{1000}), Error);
}
