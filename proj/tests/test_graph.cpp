#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "escape/error.hpp"
#include "escape/graph.hpp"
#include "oracles/oracles.hpp"

using namespace escape;

namespace {

std::vector<GraphSpec> small_families() {
  return {{Cycle{7}, 0},        {Cycle{6}, 2},     {Torus{5, 2}, 0}, {Torus{3, 3}, 0},
          {Hypercube{4}, 0},    {Complete{5}, 0},  {Dihedral{5}, 0}, {Dihedral{6}, 1},
          {Lamplighter{3}, 0},  {Lamplighter{4}, 0}};
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::config;
}

}  // namespace

TEST(Graph, SizesAndDegrees) {
  EXPECT_EQ(build_graph({Cycle{10}, 0}).size(), 10u);
  EXPECT_EQ(build_graph({Cycle{10}, 0}).degree(), 2u);
  EXPECT_EQ(build_graph({Torus{4, 3}, 0}).size(), 64u);
  EXPECT_EQ(build_graph({Torus{4, 3}, 0}).degree(), 6u);
  EXPECT_EQ(build_graph({Hypercube{5}, 0}).size(), 32u);
  EXPECT_EQ(build_graph({Hypercube{5}, 0}).degree(), 5u);
  EXPECT_EQ(build_graph({Complete{4}, 0}).degree(), 3u);
  EXPECT_EQ(build_graph({Dihedral{5}, 0}).size(), 10u);
  EXPECT_EQ(build_graph({Dihedral{5}, 0}).degree(), 3u);
  EXPECT_EQ(build_graph({Lamplighter{3}, 0}).size(), 24u);
  EXPECT_EQ(build_graph({Lamplighter{3}, 0}).degree(), 3u);
  const Graph looped = build_graph({Cycle{10}, 6});
  EXPECT_EQ(looped.degree(), 8u);
  EXPECT_EQ(looped.self_loops(), 6u);
}

TEST(Graph, CycleDistances) {
  const auto f = bfs_distances(build_graph({Cycle{6}, 0}), 0);
  EXPECT_EQ(f.dist, (std::vector<std::uint32_t>{0, 1, 2, 3, 2, 1}));
  EXPECT_EQ(f.eccentricity(), 3u);
}

TEST(Graph, HypercubeNeighboursDifferInOneBit) {
  const Graph g = build_graph({Hypercube{4}, 0});
  for (Vertex x = 0; x < g.size(); ++x) {
    std::set<Vertex> nb(g.neighbors(x).begin(), g.neighbors(x).end());
    std::set<Vertex> expect;
    for (int i = 0; i < 4; ++i) expect.insert(x ^ (1u << i));
    EXPECT_EQ(nb, expect);
  }
}

TEST(Graph, BfsMatchesFloydOnAllFamilies) {
  for (const auto& spec : small_families()) {
    const Graph g = build_graph(spec);
    const auto d = oracle::floyd(g);
    for (Vertex s = 0; s < g.size(); s += 3) {
      const auto f = bfs_distances(g, s);
      for (Vertex x = 0; x < g.size(); ++x) ASSERT_EQ(f.dist[x], d[s][x]) << describe(spec);
    }
  }
}

TEST(Graph, TranslationIsAnAutomorphism) {
  for (const auto& spec : small_families()) {
    const Graph g = build_graph(spec);
    const auto d = oracle::floyd(g);
    for (Vertex a = 0; a < g.size(); ++a) {
      std::multiset<Vertex> image;
      for (Vertex x = 0; x < g.size(); ++x) image.insert(translation_action(g, a, x));
      ASSERT_EQ(image.size(), g.size());
      ASSERT_EQ(std::set<Vertex>(image.begin(), image.end()).size(), g.size()) << "not a bijection";
      for (Vertex x = 0; x < g.size(); ++x) {
        for (Vertex y = 0; y < g.size(); ++y) {
          ASSERT_EQ(d[translation_action(g, a, x)][translation_action(g, a, y)], d[x][y])
              << describe(spec);
        }
      }
    }
  }
}

TEST(Graph, TranslationExamples) {
  const Graph c = build_graph({Cycle{6}, 0});
  EXPECT_EQ(translation_action(c, 2, 5), 1u);
  const Graph h = build_graph({Hypercube{3}, 0});
  EXPECT_EQ(translation_action(h, 0b101, 0b011), 0b110u);
  EXPECT_EQ(translation_action(c, 0, 4), 4u);
}

TEST(Graph, IdentityIsVertexZeroAndTransitive) {
  for (const auto& spec : small_families()) {
    const Graph g = build_graph(spec);
    for (Vertex x = 0; x < g.size(); ++x) EXPECT_EQ(translation_action(g, x, 0), x);
  }
}

TEST(Graph, CayleyTableZ3) {
  CayleyTable t;
  t.table = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  t.generators = {1, 2};
  const Graph g = build_graph({t, 0});
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.degree(), 2u);
  EXPECT_EQ(bfs_distances(g, 0).dist, (std::vector<std::uint32_t>{0, 1, 1}));
}

TEST(Graph, CayleyTableErrors) {
  CayleyTable z4;
  z4.table = {{0, 1, 2, 3}, {1, 2, 3, 0}, {2, 3, 0, 1}, {3, 0, 1, 2}};
  z4.generators = {2};
  EXPECT_EQ(code_of([&] { build_graph({z4, 0}); }), Errc::non_generating);
  z4.generators = {1};
  EXPECT_EQ(code_of([&] { build_graph({z4, 0}); }), Errc::invalid_argument);
  CayleyTable bad;
  bad.table = {{0, 1}, {0, 1}};
  bad.generators = {1};
  EXPECT_EQ(code_of([&] { build_graph({bad, 0}); }), Errc::invalid_argument);
}

TEST(Graph, InvalidParameters) {
  EXPECT_EQ(code_of([] { build_graph({Cycle{1}, 0}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { build_graph({Torus{4, 0}, 0}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { build_graph({Lamplighter{25}, 0}); }), Errc::invalid_argument);
}

TEST(Graph, FromNeighbourLists) {
  const Graph g = Graph::from_neighbor_lists({{1, 3}, {0, 2}, {1, 3}, {2, 0}});
  EXPECT_EQ(g.size(), 4u);
  EXPECT_EQ(g.group(), nullptr);
  EXPECT_EQ(bfs_distances(g, 0).dist, (std::vector<std::uint32_t>{0, 1, 2, 1}));
  EXPECT_EQ(code_of([&] { translation_action(g, 1, 1); }), Errc::unsupported);
  EXPECT_EQ(code_of([] { Graph::from_neighbor_lists({{1}, {0}, {3}, {2}}); }), Errc::disconnected);
  EXPECT_EQ(code_of([] { Graph::from_neighbor_lists({{1, 2}, {0}, {0}}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { Graph::from_neighbor_lists({{1}, {2}, {0}}); }), Errc::invalid_argument);
}

TEST(Graph, Describe) {
  EXPECT_EQ(describe({Torus{32, 2}, 0}), "torus(32,2)");
  EXPECT_EQ(family_name(Family{Lamplighter{3}}), "lamplighter");
}
