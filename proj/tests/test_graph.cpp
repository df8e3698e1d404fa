#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "infomotif/graph.hpp"
#include "infomotif/graph_io.hpp"
#include "test_util.hpp"

using namespace infomotif;
using testutil::TempDir;

namespace {

// Reference BFS distances over a dense symmetric adjacency matrix.
std::vector<int> bfs_dist(const std::vector<std::vector<int>>& adj, std::vector<NodeId> seeds) {
  std::vector<int> dist(adj.size(), -1);
  std::vector<NodeId> frontier;
  for (auto s : seeds) {
    dist[s] = 0;
    frontier.push_back(s);
  }
  for (int d = 1; !frontier.empty(); ++d) {
    std::vector<NodeId> next;
    for (auto v : frontier)
      for (NodeId u = 0; u < adj.size(); ++u)
        if (adj[v][u] && dist[u] < 0) {
          dist[u] = d;
          next.push_back(u);
        }
    frontier = std::move(next);
  }
  return dist;
}

LabelSet all_labeled(std::size_t n, std::size_t classes = 2) {
  std::vector<std::int32_t> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<std::int32_t>(i % classes);
  return LabelSet(y, classes);
}

}  // namespace

TEST(LoadGraph, TriangleFile) {
  TempDir dir;
  auto g = load_graph(dir.file("t.txt", "0 1\n1 2\n2 0\n")).graph;
  EXPECT_EQ(g.n_nodes(), 3u);
  EXPECT_EQ(g.n_edges(), 3u);
  for (NodeId v = 0; v < 3; ++v) EXPECT_EQ(g.degree(v), 2u);
}

TEST(LoadGraph, SelfLoopDroppedAndCounted) {
  TempDir dir;
  auto loaded = load_graph(dir.file("s.txt", "0 0\n0 1\n"));
  EXPECT_EQ(loaded.stats.self_loops, 1u);
  EXPECT_EQ(loaded.graph.n_edges(), 1u);
}

TEST(LoadGraph, DuplicatesRemoved) {
  TempDir dir;
  auto undirected = load_graph(dir.file("d.txt", "0 1\n1 0\n0 1\n1 2\n"));
  EXPECT_EQ(undirected.graph.n_edges(), 2u);
  EXPECT_EQ(undirected.stats.duplicates, 2u);
  auto directed = load_graph(dir.file("d.txt", "0 1\n1 0\n0 1\n"), GraphLoadOptions{.directed = true, .node_types = {}, .schema = nullptr});
  EXPECT_EQ(directed.graph.n_edges(), 2u);
}

TEST(LoadGraph, FirstAppearanceIds) {
  TempDir dir;
  auto loaded = load_graph(dir.file("ids.txt", "# header\n70 5\n5 12 # tail\n"));
  EXPECT_EQ(loaded.ids.original(0), 70u);
  EXPECT_EQ(loaded.ids.original(1), 5u);
  EXPECT_EQ(loaded.ids.original(2), 12u);
  EXPECT_TRUE(loaded.graph.adjacent(0, 1));
  EXPECT_TRUE(loaded.graph.adjacent(1, 2));
}

TEST(LoadGraph, MalformedRowReportsLine) {
  TempDir dir;
  auto p = dir.file("bad.txt", "0 1\n1 x\n");
  try {
    load_graph(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_graph(dir.file("bad3.txt", "0 1 2 3\n")), ParseError);
  EXPECT_THROW(load_graph(dir.file("mixed.txt", "0 1 a\n1 2\n")), ParseError);
}

TEST(LoadGraph, IdOverflowIsBoundsError) {
  TempDir dir;
  EXPECT_THROW(load_graph(dir.file("o.txt", "0 99999999999999999999999\n")), BoundsError);
  EXPECT_THROW(load_graph(dir.file("o2.txt", "0 4294967295\n")), BoundsError);
}

TEST(LoadGraph, MissingFile) { EXPECT_THROW(load_graph("/nonexistent/graph.txt"), ParseError); }

TEST(Graph, BuildRejectsOutOfRange) {
  std::vector<Edge> e{{0, 5}};
  EXPECT_THROW(Graph::build(3, e, false), BoundsError);
}

TEST(Graph, DirectedAdjacencyLists) {
  std::vector<Edge> e{{0, 1}, {2, 1}, {1, 3}};
  auto g = Graph::build(4, e, true);
  auto out1 = g.out_neighbors(1);
  auto in1 = g.in_neighbors(1);
  EXPECT_EQ(std::vector<NodeId>(out1.begin(), out1.end()), (std::vector<NodeId>{3}));
  EXPECT_EQ(std::vector<NodeId>(in1.begin(), in1.end()), (std::vector<NodeId>{0, 2}));
  auto nb = g.neighbors(1);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()), (std::vector<NodeId>{0, 2, 3}));
  EXPECT_TRUE(g.has_arc(0, 1));
  EXPECT_FALSE(g.has_arc(1, 0));
  EXPECT_TRUE(g.adjacent(1, 0));
}

TEST(Graph, UndirectedNeighborListsSymmetric) {
  auto g = testutil::random_graph(30, 0.2, false, 3);
  for (NodeId v = 0; v < g.n_nodes(); ++v)
    for (NodeId u : g.neighbors(v)) EXPECT_TRUE(g.adjacent(u, v));
  std::size_t sum = 0;
  for (NodeId v = 0; v < g.n_nodes(); ++v) sum += g.degree(v);
  EXPECT_EQ(sum, 2 * g.n_edges());
}

TEST(Graph, TypeMapsMustBeTotal) {
  std::vector<Edge> e{{0, 1}};
  EXPECT_THROW(Graph::build(2, e, false, {0}), ConfigError);
  EXPECT_THROW(Graph::build(2, e, false, {}, {0, 1}), ConfigError);
}

TEST(RoundTrip, UntypedWithIsolatedNode) {
  TempDir dir;
  std::vector<Edge> e{{3, 1}, {1, 0}, {0, 3}};
  auto g = Graph::build(5, e, false);
  save_graph(dir.path() / "g.txt", g);
  auto again = load_graph(dir.path() / "g.txt").graph;
  EXPECT_EQ(again, g);
  save_graph(dir.path() / "g2.txt", again);
  EXPECT_EQ(load_graph(dir.path() / "g2.txt").graph, g);
}

TEST(RoundTrip, TypedDirected) {
  TempDir dir;
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}, {3, 2}};
  auto g = Graph::build(4, e, true, {1, 0, 1, 0}, {1, 0, 1, 1});
  save_graph(dir.path() / "g.txt", g);
  save_node_types(dir.path() / "types.txt", g, {});
  auto again = load_graph(dir.path() / "g.txt",
                          {.directed = true, .node_types = dir.path() / "types.txt"})
                   .graph;
  EXPECT_EQ(again, g);
}

TEST(RoundTrip, RandomGraphs) {
  TempDir dir;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = testutil::random_graph(25, 0.15, seed % 2 == 1, seed);
    save_graph(dir.path() / "r.txt", g);
    EXPECT_EQ(load_graph(dir.path() / "r.txt", GraphLoadOptions{.directed = g.directed(), .node_types = {}, .schema = nullptr}).graph, g);
  }
}

TEST(Features, DenseCsvAndTriplets) {
  TempDir dir;
  auto loaded = load_graph(dir.file("g.txt", "0 1\n1 2\n"));
  auto x = load_features(dir.file("x.csv", "1,2\n3,4\n5,6\n"), loaded.ids);
  EXPECT_EQ(x.rows(), 3u);
  EXPECT_EQ(x.cols(), 2u);
  EXPECT_FLOAT_EQ(x(2, 1), 6.0f);
  auto xs = load_features(dir.file("x.txt", "0 0 1.5\n2 3 -1\n"), loaded.ids);
  EXPECT_EQ(xs.cols(), 4u);
  EXPECT_FLOAT_EQ(xs(0, 0), 1.5f);
  EXPECT_FLOAT_EQ(xs(1, 2), 0.0f);
  EXPECT_FLOAT_EQ(xs(2, 3), -1.0f);
  EXPECT_THROW(load_features(dir.file("bad.csv", "1,2\n3\n"), loaded.ids), ParseError);
  EXPECT_THROW(load_features(dir.file("nan.csv", "1,nan\n"), loaded.ids), ParseError);
}

TEST(Labels, PartialLabeling) {
  TempDir dir;
  auto loaded = load_graph(dir.file("g.txt", "0 1\n1 2\n"));
  auto y = load_labels(dir.file("y.txt", "0 2\n2 0\n"), loaded.ids);
  EXPECT_EQ(y.num_classes(), 3u);
  EXPECT_TRUE(y.labeled(0));
  EXPECT_FALSE(y.labeled(1));
  EXPECT_EQ(y[0], 2);
  EXPECT_THROW(LabelSet({kUnlabeled, kUnlabeled}, 2), ConfigError);
  EXPECT_THROW(LabelSet({0, 3}, 2), BoundsError);
}

TEST(FeatureMatrix, RejectsNonFinite) {
  FeatureMatrix::Storage x(1, 2);
  x << 1.0f, std::numeric_limits<float>::infinity();
  EXPECT_THROW(FeatureMatrix{x}, NumericError);
}

TEST(LargestComponent, TwoTrianglesAndIsolatedNode) {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}};
  auto g = Graph::build(7, e, false);
  FeatureMatrix::Storage x(7, 1);
  for (int i = 0; i < 7; ++i) x(i, 0) = static_cast<float>(i);
  auto sel = largest_connected_component(g, FeatureMatrix(x), all_labeled(7));
  EXPECT_EQ(sel.graph.n_nodes(), 3u);
  EXPECT_EQ(sel.graph.n_edges(), 3u);
  EXPECT_EQ(sel.original_ids, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_FLOAT_EQ(sel.features(2, 0), 2.0f);
}

TEST(LargestComponent, ConnectedIsIdentity) {
  auto g = Graph::build(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}}, false);
  auto y = all_labeled(4, 3);
  auto sel = largest_connected_component(g, FeatureMatrix(4, 2), y);
  EXPECT_EQ(sel.graph, g);
  EXPECT_EQ(sel.original_ids, (std::vector<NodeId>{0, 1, 2, 3}));
  for (NodeId v = 0; v < 4; ++v) EXPECT_EQ(sel.labels[v], y[v]);
}

TEST(LargestComponent, MatchesBfsOracle) {
  // Components of size 6 and 4 on shuffled ids.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<NodeId> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Edge> e;
    for (int i = 1; i < 6; ++i) e.push_back({perm[i - 1], perm[i]});
    for (int i = 7; i < 10; ++i) e.push_back({perm[6], perm[i]});
    auto g = Graph::build(10, e, false);
    auto adj = testutil::adjacency(g, true);
    std::size_t best = 0;
    for (NodeId s = 0; s < 10; ++s) {
      auto d = bfs_dist(adj, {s});
      best = std::max<std::size_t>(best, std::count_if(d.begin(), d.end(), [](int x) { return x >= 0; }));
    }
    auto sel = largest_connected_component(g, FeatureMatrix(10, 1), all_labeled(10));
    EXPECT_EQ(sel.graph.n_nodes(), best);
    EXPECT_EQ(sel.graph.n_nodes(), 6u);
    EXPECT_EQ(sel.graph.n_edges(), 5u);
  }
}

TEST(LargestComponent, EmptyGraphIsError) {
  EXPECT_THROW(largest_connected_component(Graph::build(0, {}, false), FeatureMatrix(0, 1), LabelSet()),
               ConfigError);
}

TEST(Splits, Arithmetic) {
  auto s = make_splits(all_labeled(100), 0.4, 0.1, 7);
  EXPECT_EQ(s.train.size(), 40u);
  EXPECT_EQ(s.val.size(), 10u);
  EXPECT_EQ(s.test.size(), 50u);
}

TEST(Splits, DeterministicAndDisjoint) {
  auto y = all_labeled(80);
  auto a = make_splits(y, 0.3, 0.2, 5);
  auto b = make_splits(y, 0.3, 0.2, 5);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  std::set<NodeId> all;
  for (auto* part : {&a.train, &a.val, &a.test}) all.insert(part->begin(), part->end());
  EXPECT_EQ(all.size(), 80u);
}

TEST(Splits, SeedsDiffer) {
  auto y = all_labeled(60);
  EXPECT_NE(make_splits(y, 0.5, 0.2, 1).train, make_splits(y, 0.5, 0.2, 2).train);
}

TEST(Splits, OnlyLabeledNodes) {
  std::vector<std::int32_t> raw(50, kUnlabeled);
  for (int i = 0; i < 50; i += 2) raw[i] = 1;
  auto s = make_splits(LabelSet(raw, 2), 0.4, 0.2, 3);
  for (auto* part : {&s.train, &s.val, &s.test})
    for (auto v : *part) EXPECT_EQ(v % 2, 0u);
}

TEST(Splits, BadRatios) {
  auto y = all_labeled(10);
  EXPECT_THROW(make_splits(y, 0.0, 0.1, 1), ConfigError);
  EXPECT_THROW(make_splits(y, 0.6, 0.4, 1), ConfigError);
  EXPECT_THROW(make_splits(y, 0.5, -0.1, 1), ConfigError);
}

TEST(Khop, ZeroHopsIsSeeds) {
  auto g = testutil::random_graph(20, 0.2, false, 1);
  std::vector<NodeId> seeds{7, 3};
  EXPECT_EQ(khop_neighborhood(g, seeds, 0), (std::vector<NodeId>{3, 7}));
}

TEST(Khop, Path) {
  auto g = Graph::build(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}}, false);
  std::vector<NodeId> seeds{0};
  EXPECT_EQ(khop_neighborhood(g, seeds, 2), (std::vector<NodeId>{0, 1, 2}));
}

TEST(Khop, DirectedUsesUndirectedHops) {
  auto g = Graph::build(3, std::vector<Edge>{{1, 0}, {2, 1}}, true);
  std::vector<NodeId> seeds{0};
  EXPECT_EQ(khop_neighborhood(g, seeds, 2), (std::vector<NodeId>{0, 1, 2}));
}

TEST(Khop, MatchesBfsOracleMonotoneIdempotent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = testutil::random_graph(40, 0.06, seed % 2 == 0, seed);
    auto adj = testutil::adjacency(g, true);
    std::vector<NodeId> seeds{static_cast<NodeId>(seed), static_cast<NodeId>(seed + 10)};
    auto dist = bfs_dist(adj, seeds);
    std::vector<NodeId> prev;
    for (std::size_t k = 0; k <= 40; ++k) {
      auto got = khop_neighborhood(g, seeds, k);
      std::vector<NodeId> want;
      for (NodeId v = 0; v < 40; ++v)
        if (dist[v] >= 0 && static_cast<std::size_t>(dist[v]) <= k) want.push_back(v);
      ASSERT_EQ(got, want) << "seed " << seed << " k " << k;
      EXPECT_TRUE(std::includes(got.begin(), got.end(), prev.begin(), prev.end()));
      prev = got;
    }
    EXPECT_EQ(khop_neighborhood(g, seeds, 39), khop_neighborhood(g, seeds, 1000));
  }
}

TEST(ContentHash, SensitiveToStructure) {
  auto a = Graph::build(3, std::vector<Edge>{{0, 1}, {1, 2}}, false);
  auto b = Graph::build(3, std::vector<Edge>{{0, 1}, {0, 2}}, false);
  EXPECT_EQ(content_hash(a), content_hash(Graph::build(3, std::vector<Edge>{{0, 1}, {1, 2}}, false)));
  EXPECT_NE(content_hash(a), content_hash(b));
}
