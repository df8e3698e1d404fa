#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "infomotif/motif.hpp"
#include "infomotif/motif_index.hpp"
#include "test_util.hpp"

using namespace infomotif;
using testutil::TempDir;

namespace {

using Cells = std::array<std::array<int, 3>, 3>;

struct Pattern {
  std::array<int, 3> types{0, 0, 0};
  Cells cell{};
};

// Isomorphism by trying every slot permutation; independent of canonical codes.
bool isomorphic(const Pattern& a, const Pattern& b) {
  std::array<int, 3> p{0, 1, 2};
  do {
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      ok = a.types[i] == b.types[p[i]];
      for (int j = 0; j < 3 && ok; ++j)
        if (i != j) ok = a.cell[i][j] == b.cell[p[i]][p[j]];
    }
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

Pattern pattern_of(const MotifSpec& m) {
  Pattern p;
  auto t = m.triad();
  for (int i = 0; i < 3; ++i) {
    p.types[i] = t.types[i];
    for (int j = 0; j < 3; ++j) p.cell[i][j] = t.cell[i][j];
  }
  return p;
}

// Induced pattern of a node triple read straight from the edge list.
Pattern induced(const Graph& g, std::array<NodeId, 3> s, bool directed_view, bool typed,
                const Schema* schema = nullptr) {
  Pattern p;
  if (typed)
    for (int i = 0; i < 3; ++i) p.types[i] = g.node_type(s[i]);
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    auto [u, w] = g.edges()[e];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j || s[i] != u || s[j] != w) continue;
        int v = 1;
        if (typed) {
          if (g.has_edge_types()) {
            v = 1 + g.edge_types()[e];
          } else {
            auto et = schema->edge_type_between(g.node_type(u), g.node_type(w));
            v = et ? 1 + *et : 255;
          }
        }
        p.cell[i][j] = v;
        if (!directed_view || !g.directed()) p.cell[j][i] = v;
      }
  }
  return p;
}

bool weakly_connected(const Cells& c) {
  int pairs = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) pairs += (c[i][j] || c[j][i]) ? 1 : 0;
  return pairs >= 2;
}

// Brute force over all C(n,3) node sets.
std::vector<std::set<Triple>> brute_force_instances(const Graph& g, const MotifCatalog& cat,
                                                    const Schema* schema = nullptr) {
  std::vector<std::set<Triple>> out(cat.size());
  for (NodeId a = 0; a < g.n_nodes(); ++a)
    for (NodeId b = a + 1; b < g.n_nodes(); ++b)
      for (NodeId c = b + 1; c < g.n_nodes(); ++c) {
        auto p = induced(g, {a, b, c}, cat.directed(), cat.typed(), schema);
        for (std::size_t t = 0; t < cat.size(); ++t)
          if (isomorphic(p, pattern_of(cat[t]))) out[t].insert({a, b, c});
      }
  return out;
}

void expect_index_matches_oracle(const Graph& g, const MotifCatalog& cat,
                                 const Schema* schema = nullptr) {
  auto idx = MotifIndex::build(g, cat);
  auto want = brute_force_instances(g, cat, schema);
  for (std::size_t t = 0; t < cat.size(); ++t) {
    auto got = idx.instances(t);
    ASSERT_EQ(std::set<Triple>(got.begin(), got.end()), want[t]) << cat[t].name;
    ASSERT_EQ(got.size(), want[t].size()) << "duplicate instance of " << cat[t].name;
    for (NodeId v = 0; v < g.n_nodes(); ++v) {
      std::set<Triple> anchored;
      for (const auto& inst : idx.anchored_all(v, t)) {
        EXPECT_EQ(inst.nodes[0], v);
        EXPECT_EQ(inst.motif, t);
        auto s = inst.nodes;
        std::sort(s.begin(), s.end());
        EXPECT_TRUE(want[t].count(s));
        EXPECT_TRUE(anchored.insert(s).second);
      }
      std::size_t expected = 0;
      for (const auto& s : want[t]) expected += std::count(s.begin(), s.end(), v);
      EXPECT_EQ(anchored.size(), expected);
    }
  }
}

Graph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (NodeId l = 1; l <= leaves; ++l) e.push_back({0, l});
  return Graph::build(leaves + 1, e, false);
}

Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b) e.push_back({a, b});
  return Graph::build(n, e, false);
}

std::size_t motif_id(const MotifCatalog& cat, const std::string& name) {
  for (std::size_t t = 0; t < cat.size(); ++t)
    if (cat[t].name == name) return t;
  throw std::runtime_error("no motif " + name);
}

Schema dblp_schema() {
  return Schema::from_json(nlohmann::json::parse(R"({
    "directed": false,
    "node_types": ["A", "P", "V"],
    "edge_types": [{"name": "writes", "src": "A", "dst": "P"},
                   {"name": "published", "src": "P", "dst": "V"},
                   {"name": "cites", "src": "P", "dst": "P"}]})"));
}

}  // namespace

TEST(CanonicalCode, WedgeRelabeling) {
  Triad abc, cba;
  abc.cell[0][1] = abc.cell[1][0] = abc.cell[1][2] = abc.cell[2][1] = 1;
  cba.cell[2][1] = cba.cell[1][2] = cba.cell[1][0] = cba.cell[0][1] = 1;
  Triad other;  // same wedge centered on slot 0
  other.cell[0][1] = other.cell[1][0] = other.cell[0][2] = other.cell[2][0] = 1;
  EXPECT_EQ(canonical_code(abc), canonical_code(cba));
  EXPECT_EQ(canonical_code(abc), canonical_code(other));
}

TEST(CanonicalCode, WedgeVsTriangle) {
  auto cat = builtin_catalog(false);
  EXPECT_NE(cat[0].code, cat[1].code);
}

TEST(CanonicalCode, DirectedCyclePermutations) {
  std::array<int, 3> p{0, 1, 2};
  std::set<CanonicalCode> codes;
  do {
    Triad t;
    t.directed = true;
    t.cell[p[0]][p[1]] = t.cell[p[1]][p[2]] = t.cell[p[2]][p[0]] = 1;
    codes.insert(canonical_code(t));
  } while (std::next_permutation(p.begin(), p.end()));
  EXPECT_EQ(codes.size(), 1u);
}

TEST(CanonicalCode, AgreesWithIsomorphismOnAllTypedTriads) {
  // Exhaustive over undirected triads with 2 node types and 2 edge types.
  std::vector<Triad> all;
  for (int types = 0; types < 8; ++types)
    for (int cells = 0; cells < 27; ++cells) {
      Triad t;
      for (int i = 0; i < 3; ++i) t.types[i] = static_cast<TypeId>((types >> i) & 1);
      int c = cells;
      const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
      for (auto [i, j] : pairs) {
        t.cell[i][j] = t.cell[j][i] = static_cast<std::uint8_t>(c % 3);
        c /= 3;
      }
      all.push_back(t);
    }
  auto as_pattern = [](const Triad& t) {
    Pattern p;
    for (int i = 0; i < 3; ++i) {
      p.types[i] = t.types[i];
      for (int j = 0; j < 3; ++j) p.cell[i][j] = t.cell[i][j];
    }
    return p;
  };
  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = a; b < all.size(); b += 7)
      EXPECT_EQ(canonical_code(all[a]) == canonical_code(all[b]),
                isomorphic(as_pattern(all[a]), as_pattern(all[b])));
}

TEST(BuiltinCatalog, Undirected) {
  auto cat = builtin_catalog(false);
  ASSERT_EQ(cat.size(), 2u);
  EXPECT_EQ(cat[0].name, "wedge");
  EXPECT_EQ(cat[1].name, "triangle");
}

TEST(BuiltinCatalog, DirectedFullMatchesExhaustiveEnumeration) {
  // All 2^6 arc sets on 3 labeled nodes, weakly connected, grouped by isomorphism.
  const std::array<std::pair<int, int>, 6> arcs{{{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}};
  std::vector<Pattern> classes;
  for (int mask = 0; mask < 64; ++mask) {
    Pattern p;
    for (int b = 0; b < 6; ++b)
      if (mask & (1 << b)) p.cell[arcs[b].first][arcs[b].second] = 1;
    if (!weakly_connected(p.cell)) continue;
    if (std::none_of(classes.begin(), classes.end(), [&](const Pattern& q) { return isomorphic(p, q); }))
      classes.push_back(p);
  }
  ASSERT_EQ(classes.size(), 13u);
  auto cat = builtin_catalog(true, DirectedCatalog::kFull);
  ASSERT_EQ(cat.size(), 13u);
  for (const auto& cls : classes) {
    int hits = 0;
    for (const auto& m : cat.motifs()) hits += isomorphic(cls, pattern_of(m)) ? 1 : 0;
    EXPECT_EQ(hits, 1);
  }
}

TEST(BuiltinCatalog, DirectedReciprocalFreeSubset) {
  auto cat = builtin_catalog(true, DirectedCatalog::kPaper);
  ASSERT_EQ(cat.size(), 5u);
  std::set<std::string> names;
  for (const auto& m : cat.motifs()) {
    names.insert(m.name);
    auto t = m.triad();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_FALSE(t.cell[i][j] && t.cell[j][i]) << m.name;
  }
  EXPECT_EQ(names, (std::set<std::string>{"021D", "021U", "021C", "030T", "030C"}));
  // Out-star, in-star, path, feed-forward loop, cycle.
  Pattern cycle;
  cycle.cell[0][1] = cycle.cell[1][2] = cycle.cell[2][0] = 1;
  EXPECT_TRUE(isomorphic(cycle, pattern_of(cat[motif_id(cat, "030C")])));
  Pattern ffl;
  ffl.cell[0][1] = ffl.cell[1][2] = ffl.cell[0][2] = 1;
  EXPECT_TRUE(isomorphic(ffl, pattern_of(cat[motif_id(cat, "030T")])));
  Pattern out_star;
  out_star.cell[0][1] = out_star.cell[0][2] = 1;
  EXPECT_TRUE(isomorphic(out_star, pattern_of(cat[motif_id(cat, "021D")])));
}

TEST(MotifSpec, RejectsDisconnectedPattern) {
  EXPECT_THROW(MotifSpec::make("x", false, {{0, 1}}), ConfigError);
  EXPECT_THROW(MotifSpec::make("x", false, {{0, 0}, {0, 1}}), ConfigError);
}

TEST(TypedCatalog, SingleTypeIsVacuous) {
  for (bool directed : {false, true}) {
    Schema s;
    s.directed = directed;
    s.node_types = {"N"};
    s.edge_types = {{"e", 0, 0}};
    auto base = builtin_catalog(directed);
    EXPECT_EQ(typed_catalog(s, base).size(), base.size());
  }
}

TEST(TypedCatalog, Dblp) {
  auto s = dblp_schema();
  auto cat = typed_catalog(s, builtin_catalog(false));
  const auto a = *s.node_type_id("A"), p = *s.node_type_id("P"), v = *s.node_type_id("V");
  Pattern apv;  // A - P - V
  apv.types = {a, p, v};
  apv.cell[0][1] = apv.cell[1][0] = 1 + *s.edge_type_between(a, p);
  apv.cell[1][2] = apv.cell[2][1] = 1 + *s.edge_type_between(p, v);
  bool found = false;
  for (const auto& m : cat.motifs()) {
    found = found || isomorphic(apv, pattern_of(m));
    auto t = m.triad();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (!t.cell[i][j]) continue;
        std::set<TypeId> ends{t.types[i], t.types[j]};
        EXPECT_NE(ends, (std::set<TypeId>{a, v})) << m.name;
        EXPECT_NE(ends, (std::set<TypeId>{a})) << m.name;
        EXPECT_NE(ends, (std::set<TypeId>{v})) << m.name;
      }
  }
  EXPECT_TRUE(found);
}

TEST(TypedCatalog, StarSchemaMatchesTypingOracle) {
  for (bool directed : {false, true}) {
    Schema s;
    s.directed = directed;
    s.node_types = {"hub", "leaf"};
    s.edge_types = {{"spoke", 0, 1}};
    auto base = builtin_catalog(directed);
    std::vector<Pattern> want;
    for (const auto& m : base.motifs()) {
      auto bp = pattern_of(m);
      for (int mask = 0; mask < 8; ++mask) {
        Pattern p = bp;
        for (int i = 0; i < 3; ++i) p.types[i] = (mask >> i) & 1;
        bool ok = true;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            if (p.cell[i][j]) {
              bool permitted = (p.types[i] == 0 && p.types[j] == 1) ||
                               (!directed && p.types[i] == 1 && p.types[j] == 0);
              ok = ok && permitted;
            }
        if (ok && std::none_of(want.begin(), want.end(), [&](const Pattern& q) { return isomorphic(p, q); }))
          want.push_back(p);
      }
    }
    auto cat = typed_catalog(s, base);
    ASSERT_EQ(cat.size(), want.size()) << "directed=" << directed;
    for (const auto& m : cat.motifs())
      EXPECT_EQ(std::count_if(want.begin(), want.end(),
                              [&](const Pattern& q) { return isomorphic(q, pattern_of(m)); }),
                1);
  }
}

TEST(TypedCatalog, EmptySchemaIsError) {
  EXPECT_THROW(typed_catalog(Schema{}, builtin_catalog(false)), ConfigError);
}

TEST(BuildIndex, TriangleIsInduced) {
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(complete(3), cat);
  for (NodeId v = 0; v < 3; ++v) {
    EXPECT_EQ(idx.count(v, motif_id(cat, "triangle")), 1u);
    EXPECT_EQ(idx.count(v, motif_id(cat, "wedge")), 0u);
  }
}

TEST(BuildIndex, Star) {
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(star(3), cat);
  const auto w = motif_id(cat, "wedge");
  EXPECT_EQ(idx.count(0, w), 3u);
  for (NodeId l = 1; l <= 3; ++l) EXPECT_EQ(idx.count(l, w), 2u);
  expect_index_matches_oracle(star(3), cat);
}

TEST(BuildIndex, K4) {
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(complete(4), cat);
  const auto t = motif_id(cat, "triangle");
  EXPECT_EQ(idx.total(t), 4u);
  for (NodeId v = 0; v < 4; ++v) EXPECT_EQ(idx.count(v, t), 3u);
}

TEST(BuildIndex, EmptyCatalogIsError) {
  EXPECT_THROW(MotifIndex::build(complete(3), MotifCatalog{}), ConfigError);
}

TEST(BuildIndex, OracleEquivalenceUndirected) {
  auto cat = builtin_catalog(false);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto n = 4 + seed % 9;
    expect_index_matches_oracle(testutil::random_graph(n, 0.15 + 0.05 * (seed % 8), false, seed), cat);
  }
}

TEST(BuildIndex, OracleEquivalenceDirected) {
  for (auto variant : {DirectedCatalog::kFull, DirectedCatalog::kPaper}) {
    auto cat = builtin_catalog(true, variant);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto n = 4 + seed % 9;
      expect_index_matches_oracle(testutil::random_graph(n, 0.1 + 0.05 * (seed % 8), true, seed), cat);
    }
  }
}

TEST(BuildIndex, UndirectedCatalogOnDirectedGraph) {
  auto cat = builtin_catalog(false);
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    expect_index_matches_oracle(testutil::random_graph(10, 0.25, true, seed), cat);
}

TEST(BuildIndex, OracleEquivalenceTyped) {
  auto s = dblp_schema();
  auto cat = typed_catalog(s, builtin_catalog(false));
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 12;
    std::vector<TypeId> types(n);
    std::uniform_int_distribution<int> pick(0, 2);
    for (auto& t : types) t = static_cast<TypeId>(pick(rng));
    auto base = testutil::random_graph(n, 0.3, false, seed);
    // Keep only schema-permitted edges, with edge types from the schema.
    std::vector<Edge> edges;
    std::vector<TypeId> etypes;
    for (auto e : base.edges())
      if (auto et = s.edge_type_between(types[e.src], types[e.dst])) {
        edges.push_back(e);
        etypes.push_back(*et);
      }
    auto typed = Graph::build(n, edges, false, types, etypes);
    expect_index_matches_oracle(typed, cat, &s);
    // Same graph without edge types: types derived from the schema.
    auto derived = Graph::build(n, edges, false, types);
    expect_index_matches_oracle(derived, cat, &s);
    auto idx = MotifIndex::build(typed, cat);
    for (std::size_t t = 0; t < cat.size(); ++t)
      for (const auto& tr : idx.instances(t))
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            if (typed.find_arc(tr[i], tr[j])) {
              EXPECT_TRUE(s.edge_type_between(types[tr[i]], types[tr[j]]).has_value());
            }
          }
  }
}

TEST(BuildIndex, TypedGraphWithForbiddenEdges) {
  auto s = dblp_schema();
  auto cat = typed_catalog(s, builtin_catalog(false));
  // A - V edge is not in the schema: no instance may contain it.
  const TypeId a = 0, p = 1, v = 2;
  auto g = Graph::build(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}, false, {a, p, v});
  auto idx = MotifIndex::build(g, cat);
  for (std::size_t t = 0; t < cat.size(); ++t) EXPECT_EQ(idx.total(t), 0u);
  expect_index_matches_oracle(g, cat, &s);
}

TEST(BuildIndex, TypedCatalogNeedsNodeTypes) {
  auto cat = typed_catalog(dblp_schema(), builtin_catalog(false));
  EXPECT_THROW(MotifIndex::build(complete(3), cat), ConfigError);
}

TEST(BuildIndex, ThreadedMatchesSerial) {
  auto g = testutil::random_graph(200, 0.05, true, 9);
  auto cat = builtin_catalog(true);
  auto one = MotifIndex::build(g, cat, 1);
  auto four = MotifIndex::build(g, cat, 4);
  for (std::size_t t = 0; t < cat.size(); ++t) {
    auto a = one.instances(t);
    auto b = four.instances(t);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
}

TEST(IndexCache, RoundTripAndKeying) {
  TempDir dir;
  auto g = testutil::random_graph(30, 0.2, false, 4);
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(g, cat);
  idx.save(dir.path() / "idx.bin");
  auto back = MotifIndex::load(dir.path() / "idx.bin", g, cat);
  ASSERT_TRUE(back.has_value());
  for (std::size_t t = 0; t < cat.size(); ++t) {
    auto a = idx.instances(t);
    auto b = back->instances(t);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    for (NodeId v = 0; v < g.n_nodes(); ++v) EXPECT_EQ(idx.count(v, t), back->count(v, t));
  }
  auto other = testutil::random_graph(30, 0.2, false, 5);
  EXPECT_FALSE(MotifIndex::load(dir.path() / "idx.bin", other, cat).has_value());
  EXPECT_FALSE(MotifIndex::load(dir.path() / "idx.bin", g, builtin_catalog(true)).has_value());
  EXPECT_FALSE(MotifIndex::load(dir.path() / "missing.bin", g, cat).has_value());
  EXPECT_THROW(MotifIndex::load(dir.file("junk.bin", "garbage"), g, cat), ParseError);
}

TEST(SampleInstances, ClampsToAvailable) {
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(complete(4), cat);
  Rng rng(1);
  auto got = sample_instances(idx, 0, motif_id(cat, "triangle"), 20, rng);
  EXPECT_EQ(got.size(), 3u);
  EXPECT_TRUE(sample_instances(idx, 0, motif_id(cat, "wedge"), 20, rng).empty());
  EXPECT_THROW(sample_instances(idx, 0, 0, 0, rng), ConfigError);
}

TEST(SampleInstances, DistinctWhenMoreThanQ) {
  // A star with 15 leaves: the center anchors C(15,2) = 105 wedges.
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(star(15), cat);
  ASSERT_EQ(idx.count(0, 0), 105u);
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    auto got = sample_instances(idx, 0, 0, 20, rng);
    ASSERT_EQ(got.size(), 20u);
    std::set<Triple> distinct;
    for (const auto& m : got) {
      EXPECT_EQ(m.nodes[0], 0u);
      distinct.insert(m.nodes);
    }
    EXPECT_EQ(distinct.size(), 20u);
  }
}

TEST(SampleInstances, UniformChiSquare) {
  // Center of a 10-leaf star: 45 instances, Q = 5, 1e5 draws.
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(star(10), cat);
  const std::size_t n = idx.count(0, 0), q = 5, draws = 100000;
  std::map<Triple, double> freq;
  Rng rng(3);
  for (std::size_t d = 0; d < draws; ++d)
    for (const auto& m : sample_instances(idx, 0, 0, q, rng)) freq[m.nodes] += 1;
  ASSERT_EQ(freq.size(), n);
  const double expected = static_cast<double>(draws * q) / static_cast<double>(n);
  double chi2 = 0;
  for (const auto& [_, f] : freq) chi2 += (f - expected) * (f - expected) / expected;
  const double dof = static_cast<double>(n - 1);
  EXPECT_LT(std::abs(chi2 - dof), 3 * std::sqrt(2 * dof)) << "chi2=" << chi2;
  // Each instance is included per draw with probability q/n.
  const double pi = static_cast<double>(q) / static_cast<double>(n);
  const double sigma = std::sqrt(static_cast<double>(draws) * pi * (1 - pi));
  for (const auto& [_, f] : freq) EXPECT_LT(std::abs(f - expected), 3 * sigma);
}

TEST(NegativeSample, NeverTheOnlyTriangle) {
  // v = 0 with a single triangle (0,1,2), plus a path tail.
  auto g = Graph::build(8, std::vector<Edge>{{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}},
                        false);
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(g, cat);
  const auto tri = motif_id(cat, "triangle");
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    auto neg = sample_negative_instance(g, idx, 0, tri, rng);
    EXPECT_EQ(neg.instance.nodes[0], 0u);
    auto s = neg.instance.nodes;
    std::sort(s.begin(), s.end());
    EXPECT_NE(s, (Triple{0, 1, 2}));
    EXPECT_FALSE(neg.fallback);
    EXPECT_NE(neg.instance.nodes[1], neg.instance.nodes[2]);
  }
}

TEST(NegativeSample, NeverCollidesWithPositiveSet) {
  auto g = testutil::random_graph(40, 0.2, false, 8);
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(g, cat);
  Rng rng(5);
  for (std::size_t t = 0; t < cat.size(); ++t) {
    NodeId v = 0;
    while (idx.count(v, t) == 0) ++v;
    std::set<Triple> positives;
    for (auto id : idx.ids(v, t)) positives.insert(idx.instances(t)[id]);
    for (int i = 0; i < 10000; ++i) {
      auto neg = sample_negative_instance(g, idx, v, t, rng);
      auto s = neg.instance.nodes;
      std::sort(s.begin(), s.end());
      ASSERT_FALSE(positives.count(s));
    }
  }
}

TEST(NegativeSample, ExhaustionFallbackOnLoneTriangle) {
  auto g = complete(3);
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(g, cat);
  Rng rng(6);
  auto neg = sample_negative_instance(g, idx, 1, motif_id(cat, "triangle"), rng);
  EXPECT_TRUE(neg.fallback);
  EXPECT_EQ(neg.instance.nodes[0], 1u);
  std::set<NodeId> nodes(neg.instance.nodes.begin(), neg.instance.nodes.end());
  EXPECT_EQ(nodes.size(), 3u);
}

TEST(NegativeSample, FallbackPrefersNonNeighbors) {
  // Every random pair around the hub of a dense star forms a wedge, so the
  // retry budget runs out; isolated nodes 9 and 10 are the only non-neighbors.
  std::vector<Edge> e;
  for (NodeId l = 1; l <= 8; ++l) e.push_back({0, l});
  auto g = Graph::build(11, e, false);
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(g, cat);
  Rng rng(7);
  int fallbacks = 0;
  for (int i = 0; i < 200; ++i) {
    auto neg = sample_negative_instance(g, idx, 0, motif_id(cat, "wedge"), rng, 0);
    ASSERT_TRUE(neg.fallback);
    ++fallbacks;
    std::set<NodeId> comp{neg.instance.nodes[1], neg.instance.nodes[2]};
    EXPECT_EQ(comp, (std::set<NodeId>{9, 10}));
  }
  EXPECT_EQ(fallbacks, 200);
}
