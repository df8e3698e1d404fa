#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "infomotif/errors.hpp"
#include "infomotif/graph.hpp"
#include "infomotif/rng.hpp"

namespace infomotif {

/// Two-class benchmark where an anchor's class is visible only in which of two
/// attribute patterns sits inside its triangles. A pattern is a set of topics;
/// a planted node carries one topic drawn from its pattern as a one-hot
/// column. Every anchor has the same degree and the same multiset of neighbor
/// patterns: triangle companions carry the class pattern, pendant neighbors
/// carry the other one.
struct PlantedRoleConfig {
  std::size_t anchors_per_class = 100;
  std::size_t triangles_per_anchor = 1;
  std::size_t topics_per_pattern = 16;
  std::size_t noise_dims = 0;     ///< pure-noise columns
  double pattern_strength = 1.0;
  double noise = 0.1;             ///< Gaussian std added to every entry
  std::size_t filler_links = 2;   ///< random filler-filler edges per filler

  void validate() const {
    if (anchors_per_class == 0 || triangles_per_anchor == 0 || topics_per_pattern == 0)
      throw ConfigError("planted-role: counts must be >= 1");
    if (!(noise >= 0.0) || !(pattern_strength > 0.0)) throw ConfigError("planted-role: bad noise or strength");
  }
};

struct PlantedRoleData {
  Graph graph;
  FeatureMatrix features;
  LabelSet labels;  ///< anchors labeled 0/1, all other nodes unlabeled
  std::vector<NodeId> anchors;
};

/// Per anchor v of class c and each of its k triangles: companions a, b with
/// pattern c close the triangle (v, a, b); pendants l1, l2 with pattern 1 - c
/// hang off v, each continued by a filler with a topic from either pattern, so
/// that companions and pendants both have degree 2 inside the gadget. Fillers
/// are wired to random other fillers, which connects the gadgets. Anchors
/// carry noise only.
inline PlantedRoleData planted_role_graph(const PlantedRoleConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  auto rng = substream(seed, "planted-role");
  const std::size_t k = cfg.triangles_per_anchor;
  const std::size_t per_anchor = 1 + 6 * k;
  const std::size_t n_anchor = 2 * cfg.anchors_per_class;
  const std::size_t n = n_anchor * per_anchor;
  const std::size_t topics = cfg.topics_per_pattern;
  const std::size_t f = 2 * topics + cfg.noise_dims;

  std::vector<std::int32_t> cls(n_anchor);
  for (std::size_t i = 0; i < n_anchor; ++i) cls[i] = static_cast<std::int32_t>(i % 2);
  std::shuffle(cls.begin(), cls.end(), rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  FeatureMatrix::Storage x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(cfg.noise * gauss(rng));
  std::uniform_int_distribution<std::size_t> topic(0, topics - 1);
  auto stamp = [&](NodeId v, int pattern) {
    const auto col = static_cast<std::size_t>(pattern) * topics + topic(rng);
    x(v, static_cast<Eigen::Index>(col)) += static_cast<float>(cfg.pattern_strength);
  };
  std::bernoulli_distribution coin(0.5);

  std::vector<Edge> edges;
  std::vector<std::int32_t> labels(n, kUnlabeled);
  std::vector<NodeId> anchors, fillers;
  NodeId next = 0;
  for (std::size_t i = 0; i < n_anchor; ++i) {
    const NodeId v = next++;
    anchors.push_back(v);
    labels[v] = cls[i];
    for (std::size_t t = 0; t < k; ++t) {
      const NodeId a = next++, b = next++, l1 = next++, l2 = next++, f1 = next++, f2 = next++;
      stamp(a, cls[i]);
      stamp(b, cls[i]);
      stamp(l1, 1 - cls[i]);
      stamp(l2, 1 - cls[i]);
      stamp(f1, coin(rng) ? 1 : 0);
      stamp(f2, coin(rng) ? 1 : 0);
      edges.insert(edges.end(), {{v, a}, {v, b}, {a, b}, {v, l1}, {v, l2}, {l1, f1}, {l2, f2}});
      fillers.push_back(f1);
      fillers.push_back(f2);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, fillers.size() - 1);
  for (auto u : fillers)
    for (std::size_t j = 0; j < cfg.filler_links; ++j) {
      auto w = fillers[pick(rng)];
      if (w != u) edges.push_back({u, w});
    }
  return {Graph::build(n, edges, false), FeatureMatrix(std::move(x)), LabelSet(std::move(labels), 2), std::move(anchors)};
}

/// Benchmark settings for comparing the base and motif-regularized GCN: one
/// topic per pattern, noisy features and a 5% training split, so that labels
/// are scarce and the class signal sits two hops away inside triangles.
struct PlantedRoleBenchmark {
  PlantedRoleConfig data;
  double train_ratio = 0.05;
  double val_ratio = 0.2;
  std::size_t hidden = 32;
  double dropout = 0.5;
  double lr = 0.01;
  std::size_t q = 20;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  PlantedRoleBenchmark() {
    data.anchors_per_class = 100;
    data.triangles_per_anchor = 2;
    data.topics_per_pattern = 1;
    data.noise = 0.5;
  }
};

}  // namespace infomotif
