#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "infomotif/errors.hpp"
#include "infomotif/rng.hpp"

namespace infomotif {

using NodeId = std::uint32_t;
using TypeId = std::uint16_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct GraphBuildStats {
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
};

/// Immutable sparse graph. Undirected graphs keep each edge once in edges()
/// and symmetric neighbor lists; directed graphs keep out- and in-lists.
/// neighbors() is always the symmetrized (undirected) adjacency.
class Graph {
 public:
  Graph() = default;

  /// Validates ids, drops self-loops, removes duplicate edges (first wins,
  /// including its edge type). Type vectors may be empty (untyped).
  static Graph build(std::size_t n_nodes, std::span<const Edge> edges,
                     bool directed, std::vector<TypeId> node_types = {},
                     std::vector<TypeId> edge_types = {},
                     GraphBuildStats* stats = nullptr) {
    if (!node_types.empty() && node_types.size() != n_nodes)
      throw ConfigError("node type map must cover every node");
    if (!edge_types.empty() && edge_types.size() != edges.size())
      throw ConfigError("edge type map must cover every edge");

    Graph g;
    g.n_ = n_nodes;
    g.directed_ = directed;
    g.node_types_ = std::move(node_types);

    GraphBuildStats local;
    std::vector<std::pair<std::uint64_t, std::size_t>> keys;
    keys.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto [s, d] = edges[i];
      if (s >= n_nodes || d >= n_nodes)
        throw BoundsError("edge (" + std::to_string(s) + "," +
                          std::to_string(d) + ") references node >= " +
                          std::to_string(n_nodes));
      if (s == d) {
        ++local.self_loops;
        continue;
      }
      NodeId a = s, b = d;
      if (!directed && a > b) std::swap(a, b);
      keys.emplace_back((std::uint64_t{a} << 32) | b, i);
    }
    // Stable sort keeps the first occurrence of each key in front.
    std::stable_sort(keys.begin(), keys.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::size_t> kept;
    kept.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i > 0 && keys[i].first == keys[i - 1].first) {
        ++local.duplicates;
        continue;
      }
      kept.push_back(keys[i].second);
    }
    std::sort(kept.begin(), kept.end());  // restore input order
    g.edges_.reserve(kept.size());
    for (std::size_t idx : kept) {
      g.edges_.push_back(edges[idx]);
      if (!edge_types.empty()) g.edge_types_.push_back(edge_types[idx]);
    }
    if (stats) *stats = local;
    g.build_adjacency();
    return g;
  }

  std::size_t n_nodes() const noexcept { return n_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  bool has_node_types() const noexcept { return !node_types_.empty(); }
  bool has_edge_types() const noexcept { return !edge_types_.empty(); }
  std::span<const TypeId> node_types() const noexcept { return node_types_; }
  std::span<const TypeId> edge_types() const noexcept { return edge_types_; }
  TypeId node_type(NodeId v) const { return node_types_.empty() ? 0 : node_types_[v]; }

  /// Out-neighbors (sorted). Equal to neighbors() for undirected graphs.
  std::span<const NodeId> out_neighbors(NodeId v) const {
    return directed_ ? slice(out_off_, out_, v) : slice(nbr_off_, nbr_, v);
  }
  std::span<const NodeId> in_neighbors(NodeId v) const {
    return directed_ ? slice(in_off_, in_, v) : slice(nbr_off_, nbr_, v);
  }
  /// Symmetrized neighbor set (sorted, unique).
  std::span<const NodeId> neighbors(NodeId v) const { return slice(nbr_off_, nbr_, v); }
  std::size_t degree(NodeId v) const { return nbr_off_[v + 1] - nbr_off_[v]; }

  /// Index into edges() of the arc u->w (or the undirected edge {u,w}).
  std::optional<std::size_t> find_arc(NodeId u, NodeId w) const {
    const auto& off = directed_ ? out_off_ : nbr_off_;
    const auto& adj = directed_ ? out_ : nbr_;
    const auto& eid = directed_ ? out_eid_ : nbr_eid_;
    auto first = adj.begin() + static_cast<std::ptrdiff_t>(off[u]);
    auto last = adj.begin() + static_cast<std::ptrdiff_t>(off[u + 1]);
    auto it = std::lower_bound(first, last, w);
    if (it == last || *it != w) return std::nullopt;
    return eid[static_cast<std::size_t>(it - adj.begin())];
  }
  bool has_arc(NodeId u, NodeId w) const { return find_arc(u, w).has_value(); }
  bool adjacent(NodeId u, NodeId w) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), w);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.directed_ == b.directed_ && a.edges_ == b.edges_ &&
           a.node_types_ == b.node_types_ && a.edge_types_ == b.edge_types_;
  }

 private:
  static std::span<const NodeId> slice(const std::vector<std::size_t>& off,
                                       const std::vector<NodeId>& adj, NodeId v) {
    return {adj.data() + off[v], off[v + 1] - off[v]};
  }

  static void fill_csr(std::size_t n,
                       std::vector<std::pair<NodeId, std::pair<NodeId, std::uint32_t>>>& arcs,
                       std::vector<std::size_t>& off, std::vector<NodeId>& adj,
                       std::vector<std::uint32_t>& eid, bool dedupe) {
    std::sort(arcs.begin(), arcs.end());
    if (dedupe)
      arcs.erase(std::unique(arcs.begin(), arcs.end(),
                             [](const auto& x, const auto& y) {
                               return x.first == y.first && x.second.first == y.second.first;
                             }),
                 arcs.end());
    off.assign(n + 1, 0);
    for (const auto& a : arcs) ++off[a.first + 1];
    std::partial_sum(off.begin(), off.end(), off.begin());
    adj.resize(arcs.size());
    eid.resize(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      adj[i] = arcs[i].second.first;
      eid[i] = arcs[i].second.second;
    }
  }

  void build_adjacency() {
    using Arc = std::pair<NodeId, std::pair<NodeId, std::uint32_t>>;
    std::vector<Arc> sym;
    sym.reserve(edges_.size() * 2);
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
      sym.push_back({edges_[i].src, {edges_[i].dst, i}});
      sym.push_back({edges_[i].dst, {edges_[i].src, i}});
    }
    // Mutual arcs in a directed graph collapse to one symmetrized neighbor.
    fill_csr(n_, sym, nbr_off_, nbr_, nbr_eid_, directed_);
    if (directed_) {
      std::vector<Arc> out, in;
      out.reserve(edges_.size());
      in.reserve(edges_.size());
      for (std::uint32_t i = 0; i < edges_.size(); ++i) {
        out.push_back({edges_[i].src, {edges_[i].dst, i}});
        in.push_back({edges_[i].dst, {edges_[i].src, i}});
      }
      fill_csr(n_, out, out_off_, out_, out_eid_, false);
      fill_csr(n_, in, in_off_, in_, in_eid_, false);
    }
  }

  std::size_t n_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::vector<TypeId> node_types_;
  std::vector<TypeId> edge_types_;
  std::vector<std::size_t> nbr_off_{0}, out_off_, in_off_;
  std::vector<NodeId> nbr_, out_, in_;
  std::vector<std::uint32_t> nbr_eid_, out_eid_, in_eid_;
};

/// Node attribute matrix X (n_nodes x F), row-major.
class FeatureMatrix {
 public:
  using Storage = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  FeatureMatrix() = default;
  explicit FeatureMatrix(Storage values) : values_(std::move(values)) {
    if (!values_.allFinite()) throw NumericError("feature matrix contains non-finite values");
  }
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : values_(Storage::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))) {}

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Storage& values() const noexcept { return values_; }
  float operator()(std::size_t r, std::size_t c) const {
    return values_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  /// Rows gathered in the given order.
  FeatureMatrix select_rows(std::span<const NodeId> ids) const {
    Storage out(static_cast<Eigen::Index>(ids.size()), values_.cols());
    for (std::size_t i = 0; i < ids.size(); ++i)
      out.row(static_cast<Eigen::Index>(i)) = values_.row(ids[i]);
    return FeatureMatrix(std::move(out));
  }

 private:
  Storage values_;
};

inline constexpr std::int32_t kUnlabeled = -1;

/// Partial labeling: label(v) in [0, C) or kUnlabeled.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::vector<std::int32_t> labels, std::size_t num_classes)
      : labels_(std::move(labels)), num_classes_(num_classes) {
    bool any = false;
    for (auto y : labels_) {
      if (y == kUnlabeled) continue;
      if (y < 0 || static_cast<std::size_t>(y) >= num_classes_)
        throw BoundsError("class id " + std::to_string(y) + " outside [0, " +
                          std::to_string(num_classes_) + ")");
      any = true;
    }
    if (!any) throw ConfigError("label set has no labeled node");
  }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::int32_t operator[](NodeId v) const { return labels_[v]; }
  bool labeled(NodeId v) const { return labels_[v] != kUnlabeled; }
  std::span<const std::int32_t> raw() const noexcept { return labels_; }

  std::vector<NodeId> labeled_nodes() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < labels_.size(); ++v)
      if (labeled(v)) out.push_back(v);
    return out;
  }

  LabelSet select(std::span<const NodeId> ids) const {
    std::vector<std::int32_t> out;
    out.reserve(ids.size());
    for (auto v : ids) out.push_back(labels_[v]);
    return LabelSet(std::move(out), num_classes_);
  }

 private:
  std::vector<std::int32_t> labels_;
  std::size_t num_classes_ = 0;
};

struct Split {
  std::vector<NodeId> train, val, test;
  std::uint64_t seed = 0;
};

/// Uniform random partition of the labeled nodes, deterministic per seed.
inline Split make_splits(const LabelSet& labels, double train_ratio, double val_ratio,
                         std::uint64_t seed) {
  if (!(train_ratio > 0.0) || !(val_ratio > 0.0) || !(train_ratio + val_ratio < 1.0))
    throw ConfigError("split ratios must be > 0 with sum < 1");
  auto nodes = labels.labeled_nodes();
  auto rng = substream(seed, "split");
  std::shuffle(nodes.begin(), nodes.end(), rng);
  const auto total = static_cast<double>(nodes.size());
  const auto n_train = static_cast<std::size_t>(std::llround(train_ratio * total));
  const auto n_val = static_cast<std::size_t>(std::llround(val_ratio * total));
  if (n_train == 0 || n_train + n_val >= nodes.size())
    throw ConfigError("split ratios leave an empty train or test set");
  Split s;
  s.seed = seed;
  s.train.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(nodes.begin() + static_cast<std::ptrdiff_t>(n_train),
               nodes.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(nodes.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), nodes.end());
  for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
  return s;
}

/// All nodes within k undirected hops of any seed (seeds included), sorted.
inline std::vector<NodeId> khop_neighborhood(const Graph& g, std::span<const NodeId> seeds,
                                             std::size_t k) {
  std::vector<std::int64_t> dist(g.n_nodes(), -1);
  std::deque<NodeId> frontier;
  for (auto s : seeds) {
    if (s >= g.n_nodes()) throw BoundsError("seed node out of range");
    if (dist[s] < 0) {
      dist[s] = 0;
      frontier.push_back(s);
    }
  }
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop_front();
    if (static_cast<std::size_t>(dist[v]) == k) continue;
    for (NodeId u : g.neighbors(v)) {
      if (dist[u] >= 0) continue;
      dist[u] = dist[v] + 1;
      frontier.push_back(u);
    }
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.n_nodes(); ++v)
    if (dist[v] >= 0) out.push_back(v);
  return out;
}

/// Weakly-connected component id per node; components numbered by their
/// smallest node id.
inline std::vector<std::uint32_t> connected_components(const Graph& g,
                                                       std::size_t* count = nullptr) {
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> comp(g.n_nodes(), kNone);
  std::uint32_t next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.n_nodes(); ++s) {
    if (comp[s] != kNone) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId u : g.neighbors(v))
        if (comp[u] == kNone) {
          comp[u] = next;
          stack.push_back(u);
        }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

/// Induced subgraph on `keep` (sorted ascending); node i of the result is
/// keep[i]. Edge order and types are preserved.
inline Graph induced_subgraph(const Graph& g, std::span<const NodeId> keep) {
  constexpr auto kNone = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> remap(g.n_nodes(), kNone);
  for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<NodeId>(i);
  std::vector<Edge> edges;
  std::vector<TypeId> etypes;
  for (std::size_t i = 0; i < g.n_edges(); ++i) {
    const auto e = g.edges()[i];
    if (remap[e.src] == kNone || remap[e.dst] == kNone) continue;
    edges.push_back({remap[e.src], remap[e.dst]});
    if (g.has_edge_types()) etypes.push_back(g.edge_types()[i]);
  }
  std::vector<TypeId> ntypes;
  if (g.has_node_types())
    for (auto v : keep) ntypes.push_back(g.node_type(v));
  return Graph::build(keep.size(), edges, g.directed(), std::move(ntypes), std::move(etypes));
}

struct ComponentSelection {
  Graph graph;
  FeatureMatrix features;
  LabelSet labels;
  std::vector<NodeId> original_ids;  ///< new id -> id in the input graph
};

/// Restricts graph, features and labels to the largest weakly-connected
/// component; ties go to the component holding the lowest node id.
inline ComponentSelection largest_connected_component(const Graph& g,
                                                      const FeatureMatrix& features,
                                                      const LabelSet& labels) {
  if (g.n_nodes() == 0) throw ConfigError("largest_connected_component: empty graph");
  if (features.rows() != g.n_nodes() || labels.size() != g.n_nodes())
    throw ShapeError("features/labels must have one row per node");
  std::size_t count = 0;
  auto comp = connected_components(g, &count);
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  const auto best = static_cast<std::uint32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> keep;
  for (NodeId v = 0; v < g.n_nodes(); ++v)
    if (comp[v] == best) keep.push_back(v);
  ComponentSelection out{induced_subgraph(g, keep), features.select_rows(keep),
                         labels.select(keep), keep};
  return out;
}

/// 64-bit FNV-1a over node count, direction, edges and type maps.
inline std::uint64_t content_hash(const Graph& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  mix(g.n_nodes());
  mix(g.directed() ? 1 : 0);
  for (auto e : g.edges()) mix((std::uint64_t{e.src} << 32) | e.dst);
  mix(g.node_types().size());
  for (auto t : g.node_types()) mix(t);
  mix(g.edge_types().size());
  for (auto t : g.edge_types()) mix(t);
  return h;
}

}  // namespace infomotif
