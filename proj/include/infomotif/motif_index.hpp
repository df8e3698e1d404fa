#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "infomotif/errors.hpp"
#include "infomotif/graph.hpp"
#include "infomotif/motif.hpp"
#include "infomotif/rng.hpp"

namespace infomotif {

using Triple = std::array<NodeId, 3>;

struct MotifInstance {
  Triple nodes;  ///< anchor first
  std::uint32_t motif = 0;

  friend bool operator==(const MotifInstance&, const MotifInstance&) = default;
};

/// Every induced instance of every catalog motif, reachable per (node, motif).
/// Immutable after construction.
class MotifIndex {
 public:
  MotifIndex() = default;

  static MotifIndex build(const Graph& g, const MotifCatalog& catalog, unsigned threads = 1);

  std::size_t n_nodes() const noexcept { return n_; }
  std::size_t n_motifs() const noexcept { return sets_.size(); }
  const MotifCatalog& catalog() const noexcept { return catalog_; }
  std::uint64_t graph_hash() const noexcept { return graph_hash_; }

  /// Distinct instance node-sets of motif t, each sorted ascending.
  std::span<const Triple> instances(std::size_t t) const { return sets_.at(t); }
  std::size_t total(std::size_t t) const { return sets_.at(t).size(); }

  /// Ids (into instances(t)) of the instances containing v.
  std::span<const std::uint32_t> ids(NodeId v, std::size_t t) const {
    check(v, t);
    const auto& off = offsets_[t];
    return {ids_[t].data() + off[v], off[v + 1] - off[v]};
  }
  std::size_t count(NodeId v, std::size_t t) const { return ids(v, t).size(); }

  /// i-th instance of t containing v, reordered so that v comes first.
  MotifInstance anchored(NodeId v, std::size_t t, std::size_t i) const {
    auto id = ids(v, t)[i];
    return anchor(sets_[t][id], v, t);
  }

  std::vector<MotifInstance> anchored_all(NodeId v, std::size_t t) const {
    std::vector<MotifInstance> out;
    for (auto id : ids(v, t)) out.push_back(anchor(sets_[t][id], v, t));
    return out;
  }

  /// Binary cache; load returns nullopt when the file belongs to another
  /// graph or catalog.
  void save(const std::filesystem::path& path) const;
  static std::optional<MotifIndex> load(const std::filesystem::path& path, const Graph& g,
                                        const MotifCatalog& catalog);

 private:
  static MotifInstance anchor(const Triple& s, NodeId v, std::size_t t) {
    MotifInstance m{s, static_cast<std::uint32_t>(t)};
    auto it = std::find(m.nodes.begin(), m.nodes.end(), v);
    std::iter_swap(m.nodes.begin(), it);
    if (m.nodes[1] > m.nodes[2]) std::swap(m.nodes[1], m.nodes[2]);
    return m;
  }
  void check(NodeId v, std::size_t t) const {
    if (t >= sets_.size()) throw BoundsError("motif id out of range");
    if (v >= n_) throw BoundsError("node id out of range");
  }
  void finalize();

  std::size_t n_ = 0;
  std::uint64_t graph_hash_ = 0;
  MotifCatalog catalog_;
  std::vector<std::vector<Triple>> sets_;
  std::vector<std::vector<std::size_t>> offsets_;
  std::vector<std::vector<std::uint32_t>> ids_;
};

namespace detail {

// Triples whose minimum present pair is an edge {u, w} with u in [lo, hi).
inline void enumerate_range(const Graph& g, const MotifCatalog& cat, NodeId lo, NodeId hi,
                            std::vector<std::vector<Triple>>& out) {
  using Pair = std::pair<NodeId, NodeId>;
  auto pair_of = [](NodeId a, NodeId b) { return a < b ? Pair{a, b} : Pair{b, a}; };
  for (NodeId u = lo; u < hi; ++u) {
    auto nu = g.neighbors(u);
    for (NodeId w : nu) {
      if (w <= u) continue;
      auto nw = g.neighbors(w);
      const Pair base{u, w};
      auto visit = [&](NodeId x, bool ux, bool wx) {
        if (x == u || x == w) return;
        if (ux && pair_of(u, x) < base) return;
        if (wx && pair_of(w, x) < base) return;
        if (auto t = cat.classify(g, u, w, x)) {
          Triple s{u, w, x};
          std::sort(s.begin(), s.end());
          out[*t].push_back(s);
        }
      };
      std::size_t i = 0, j = 0;
      while (i < nu.size() || j < nw.size()) {
        if (j == nw.size() || (i < nu.size() && nu[i] < nw[j])) {
          visit(nu[i++], true, false);
        } else if (i == nu.size() || nw[j] < nu[i]) {
          visit(nw[j++], false, true);
        } else {
          visit(nu[i], true, true);
          ++i;
          ++j;
        }
      }
    }
  }
}

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ParseError("truncated binary file");
  return v;
}

inline std::uint64_t catalog_hash(const MotifCatalog& cat) {
  std::uint64_t h = fnv1a64(cat.directed() ? "d" : "u");
  for (const auto& m : cat.motifs()) h = fnv1a64(m.code, fnv1a64(m.name, h));
  return h;
}

constexpr char kIndexMagic[4] = {'I', 'M', 'I', 'X'};
constexpr std::uint32_t kIndexVersion = 1;

}  // namespace detail

inline MotifIndex MotifIndex::build(const Graph& g, const MotifCatalog& catalog, unsigned threads) {
  if (catalog.empty()) throw ConfigError("build_index: empty catalog");
  if (catalog.typed() && !g.has_node_types())
    throw ConfigError("build_index: typed catalog requires node types");
  MotifIndex idx;
  idx.n_ = g.n_nodes();
  idx.graph_hash_ = content_hash(g);
  idx.catalog_ = catalog;
  const auto n = static_cast<NodeId>(g.n_nodes());
  threads = std::max(1u, std::min<unsigned>(threads, std::max<NodeId>(1, n)));
  std::vector<std::vector<std::vector<Triple>>> parts(
      threads, std::vector<std::vector<Triple>>(catalog.size()));
  if (threads == 1) {
    detail::enumerate_range(g, catalog, 0, n, parts[0]);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned p = 0; p < threads; ++p) {
      auto lo = static_cast<NodeId>(std::uint64_t{n} * p / threads);
      auto hi = static_cast<NodeId>(std::uint64_t{n} * (p + 1) / threads);
      pool.emplace_back([&, lo, hi, p] { detail::enumerate_range(g, catalog, lo, hi, parts[p]); });
    }
  }
  idx.sets_.assign(catalog.size(), {});
  for (std::size_t t = 0; t < catalog.size(); ++t) {
    for (auto& part : parts) idx.sets_[t].insert(idx.sets_[t].end(), part[t].begin(), part[t].end());
    std::sort(idx.sets_[t].begin(), idx.sets_[t].end());
  }
  idx.finalize();
  return idx;
}

inline void MotifIndex::finalize() {
  offsets_.assign(sets_.size(), {});
  ids_.assign(sets_.size(), {});
  for (std::size_t t = 0; t < sets_.size(); ++t) {
    auto& off = offsets_[t];
    off.assign(n_ + 1, 0);
    for (const auto& s : sets_[t])
      for (auto v : s) ++off[v + 1];
    for (std::size_t v = 0; v < n_; ++v) off[v + 1] += off[v];
    ids_[t].resize(off[n_]);
    auto cursor = off;
    for (std::size_t i = 0; i < sets_[t].size(); ++i)
      for (auto v : sets_[t][i]) ids_[t][cursor[v]++] = static_cast<std::uint32_t>(i);
  }
}

inline void MotifIndex::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot write " + path.string());
  os.write(detail::kIndexMagic, 4);
  detail::write_pod(os, detail::kIndexVersion);
  detail::write_pod(os, graph_hash_);
  detail::write_pod(os, detail::catalog_hash(catalog_));
  detail::write_pod(os, static_cast<std::uint64_t>(n_));
  detail::write_pod(os, static_cast<std::uint64_t>(sets_.size()));
  for (const auto& s : sets_) {
    detail::write_pod(os, static_cast<std::uint64_t>(s.size()));
    os.write(reinterpret_cast<const char*>(s.data()),
             static_cast<std::streamsize>(s.size() * sizeof(Triple)));
  }
  if (!os) throw ParseError("write failed: " + path.string());
}

inline std::optional<MotifIndex> MotifIndex::load(const std::filesystem::path& path,
                                                  const Graph& g, const MotifCatalog& catalog) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, detail::kIndexMagic, 4) != 0) throw ParseError("not an index cache");
  if (detail::read_pod<std::uint32_t>(is) != detail::kIndexVersion) return std::nullopt;
  const auto gh = detail::read_pod<std::uint64_t>(is);
  const auto ch = detail::read_pod<std::uint64_t>(is);
  if (gh != content_hash(g) || ch != detail::catalog_hash(catalog)) return std::nullopt;
  MotifIndex idx;
  idx.n_ = detail::read_pod<std::uint64_t>(is);
  idx.graph_hash_ = gh;
  idx.catalog_ = catalog;
  const auto m = detail::read_pod<std::uint64_t>(is);
  if (idx.n_ != g.n_nodes() || m != catalog.size()) throw ParseError("index cache is inconsistent");
  idx.sets_.resize(m);
  for (auto& s : idx.sets_) {
    s.resize(detail::read_pod<std::uint64_t>(is));
    is.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(Triple)));
    if (!is) throw ParseError("truncated index cache");
    for (const auto& tr : s)
      for (auto v : tr)
        if (v >= idx.n_) throw ParseError("index cache node id out of range");
  }
  idx.finalize();
  return idx;
}

/// Up to Q distinct instances of t containing v, uniform without replacement.
inline std::vector<MotifInstance> sample_instances(const MotifIndex& index, NodeId v,
                                                   std::size_t t, std::size_t q, Rng& rng) {
  if (q == 0) throw ConfigError("sample_instances: Q must be >= 1");
  const auto n = index.count(v, t);
  std::vector<MotifInstance> out;
  if (n <= q) {
    out = index.anchored_all(v, t);
    return out;
  }
  // Floyd's algorithm: q draws, no rejection.
  std::vector<std::size_t> chosen;
  chosen.reserve(q);
  std::unordered_set<std::size_t> taken;
  for (std::size_t j = n - q; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    auto r = pick(rng);
    if (!taken.insert(r).second) {
      taken.insert(j);
      r = j;
    }
    chosen.push_back(r);
  }
  out.reserve(q);
  for (auto i : chosen) out.push_back(index.anchored(v, t, i));
  return out;
}

struct NegativeSample {
  MotifInstance instance;
  bool fallback = false;  ///< retry budget exhausted
};

inline constexpr int kNegativeRetries = 50;

/// Triple (v, u, w) whose node set is not an instance of t; only the
/// companions' attributes are used downstream.
inline NegativeSample sample_negative_instance(const Graph& g, const MotifIndex& index, NodeId v,
                                               std::size_t t, Rng& rng,
                                               int retries = kNegativeRetries) {
  const auto n = static_cast<NodeId>(g.n_nodes());
  if (v >= n) throw BoundsError("node id out of range");
  if (t >= index.n_motifs()) throw BoundsError("motif id out of range");
  const auto motif = static_cast<std::uint32_t>(t);
  if (n >= 3) {
    std::uniform_int_distribution<NodeId> pick(0, n - 2);
    auto other = [&] {
      auto x = pick(rng);
      return x >= v ? x + 1 : x;
    };
    for (int r = 0; r < retries; ++r) {
      auto a = other();
      auto b = other();
      if (a == b) continue;
      if (index.catalog().classify(g, v, a, b) != std::optional<std::uint32_t>(motif))
        return {{{v, a, b}, motif}, false};
    }
  }
  // Exhausted: prefer two distinct non-neighbors of v, else any two others.
  std::vector<NodeId> pool;
  auto nb = g.neighbors(v);
  for (NodeId x = 0; x < n; ++x)
    if (x != v && !std::binary_search(nb.begin(), nb.end(), x)) pool.push_back(x);
  if (pool.size() < 2) {
    pool.clear();
    for (NodeId x = 0; x < n; ++x)
      if (x != v) pool.push_back(x);
  }
  if (pool.size() < 2) throw StateError("negative sampling needs at least 3 nodes");
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  auto a = pick(rng);
  auto b = pick(rng);
  while (b == a) b = pick(rng);
  return {{{v, pool[a], pool[b]}, motif}, true};
}

}  // namespace infomotif
