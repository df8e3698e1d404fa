#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "infomotif/errors.hpp"
#include "infomotif/graph.hpp"
#include "infomotif/schema.hpp"

namespace infomotif {

/// Byte string identifying a (typed) 3-node pattern up to isomorphism.
using CanonicalCode = std::string;

/// Edge-type cell value for an arc whose type is not allowed by the schema;
/// never produced by a catalog pattern.
inline constexpr std::uint8_t kForbiddenArc = 0xFF;

/// Concrete 3-slot pattern: slot types and, per ordered slot pair, 0 for no
/// arc or 1 + edge type. Undirected triads keep cell symmetric.
struct Triad {
  bool directed = false;
  std::array<TypeId, 3> types{0, 0, 0};
  std::array<std::array<std::uint8_t, 3>, 3> cell{};

  bool weakly_connected() const {
    int pairs = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) pairs += (cell[i][j] || cell[j][i]) ? 1 : 0;
    return pairs >= 2;
  }
};

/// Lexicographic minimum over the 6 slot permutations of
/// (direction flag, slot types, off-diagonal cells).
inline CanonicalCode canonical_code(const Triad& t) {
  static constexpr std::array<std::array<int, 3>, 6> kPerms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  CanonicalCode best;
  CanonicalCode cur(1 + 3 * 2 + 6, '\0');
  for (const auto& p : kPerms) {
    std::size_t k = 0;
    cur[k++] = static_cast<char>(t.directed ? 1 : 0);
    for (int i = 0; i < 3; ++i) {
      cur[k++] = static_cast<char>(t.types[p[i]] >> 8);
      cur[k++] = static_cast<char>(t.types[p[i]] & 0xFF);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) cur[k++] = static_cast<char>(t.cell[p[i]][p[j]]);
    if (best.empty() ||
        std::lexicographical_compare(cur.begin(), cur.end(), best.begin(), best.end(),
                                     [](char a, char b) {
                                       return static_cast<unsigned char>(a) <
                                              static_cast<unsigned char>(b);
                                     }))
      best = cur;
  }
  return best;
}

/// A 3-node network motif, optionally typed.
struct MotifSpec {
  std::string name;
  bool directed = false;
  /// Pattern arcs over slots {0,1,2}; unordered (i < j) when undirected.
  std::vector<std::pair<std::uint8_t, std::uint8_t>> edge_pattern;
  std::optional<std::array<TypeId, 3>> slot_types;
  /// Aligned with edge_pattern when typed.
  std::vector<TypeId> edge_types;
  CanonicalCode code;

  static constexpr std::size_t k = 3;

  bool typed() const noexcept { return slot_types.has_value(); }

  Triad triad() const {
    Triad t;
    t.directed = directed;
    if (slot_types) t.types = *slot_types;
    for (std::size_t e = 0; e < edge_pattern.size(); ++e) {
      auto [i, j] = edge_pattern[e];
      auto v = static_cast<std::uint8_t>(1 + (edge_types.empty() ? 0 : edge_types[e]));
      t.cell[i][j] = v;
      if (!directed) t.cell[j][i] = v;
    }
    return t;
  }

  static MotifSpec make(std::string name, bool directed,
                        std::vector<std::pair<std::uint8_t, std::uint8_t>> pattern,
                        std::optional<std::array<TypeId, 3>> slot_types = std::nullopt,
                        std::vector<TypeId> edge_types = {}) {
    MotifSpec m{std::move(name), directed, std::move(pattern), slot_types,
                std::move(edge_types), {}};
    for (auto& [i, j] : m.edge_pattern) {
      if (i > 2 || j > 2 || i == j) throw ConfigError("motif " + m.name + ": bad slot pair");
      if (!directed && i > j) std::swap(i, j);
    }
    auto t = m.triad();
    if (!t.weakly_connected()) throw ConfigError("motif " + m.name + " is not connected");
    m.code = canonical_code(t);
    return m;
  }
};

/// Ordered motif list plus the code -> index lookup used for classification.
class MotifCatalog {
 public:
  MotifCatalog() = default;
  MotifCatalog(std::vector<MotifSpec> motifs, bool directed, bool typed,
               std::optional<Schema> schema = std::nullopt)
      : motifs_(std::move(motifs)), directed_(directed), typed_(typed),
        schema_(std::move(schema)) {
    for (std::size_t i = 0; i < motifs_.size(); ++i) {
      if (motifs_[i].directed != directed_ || motifs_[i].typed() != typed_)
        throw ConfigError("catalog mixes directed/typed motifs");
      if (!lookup_.emplace(motifs_[i].code, static_cast<std::uint32_t>(i)).second)
        throw ConfigError("catalog holds isomorphic motifs: " + motifs_[i].name);
    }
  }

  std::size_t size() const noexcept { return motifs_.size(); }
  bool empty() const noexcept { return motifs_.empty(); }
  bool directed() const noexcept { return directed_; }
  bool typed() const noexcept { return typed_; }
  const std::optional<Schema>& schema() const noexcept { return schema_; }
  const MotifSpec& operator[](std::size_t i) const { return motifs_[i]; }
  const std::vector<MotifSpec>& motifs() const noexcept { return motifs_; }

  std::optional<std::uint32_t> find(const CanonicalCode& code) const {
    auto it = lookup_.find(code);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  /// Triad induced by nodes (a, b, c) of g, read with this catalog's typing.
  Triad triad_of(const Graph& g, NodeId a, NodeId b, NodeId c) const {
    const std::array<NodeId, 3> s{a, b, c};
    Triad t;
    t.directed = directed_;
    if (typed_)
      for (int i = 0; i < 3; ++i) t.types[i] = g.node_type(s[i]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        if (!directed_ && j < i) {
          t.cell[i][j] = t.cell[j][i];
          continue;
        }
        // Undirected catalogs on directed graphs read the symmetrized adjacency.
        std::optional<std::size_t> e;
        if (directed_ || !g.directed()) {
          e = g.find_arc(s[i], s[j]);
        } else {
          e = g.find_arc(s[i], s[j]);
          if (!e) e = g.find_arc(s[j], s[i]);
        }
        if (!e) continue;
        t.cell[i][j] = typed_ ? arc_cell(g, *e, s[i], s[j]) : 1;
      }
    return t;
  }

  std::optional<std::uint32_t> classify(const Graph& g, NodeId a, NodeId b, NodeId c) const {
    return find(canonical_code(triad_of(g, a, b, c)));
  }

 private:
  std::uint8_t arc_cell(const Graph& g, std::size_t edge, NodeId u, NodeId w) const {
    if (g.has_edge_types()) return static_cast<std::uint8_t>(1 + g.edge_types()[edge]);
    if (!schema_) return 1;
    auto et = schema_->edge_type_between(g.node_type(u), g.node_type(w));
    return et ? static_cast<std::uint8_t>(1 + *et) : kForbiddenArc;
  }

  std::vector<MotifSpec> motifs_;
  bool directed_ = false;
  bool typed_ = false;
  std::optional<Schema> schema_;
  std::unordered_map<CanonicalCode, std::uint32_t> lookup_;
};

enum class DirectedCatalog {
  kFull,   ///< all 13 weakly-connected 3-node digraphs
  kPaper,  ///< the 5 without reciprocal arcs (out-star, in-star, path, feed-forward, cycle)
};

/// Built-in untyped catalogs. Directed motifs carry triad-census (MAN) names.
inline MotifCatalog builtin_catalog(bool directed, DirectedCatalog variant = DirectedCatalog::kFull) {
  using P = std::vector<std::pair<std::uint8_t, std::uint8_t>>;
  std::vector<MotifSpec> m;
  if (!directed) {
    m.push_back(MotifSpec::make("wedge", false, P{{0, 1}, {0, 2}}));
    m.push_back(MotifSpec::make("triangle", false, P{{0, 1}, {0, 2}, {1, 2}}));
    return MotifCatalog(std::move(m), false, false);
  }
  m.push_back(MotifSpec::make("021D", true, P{{1, 0}, {1, 2}}));
  m.push_back(MotifSpec::make("021U", true, P{{0, 1}, {2, 1}}));
  m.push_back(MotifSpec::make("021C", true, P{{0, 1}, {1, 2}}));
  if (variant == DirectedCatalog::kFull) {
    m.push_back(MotifSpec::make("111D", true, P{{0, 1}, {1, 0}, {2, 1}}));
    m.push_back(MotifSpec::make("111U", true, P{{0, 1}, {1, 0}, {1, 2}}));
  }
  m.push_back(MotifSpec::make("030T", true, P{{0, 1}, {2, 1}, {0, 2}}));
  m.push_back(MotifSpec::make("030C", true, P{{0, 2}, {2, 1}, {1, 0}}));
  if (variant == DirectedCatalog::kFull) {
    m.push_back(MotifSpec::make("201", true, P{{0, 1}, {1, 0}, {1, 2}, {2, 1}}));
    m.push_back(MotifSpec::make("120D", true, P{{1, 0}, {1, 2}, {0, 2}, {2, 0}}));
    m.push_back(MotifSpec::make("120U", true, P{{0, 1}, {2, 1}, {0, 2}, {2, 0}}));
    m.push_back(MotifSpec::make("120C", true, P{{0, 1}, {1, 2}, {0, 2}, {2, 0}}));
    m.push_back(MotifSpec::make("210", true, P{{0, 1}, {1, 2}, {2, 1}, {0, 2}, {2, 0}}));
    m.push_back(MotifSpec::make("300", true, P{{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}));
  }
  return MotifCatalog(std::move(m), true, false);
}

/// Every assignment of schema node types to the slots of each base motif
/// such that each pattern arc is a permitted schema edge; isomorphic typed
/// patterns are merged (first occurrence kept).
inline MotifCatalog typed_catalog(const Schema& schema, const MotifCatalog& base) {
  if (schema.node_types.empty() || schema.edge_types.empty())
    throw ConfigError("typed_catalog: empty schema");
  schema.validate();
  if (base.typed()) throw ConfigError("typed_catalog: base catalog is already typed");
  const auto nt = static_cast<TypeId>(schema.node_types.size());
  std::vector<MotifSpec> out;
  std::unordered_map<CanonicalCode, bool> seen;
  for (const auto& m : base.motifs()) {
    for (TypeId a = 0; a < nt; ++a)
      for (TypeId b = 0; b < nt; ++b)
        for (TypeId c = 0; c < nt; ++c) {
          const std::array<TypeId, 3> st{a, b, c};
          std::vector<TypeId> etypes;
          bool ok = true;
          for (auto [i, j] : m.edge_pattern) {
            auto et = schema.edge_type_between(st[i], st[j]);
            if (!et) {
              ok = false;
              break;
            }
            etypes.push_back(*et);
          }
          if (!ok) continue;
          std::string name = m.name + "(" + schema.node_types[a] + "," + schema.node_types[b] +
                             "," + schema.node_types[c] + ")";
          auto typed = MotifSpec::make(std::move(name), m.directed, m.edge_pattern, st, etypes);
          if (seen.emplace(typed.code, true).second) out.push_back(std::move(typed));
        }
  }
  if (out.empty()) throw ConfigError("typed_catalog: schema admits no typed motif");
  return MotifCatalog(std::move(out), base.directed(), true, schema);
}

}  // namespace infomotif
