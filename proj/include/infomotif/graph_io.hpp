#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infomotif/errors.hpp"
#include "infomotif/graph.hpp"
#include "infomotif/schema.hpp"

namespace infomotif {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string where(const std::filesystem::path& p, std::size_t line) {
  return p.string() + ":" + std::to_string(line) + ": ";
}

inline std::uint64_t parse_id(std::string_view tok, const std::filesystem::path& p,
                              std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range)
    throw BoundsError(where(p, line) + "node id '" + std::string(tok) + "' overflows");
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(where(p, line) + "expected a non-negative integer node id, got '" +
                     std::string(tok) + "'");
  if (v >= std::numeric_limits<NodeId>::max())
    throw BoundsError(where(p, line) + "node id '" + std::string(tok) + "' overflows");
  return v;
}

inline double parse_real(std::string_view tok, const std::filesystem::path& p,
                         std::size_t line) {
  // from_chars for floating point is not available in every libstdc++.
  std::string s(tok);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError(where(p, line) + "expected a number, got '" + s + "'");
  if (!std::isfinite(v)) throw ParseError(where(p, line) + "non-finite value '" + s + "'");
  return v;
}

inline std::ifstream open(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open " + p.string());
  return in;
}

inline std::string_view strip_comment(std::string_view line) {
  auto pos = line.find('#');
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

/// Name -> id with optional fixed vocabulary (from a schema).
struct Vocabulary {
  std::vector<std::string> names;
  bool fixed = false;

  TypeId lookup(std::string_view tok, const std::filesystem::path& p, std::size_t line) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == tok) return static_cast<TypeId>(i);
    if (fixed)
      throw ParseError(where(p, line) + "type '" + std::string(tok) + "' not in schema");
    names.emplace_back(tok);
    return static_cast<TypeId>(names.size() - 1);
  }
};

}  // namespace detail

/// Original file id -> dense node id (first-appearance order).
class NodeIdMap {
 public:
  NodeId intern(std::uint64_t original) {
    auto [it, inserted] = map_.try_emplace(original, static_cast<NodeId>(originals_.size()));
    if (inserted) originals_.push_back(original);
    return it->second;
  }
  std::optional<NodeId> find(std::uint64_t original) const {
    auto it = map_.find(original);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t size() const noexcept { return originals_.size(); }
  std::uint64_t original(NodeId v) const { return originals_[v]; }

 private:
  std::unordered_map<std::uint64_t, NodeId> map_;
  std::vector<std::uint64_t> originals_;
};

namespace detail {
/// "#@ types K" registers type names "0".."K-1" in order, so numeric type
/// columns written by save_graph()/save_node_types() keep their ids.
inline void seed_vocabulary(Vocabulary& vocab, std::string_view rest,
                            const std::filesystem::path& p, std::size_t line) {
  auto toks = split_ws(rest);
  if (toks.size() != 1) throw ParseError(where(p, line) + "bad directive");
  if (vocab.fixed) return;  // schema names take precedence
  auto k = parse_id(toks[0], p, line);
  if (!vocab.names.empty()) throw ParseError(where(p, line) + "types directive after data");
  for (std::uint64_t i = 0; i < k; ++i) vocab.names.push_back(std::to_string(i));
}
}  // namespace detail

struct GraphLoadOptions {
  bool directed = false;
  std::optional<std::filesystem::path> node_types;  ///< "node type" per line
  const Schema* schema = nullptr;  ///< fixes type vocabularies when given
};

struct LoadedGraph {
  Graph graph;
  NodeIdMap ids;
  GraphBuildStats stats;
  std::vector<std::string> node_type_names;
  std::vector<std::string> edge_type_names;
};

/// Reads a whitespace edge list "src dst [edge_type]" with '#' comments.
/// Dense ids follow first appearance. A leading directive line
/// "#@ nodes N" pre-registers ids 0..N-1 in order (written by save_graph so
/// that isolated nodes and id order survive a round trip).
inline LoadedGraph load_graph(const std::filesystem::path& edge_list,
                              const GraphLoadOptions& opts = {}) {
  auto in = detail::open(edge_list);
  LoadedGraph out;
  detail::Vocabulary etypes, ntypes;
  if (opts.schema) {
    for (const auto& e : opts.schema->edge_types) etypes.names.push_back(e.name);
    ntypes.names = opts.schema->node_types;
    etypes.fixed = ntypes.fixed = true;
  }
  std::vector<Edge> edges;
  std::vector<TypeId> edge_type_ids;
  std::optional<bool> typed_rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    if (sv.rfind("#@ nodes", 0) == 0) {
      auto toks = detail::split_ws(sv.substr(8));
      if (toks.size() != 1) throw ParseError(detail::where(edge_list, lineno) + "bad directive");
      auto n = detail::parse_id(toks[0], edge_list, lineno);
      for (std::uint64_t v = 0; v < n; ++v) out.ids.intern(v);
      continue;
    }
    if (sv.rfind("#@ types", 0) == 0) {
      seed_vocabulary(etypes, sv.substr(8), edge_list, lineno);
      continue;
    }
    auto toks = detail::split_ws(detail::strip_comment(sv));
    if (toks.empty()) continue;
    if (toks.size() != 2 && toks.size() != 3)
      throw ParseError(detail::where(edge_list, lineno) + "expected 'src dst [edge_type]'");
    const bool typed = toks.size() == 3;
    if (typed_rows && *typed_rows != typed)
      throw ParseError(detail::where(edge_list, lineno) + "edge type column present on some rows only");
    typed_rows = typed;
    auto s = out.ids.intern(detail::parse_id(toks[0], edge_list, lineno));
    auto d = out.ids.intern(detail::parse_id(toks[1], edge_list, lineno));
    edges.push_back({s, d});
    if (typed) edge_type_ids.push_back(etypes.lookup(toks[2], edge_list, lineno));
  }

  std::vector<TypeId> node_type_ids;
  if (opts.node_types) {
    auto tin = detail::open(*opts.node_types);
    node_type_ids.assign(out.ids.size(), 0);
    std::vector<bool> seen(out.ids.size(), false);
    lineno = 0;
    while (std::getline(tin, line)) {
      ++lineno;
      if (line.rfind("#@ types", 0) == 0) {
        seed_vocabulary(ntypes, std::string_view(line).substr(8), *opts.node_types, lineno);
        continue;
      }
      auto toks = detail::split_ws(detail::strip_comment(line));
      if (toks.empty()) continue;
      if (toks.size() != 2)
        throw ParseError(detail::where(*opts.node_types, lineno) + "expected 'node type'");
      auto v = out.ids.find(detail::parse_id(toks[0], *opts.node_types, lineno));
      if (!v) continue;  // node absent from the edge list
      node_type_ids[*v] = ntypes.lookup(toks[1], *opts.node_types, lineno);
      seen[*v] = true;
    }
    for (std::size_t v = 0; v < seen.size(); ++v)
      if (!seen[v])
        throw ParseError(opts.node_types->string() + ": node " +
                         std::to_string(out.ids.original(static_cast<NodeId>(v))) +
                         " has no type");
  }
  out.graph = Graph::build(out.ids.size(), edges, opts.directed, std::move(node_type_ids),
                           std::move(edge_type_ids), &out.stats);
  out.node_type_names = ntypes.names;
  out.edge_type_names = etypes.names;
  return out;
}

/// Writes the graph with dense ids; load_graph() of the result reproduces it.
inline void save_graph(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "#@ nodes " << g.n_nodes() << "\n";
  if (g.has_edge_types()) {
    std::size_t k = 0;
    for (auto t : g.edge_types()) k = std::max<std::size_t>(k, t + 1u);
    out << "#@ types " << k << "\n";
  }
  for (std::size_t i = 0; i < g.n_edges(); ++i) {
    out << g.edges()[i].src << ' ' << g.edges()[i].dst;
    if (g.has_edge_types()) out << ' ' << g.edge_types()[i];
    out << '\n';
  }
}

/// Features as dense CSV (row i belongs to original id i) or sparse triplets
/// "node col value". Format is chosen by the presence of a comma. Rows for
/// ids absent from the graph are ignored; nodes without a row are zero.
inline FeatureMatrix load_features(const std::filesystem::path& path, const NodeIdMap& ids) {
  auto in = detail::open(path);
  std::string line;
  std::vector<std::string> lines;
  bool csv = false;
  while (std::getline(in, line)) {
    if (line.find(',') != std::string::npos) csv = true;
    lines.push_back(std::move(line));
  }
  struct Entry {
    NodeId node;
    std::size_t col;
    float value;
  };
  std::vector<Entry> entries;
  std::size_t cols = 0;
  std::uint64_t row = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string_view sv = detail::strip_comment(lines[li]);
    if (csv) {
      if (detail::split_ws(sv).empty()) continue;
      std::vector<std::string_view> fields;
      std::size_t start = 0;
      while (true) {
        auto pos = sv.find(',', start);
        fields.push_back(sv.substr(start, pos == std::string_view::npos ? sv.npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
      }
      if (cols == 0) cols = fields.size();
      if (fields.size() != cols)
        throw ParseError(detail::where(path, li + 1) + "expected " + std::to_string(cols) +
                         " columns, got " + std::to_string(fields.size()));
      auto v = ids.find(row++);
      if (!v) continue;
      for (std::size_t c = 0; c < fields.size(); ++c) {
        auto toks = detail::split_ws(fields[c]);
        if (toks.size() != 1) throw ParseError(detail::where(path, li + 1) + "empty field");
        entries.push_back({*v, c, static_cast<float>(detail::parse_real(toks[0], path, li + 1))});
      }
    } else {
      auto toks = detail::split_ws(sv);
      if (toks.empty()) continue;
      if (toks.size() != 3)
        throw ParseError(detail::where(path, li + 1) + "expected 'node col value'");
      auto node = detail::parse_id(toks[0], path, li + 1);
      auto col = detail::parse_id(toks[1], path, li + 1);
      auto value = detail::parse_real(toks[2], path, li + 1);
      cols = std::max<std::size_t>(cols, col + 1);
      if (auto v = ids.find(node)) entries.push_back({*v, col, static_cast<float>(value)});
    }
  }
  FeatureMatrix::Storage x = FeatureMatrix::Storage::Zero(
      static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(cols));
  for (const auto& e : entries)
    x(e.node, static_cast<Eigen::Index>(e.col)) = e.value;
  return FeatureMatrix(std::move(x));
}

/// Labels "node class" with integer classes; C = max class + 1.
inline LabelSet load_labels(const std::filesystem::path& path, const NodeIdMap& ids) {
  auto in = detail::open(path);
  std::vector<std::int32_t> labels(ids.size(), kUnlabeled);
  std::size_t num_classes = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(detail::strip_comment(line));
    if (toks.empty()) continue;
    if (toks.size() != 2) throw ParseError(detail::where(path, lineno) + "expected 'node class'");
    auto node = detail::parse_id(toks[0], path, lineno);
    auto cls = detail::parse_id(toks[1], path, lineno);
    if (cls > 1'000'000) throw BoundsError(detail::where(path, lineno) + "class id too large");
    num_classes = std::max<std::size_t>(num_classes, cls + 1);
    if (auto v = ids.find(node)) labels[*v] = static_cast<std::int32_t>(cls);
  }
  return LabelSet(std::move(labels), num_classes);
}

inline void save_features(const std::filesystem::path& path, const FeatureMatrix& x) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out.precision(9);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out << (c ? "," : "") << x(r, c);
    out << '\n';
  }
}

inline void save_labels(const std::filesystem::path& path, const LabelSet& y) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  for (NodeId v = 0; v < y.size(); ++v)
    if (y.labeled(v)) out << v << ' ' << y[v] << '\n';
}

inline void save_node_types(const std::filesystem::path& path, const Graph& g,
                            std::span<const std::string> names) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  if (names.empty()) {
    std::size_t k = 0;
    for (auto t : g.node_types()) k = std::max<std::size_t>(k, t + 1u);
    out << "#@ types " << k << "\n";
  }
  for (NodeId v = 0; v < g.n_nodes(); ++v)
    out << v << ' ' << (names.empty() ? std::to_string(g.node_type(v)) : names[g.node_type(v)])
        << '\n';
}

}  // namespace infomotif
