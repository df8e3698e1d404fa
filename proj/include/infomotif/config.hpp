#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infomotif/errors.hpp"
#include "infomotif/motif.hpp"
#include "infomotif/rng.hpp"
#include "infomotif/schema.hpp"
#include "infomotif/trainer.hpp"

namespace infomotif {

/// Input files and split ratios. Empty paths mean "not given".
struct DataConfig {
  std::string edges;
  std::string features;
  std::string labels;
  std::string node_types;
  std::string schema;
  bool directed = false;
  bool largest_component = true;
  double train_ratio = 0.4;
  double val_ratio = 0.1;
};

/// Everything a train or eval run reads from its config file.
struct RunConfig {
  TrainConfig train;
  DataConfig data;
  std::string catalog = "undirected";  ///< undirected | directed-full | directed-paper
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  auto j = to_json(c.train);
  j["data.edges"] = c.data.edges;
  j["data.features"] = c.data.features;
  j["data.labels"] = c.data.labels;
  j["data.node_types"] = c.data.node_types;
  j["data.schema"] = c.data.schema;
  j["data.directed"] = c.data.directed;
  j["data.largest_component"] = c.data.largest_component;
  j["data.train_ratio"] = c.data.train_ratio;
  j["data.val_ratio"] = c.data.val_ratio;
  j["motifs.catalog"] = c.catalog;
  return j;
}

namespace detail {

inline bool same_kind(const nlohmann::ordered_json& a, const nlohmann::ordered_json& b) {
  if (a.is_number() && b.is_number()) return !(a.is_number_integer() && b.is_number_float());
  return a.type() == b.type();
}

inline Arch parse_arch(const std::string& s) {
  if (s == "gcn") return Arch::kGcn;
  if (s == "gat") return Arch::kGat;
  throw ConfigError("config: gnn.arch must be gcn or gat, got '" + s + "'");
}

inline RunConfig decode(const nlohmann::ordered_json& j) {
  RunConfig c;
  try {
    c.train.gnn.arch = parse_arch(j.at("gnn.arch").get<std::string>());
    c.train.gnn.layers = j.at("gnn.layers").get<int>();
    c.train.gnn.hidden = j.at("gnn.hidden").get<std::size_t>();
    c.train.gnn.heads = j.at("gnn.heads").get<std::size_t>();
    c.train.gnn.dropout = j.at("gnn.dropout").get<double>();
    c.train.gnn.out_dim = j.at("gnn.out_dim").get<std::size_t>();
    c.train.q = j.at("train.q").get<std::size_t>();
    c.train.max_epochs = j.at("train.max_epochs").get<int>();
    c.train.batch_size = j.at("train.batch_size").get<std::size_t>();
    c.train.lr_grid = j.at("train.lr_grid").get<std::vector<double>>();
    c.train.patience = j.at("train.patience").get<int>();
    c.train.seeds = j.at("train.seeds").get<std::vector<std::uint64_t>>();
    c.train.use_motifs = j.at("train.use_motifs").get<bool>();
    c.train.mi_phase = j.at("train.mi_phase").get<bool>();
    c.data.edges = j.at("data.edges").get<std::string>();
    c.data.features = j.at("data.features").get<std::string>();
    c.data.labels = j.at("data.labels").get<std::string>();
    c.data.node_types = j.at("data.node_types").get<std::string>();
    c.data.schema = j.at("data.schema").get<std::string>();
    c.data.directed = j.at("data.directed").get<bool>();
    c.data.largest_component = j.at("data.largest_component").get<bool>();
    c.data.train_ratio = j.at("data.train_ratio").get<double>();
    c.data.val_ratio = j.at("data.val_ratio").get<double>();
    c.catalog = j.at("motifs.catalog").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.train.validate();
  if (c.catalog != "undirected" && c.catalog != "directed-full" && c.catalog != "directed-paper")
    throw ConfigError("config: unknown motifs.catalog '" + c.catalog + "'");
  if ((c.catalog == "undirected") == c.data.directed)
    throw ConfigError("config: motifs.catalog '" + c.catalog + "' does not match data.directed");
  return c;
}

}  // namespace detail

/// Flat dotted-key object layered over the defaults. Unknown keys and values
/// of the wrong JSON kind are rejected.
class ConfigBuilder {
 public:
  ConfigBuilder() : json_(to_json(RunConfig{})) {}

  ConfigBuilder& merge(const nlohmann::ordered_json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& [key, value] : j.items()) set(key, value);
    return *this;
  }

  ConfigBuilder& merge_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path.string());
    nlohmann::ordered_json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    return merge(j);
  }

  /// "key=value"; the value is read as JSON, or as a string when it is not
  /// valid JSON (so paths need no quoting).
  ConfigBuilder& override_with(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("config: override '" + assignment + "' is not key=value");
    const auto key = assignment.substr(0, eq);
    const auto text = assignment.substr(eq + 1);
    auto value = nlohmann::ordered_json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    return set(key, value);
  }

  ConfigBuilder& set(const std::string& key, const nlohmann::ordered_json& value) {
    if (!json_.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
    auto v = value;
    // A scalar given for a list key is a one-element list.
    if (json_[key].is_array() && !v.is_array()) v = nlohmann::ordered_json::array({v});
    if (!detail::same_kind(json_[key], v) || (v.is_array() && !v.empty() && !json_[key].empty() &&
                                              !detail::same_kind(json_[key].front(), v.front())))
      throw ConfigError("config: key '" + key + "' expects " + std::string(json_[key].type_name()) + ", got " +
                        v.dump());
    json_[key] = std::move(v);
    return *this;
  }

  const nlohmann::ordered_json& json() const noexcept { return json_; }
  RunConfig build() const { return detail::decode(json_); }

 private:
  nlohmann::ordered_json json_;
};

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

/// FNV-1a over the compact serialization, as 16 hex digits.
inline std::string config_hash(const nlohmann::ordered_json& j) { return hex64(fnv1a64(j.dump())); }

/// Relative paths that do not exist under the working directory are looked
/// up under $INFOMOTIF_DATA when it is set.
inline std::filesystem::path resolve_data_path(const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute() || std::filesystem::exists(path)) return path;
  if (const char* root = std::getenv("INFOMOTIF_DATA"); root && *root) {
    auto alt = std::filesystem::path(root) / path;
    if (std::filesystem::exists(alt)) return alt;
  }
  return path;
}

inline MotifCatalog make_catalog(const std::string& name, const Schema* schema = nullptr) {
  MotifCatalog base;
  if (name == "undirected") base = builtin_catalog(false);
  else if (name == "directed-full") base = builtin_catalog(true, DirectedCatalog::kFull);
  else if (name == "directed-paper") base = builtin_catalog(true, DirectedCatalog::kPaper);
  else throw ConfigError("unknown catalog '" + name + "'");
  return schema ? typed_catalog(*schema, base) : base;
}

}  // namespace infomotif
