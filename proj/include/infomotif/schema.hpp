#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infomotif/errors.hpp"
#include "infomotif/graph.hpp"

namespace infomotif {

/// Heterogeneous type schema: node-type names and the permitted
/// (src_type, dst_type) edge types. For undirected schemas an edge type
/// permits both orientations.
///
/// JSON form:
///   {"directed": false,
///    "node_types": ["A", "P", "V"],
///    "edge_types": [{"src": "A", "dst": "P"}, {"name": "cites", "src": "P", "dst": "P"}]}
struct Schema {
  struct EdgeType {
    std::string name;
    TypeId src = 0;
    TypeId dst = 0;
  };

  bool directed = false;
  std::vector<std::string> node_types;
  std::vector<EdgeType> edge_types;

  std::optional<TypeId> node_type_id(const std::string& name) const {
    for (std::size_t i = 0; i < node_types.size(); ++i)
      if (node_types[i] == name) return static_cast<TypeId>(i);
    return std::nullopt;
  }

  std::optional<TypeId> edge_type_id(const std::string& name) const {
    for (std::size_t i = 0; i < edge_types.size(); ++i)
      if (edge_types[i].name == name) return static_cast<TypeId>(i);
    return std::nullopt;
  }

  /// Edge type permitted for an arc src_type -> dst_type, if any.
  std::optional<TypeId> edge_type_between(TypeId src, TypeId dst) const {
    for (std::size_t i = 0; i < edge_types.size(); ++i) {
      const auto& e = edge_types[i];
      if ((e.src == src && e.dst == dst) || (!directed && e.src == dst && e.dst == src))
        return static_cast<TypeId>(i);
    }
    return std::nullopt;
  }

  void validate() const {
    if (node_types.empty()) throw ConfigError("schema: no node types");
    if (edge_types.empty()) throw ConfigError("schema: no edge types");
    for (std::size_t i = 0; i < edge_types.size(); ++i) {
      const auto& e = edge_types[i];
      if (e.src >= node_types.size() || e.dst >= node_types.size())
        throw ConfigError("schema: edge type '" + e.name + "' references unknown node type");
      for (std::size_t j = 0; j < i; ++j) {
        const auto& f = edge_types[j];
        bool same = (f.src == e.src && f.dst == e.dst) ||
                    (!directed && f.src == e.dst && f.dst == e.src);
        if (same)
          throw ConfigError("schema: edge types '" + f.name + "' and '" + e.name +
                            "' connect the same node types");
      }
    }
  }

  static Schema from_json(const nlohmann::json& j) {
    Schema s;
    try {
      s.directed = j.value("directed", false);
      for (const auto& t : j.at("node_types")) s.node_types.push_back(t.get<std::string>());
      for (const auto& e : j.at("edge_types")) {
        const auto src = e.at("src").get<std::string>();
        const auto dst = e.at("dst").get<std::string>();
        auto si = s.node_type_id(src), di = s.node_type_id(dst);
        if (!si || !di)
          throw ConfigError("schema: edge type " + src + "-" + dst + " uses an unknown node type");
        s.edge_types.push_back({e.value("name", src + "-" + dst), *si, *di});
      }
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("schema: ") + ex.what());
    }
    s.validate();
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["directed"] = directed;
    j["node_types"] = node_types;
    j["edge_types"] = nlohmann::json::array();
    for (const auto& e : edge_types)
      j["edge_types"].push_back(
          {{"name", e.name}, {"src", node_types[e.src]}, {"dst", node_types[e.dst]}});
    return j;
  }

  static Schema load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open schema file " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path.string() + ": " + ex.what());
    }
    return from_json(j);
  }
};

}  // namespace infomotif
