#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infomotif/config.hpp"
#include "infomotif/eval.hpp"
#include "infomotif/graph_io.hpp"
#include "infomotif/motif_index.hpp"
#include "infomotif/trainer.hpp"

namespace infomotif {

/// Graph, features and labels named by a DataConfig, reduced to the largest
/// component when requested.
struct LoadedDataset {
  Dataset data;
  std::optional<Schema> schema;
  GraphBuildStats stats;
  std::uint64_t graph_hash = 0;
};

inline LoadedDataset load_dataset(const DataConfig& dc) {
  if (dc.edges.empty() || dc.features.empty() || dc.labels.empty())
    throw ConfigError("config: data.edges, data.features and data.labels are required");
  LoadedDataset out;
  GraphLoadOptions opts;
  opts.directed = dc.directed;
  if (!dc.schema.empty()) {
    out.schema = Schema::load(resolve_data_path(dc.schema));
    opts.schema = &*out.schema;
  }
  if (!dc.node_types.empty()) opts.node_types = resolve_data_path(dc.node_types);
  auto loaded = load_graph(resolve_data_path(dc.edges), opts);
  auto features = load_features(resolve_data_path(dc.features), loaded.ids);
  auto labels = load_labels(resolve_data_path(dc.labels), loaded.ids);
  out.stats = loaded.stats;
  if (dc.largest_component) {
    auto lcc = largest_connected_component(loaded.graph, features, labels);
    out.data = {std::move(lcc.graph), std::move(lcc.features), std::move(lcc.labels)};
  } else {
    out.data = {std::move(loaded.graph), std::move(features), std::move(labels)};
  }
  out.graph_hash = content_hash(out.data.graph);
  return out;
}

/// manifest.json: command, config hash, graph hash and the files written.
inline void write_manifest(const std::filesystem::path& dir, const std::string& command,
                           const nlohmann::ordered_json& config, std::optional<std::uint64_t> graph_hash,
                           const std::vector<std::string>& artifacts) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash(config);
  if (graph_hash) j["graph_hash"] = hex64(*graph_hash);
  j["artifacts"] = artifacts;
  write_json(dir / "manifest.json", j);
}

struct TrainOutcome {
  ArmReport report;
  std::vector<std::string> artifacts;
};

/// Trains every configured seed, writing checkpoint_seed<S>.bin per seed,
/// report.json (deterministic), timing.json and manifest.json under out.
inline TrainOutcome run_train(const RunConfig& cfg, const std::filesystem::path& out, unsigned threads = 1,
                              std::ostream* log = nullptr) {
  std::filesystem::create_directories(out);
  auto ds = load_dataset(cfg.data);
  const auto& data = ds.data;
  std::optional<MotifIndex> index;
  if (cfg.train.use_motifs)
    index = MotifIndex::build(data.graph, make_catalog(cfg.catalog, ds.schema ? &*ds.schema : nullptr), threads);

  TrainOutcome outcome;
  std::vector<double> acc;
  std::vector<std::int32_t> labels(data.labels.raw().begin(), data.labels.raw().end());
  nlohmann::ordered_json timing = nlohmann::ordered_json::array();
  for (auto seed : cfg.train.seeds) {
    auto split = make_splits(data.labels, cfg.data.train_ratio, cfg.data.val_ratio, seed);
    Trainer<float> trainer(data.graph, data.features, labels, data.labels.num_classes(), std::move(split),
                           index ? &*index : nullptr, cfg.train);
    auto fit = trainer.run(seed);
    const auto ckpt = "checkpoint_seed" + std::to_string(seed) + ".bin";
    fit.checkpoint.save(out / ckpt);
    outcome.artifacts.push_back(ckpt);
    if (log)
      *log << "seed " << seed << ": lr " << fit.result.lr << ", best epoch " << fit.result.best_epoch << ", val "
           << fit.result.val_acc << ", test " << fit.result.test_acc << '\n';
    timing.push_back({{"seed", seed}, {"timing", to_json(fit.result, true)["timing"]}});
    acc.push_back(fit.result.test_acc);
    outcome.report.runs.push_back(std::move(fit.result));
  }
  outcome.report.test_acc = summarize(acc);

  const auto config = to_json(cfg);
  nlohmann::ordered_json report;
  report["config"] = config;
  report["graph_hash"] = hex64(ds.graph_hash);
  report["nodes"] = data.graph.n_nodes();
  report["edges"] = data.graph.n_edges();
  report["result"] = to_json(outcome.report, false);
  write_json(out / "report.json", report);
  write_json(out / "timing.json", timing);
  write_csv(out / "runs.csv", outcome.report);
  outcome.artifacts.insert(outcome.artifacts.end(), {"report.json", "timing.json", "runs.csv"});
  write_manifest(out, "train", config, ds.graph_hash, outcome.artifacts);
  return outcome;
}

struct EvalOutcome {
  double test_acc = 0;
  BinnedReport degree, label_fraction, diversity;
};

/// Restores a checkpoint on the configured data, recreates its split from the
/// checkpoint seed and writes eval.json plus one CSV per breakdown.
inline EvalOutcome run_eval(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                            const std::filesystem::path& out, unsigned threads = 1) {
  std::filesystem::create_directories(out);
  auto ckpt = Checkpoint<float>::load(checkpoint);
  nlohmann::ordered_json saved;
  try {
    saved = nlohmann::ordered_json::parse(ckpt.config);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(checkpoint.string() + ": bad config record: " + e.what());
  }
  auto train_cfg = ConfigBuilder().merge(saved).build().train;
  train_cfg.lr_grid = {ckpt.lr};
  train_cfg.seeds = {ckpt.seed};

  auto ds = load_dataset(cfg.data);
  const auto& data = ds.data;
  std::optional<MotifIndex> index;
  if (train_cfg.use_motifs)
    index = MotifIndex::build(data.graph, make_catalog(cfg.catalog, ds.schema ? &*ds.schema : nullptr), threads);
  auto split = make_splits(data.labels, cfg.data.train_ratio, cfg.data.val_ratio, ckpt.seed);
  std::vector<std::int32_t> labels(data.labels.raw().begin(), data.labels.raw().end());
  Trainer<float> trainer(data.graph, data.features, labels, data.labels.num_classes(), split,
                         index ? &*index : nullptr, train_cfg);
  auto model = trainer.make_model(ckpt.seed);
  ckpt.restore(model);
  auto preds = argmax_rows(predict(model, trainer.operators(), trainer.features()).probabilities);

  EvalOutcome r;
  r.test_acc = accuracy(preds, labels, split.test);
  r.degree = degree_report(data.graph, split.test, preds, labels);
  r.label_fraction = label_fraction_report(data.graph, split, preds, labels);
  r.diversity = attribute_diversity_report(data.graph, data.features, split.test, preds, labels);
  write_csv(out / "degree.csv", r.degree);
  write_csv(out / "label_fraction.csv", r.label_fraction);
  write_csv(out / "attribute_diversity.csv", r.diversity);
  nlohmann::ordered_json j;
  j["checkpoint"] = checkpoint.filename().string();
  j["seed"] = ckpt.seed;
  j["epoch"] = ckpt.epoch;
  j["test_acc"] = r.test_acc;
  j["reports"] = {to_json(r.degree), to_json(r.label_fraction), to_json(r.diversity)};
  write_json(out / "eval.json", j);
  write_manifest(out, "eval", to_json(cfg), ds.graph_hash,
                 {"eval.json", "degree.csv", "label_fraction.csv", "attribute_diversity.csv"});
  return r;
}

/// Writes a planted-role dataset (edges.txt, features.csv, labels.txt) and a
/// matching config.json for the benchmark settings.
inline void write_planted_role(const PlantedRoleBenchmark& b, std::uint64_t seed, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  auto d = planted_role_graph(b.data, seed);
  save_graph(out / "edges.txt", d.graph);
  save_features(out / "features.csv", d.features);
  save_labels(out / "labels.txt", d.labels);
  RunConfig cfg;
  cfg.train = benchmark_config(b);
  cfg.train.seeds = {seed};
  cfg.data.edges = (out / "edges.txt").string();
  cfg.data.features = (out / "features.csv").string();
  cfg.data.labels = (out / "labels.txt").string();
  cfg.data.largest_component = false;
  cfg.data.train_ratio = b.train_ratio;
  cfg.data.val_ratio = b.val_ratio;
  write_json(out / "config.json", to_json(cfg));
}

}  // namespace infomotif
