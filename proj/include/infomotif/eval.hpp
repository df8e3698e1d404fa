#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "infomotif/errors.hpp"
#include "infomotif/graph.hpp"
#include "infomotif/motif_index.hpp"
#include "infomotif/rng.hpp"
#include "infomotif/synthetic.hpp"
#include "infomotif/trainer.hpp"

namespace infomotif {

/// Fraction of nodes in mask whose prediction equals the label.
inline double accuracy(std::span<const std::int32_t> preds, std::span<const std::int32_t> labels,
                       std::span<const NodeId> mask) {
  if (preds.size() != labels.size()) throw ShapeError("accuracy: predictions and labels differ in length");
  if (mask.empty()) throw ConfigError("accuracy: empty node mask");
  std::size_t hit = 0;
  for (auto v : mask) {
    if (v >= preds.size()) throw BoundsError("accuracy: node " + std::to_string(v) + " out of range");
    hit += preds[v] == labels[v];
  }
  return static_cast<double>(hit) / static_cast<double>(mask.size());
}

/// Mean and sample standard deviation; std is absent below two values.
struct Summary {
  double mean = 0;
  std::optional<double> std;
  std::size_t count = 0;
};

inline Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0;
    for (double x : values) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

inline nlohmann::ordered_json to_json(const Summary& s) {
  nlohmann::ordered_json j{{"mean", s.mean}, {"count", s.count}};
  if (s.std) j["std"] = *s.std;
  return j;
}

// ---------------------------------------------------------------------------
// Binned accuracy reports

struct BinRow {
  std::size_t bin = 0;
  double lower = 0;  ///< smallest score in the bin
  double upper = 0;  ///< largest score in the bin
  std::size_t count = 0;
  double accuracy = 0;
};

struct BinnedReport {
  std::string name;
  std::vector<BinRow> rows;
};

/// Sorts nodes by (score, id) and cuts them into `bins` chunks whose sizes
/// differ by at most one. Returns the chunk index of each input position.
inline std::vector<std::size_t> quantile_bins(std::span<const double> score, std::size_t bins) {
  if (bins == 0) throw ConfigError("quantile_bins: bins must be >= 1");
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score[a] < score[b]; });
  std::vector<std::size_t> bin(score.size());
  for (std::size_t r = 0; r < order.size(); ++r) bin[order[r]] = r * bins / order.size();
  return bin;
}

namespace detail {

inline BinnedReport binned_accuracy(std::string name, std::span<const NodeId> nodes, std::span<const double> score,
                                    std::span<const std::size_t> bin, std::size_t bins,
                                    std::span<const std::int32_t> preds, std::span<const std::int32_t> labels) {
  BinnedReport rep{std::move(name), std::vector<BinRow>(bins)};
  std::vector<std::size_t> hit(bins, 0);
  for (std::size_t b = 0; b < bins; ++b) rep.rows[b].bin = b;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& row = rep.rows[bin[i]];
    row.lower = row.count == 0 ? score[i] : std::min(row.lower, score[i]);
    row.upper = row.count == 0 ? score[i] : std::max(row.upper, score[i]);
    ++row.count;
    hit[bin[i]] += preds[nodes[i]] == labels[nodes[i]];
  }
  for (std::size_t b = 0; b < bins; ++b)
    if (rep.rows[b].count) rep.rows[b].accuracy = static_cast<double>(hit[b]) / static_cast<double>(rep.rows[b].count);
  return rep;
}

inline void check_report_inputs(const Graph& g, std::span<const NodeId> test, std::span<const std::int32_t> preds,
                                std::span<const std::int32_t> labels) {
  if (preds.size() != g.n_nodes() || labels.size() != g.n_nodes())
    throw ShapeError("report: predictions/labels must cover all " + std::to_string(g.n_nodes()) + " nodes");
  if (test.empty()) throw ConfigError("report: empty test set");
  for (auto v : test)
    if (v >= g.n_nodes()) throw BoundsError("report: node " + std::to_string(v) + " out of range");
}

}  // namespace detail

/// Accuracy per degree bin. Without explicit edges the bins are quartiles of
/// the test-node degrees; with edges e_0 < ... < e_k, bin i holds degrees in
/// [e_i, e_{i+1}) and the last bin is closed.
inline BinnedReport degree_report(const Graph& g, std::span<const NodeId> test, std::span<const std::int32_t> preds,
                                  std::span<const std::int32_t> labels, std::span<const double> edges = {}) {
  detail::check_report_inputs(g, test, preds, labels);
  std::vector<double> deg;
  for (auto v : test) deg.push_back(static_cast<double>(g.degree(v)));
  if (edges.empty())
    return detail::binned_accuracy("degree", test, deg, quantile_bins(deg, 4), 4, preds, labels);
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
    throw ConfigError("degree_report: need at least two ascending bin edges");
  const auto bins = edges.size() - 1;
  std::vector<NodeId> kept;
  std::vector<double> kept_deg;
  std::vector<std::size_t> bin;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (deg[i] < edges.front() || deg[i] > edges.back()) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), deg[i]);
    auto b = static_cast<std::size_t>(it - edges.begin());
    kept.push_back(test[i]);
    kept_deg.push_back(deg[i]);
    bin.push_back(std::min(b, bins) - 1);
  }
  return detail::binned_accuracy("degree", kept, kept_deg, bin, bins, preds, labels);
}

/// Share of training nodes among the 2-hop neighbors of v (v excluded);
/// 0 when v has no neighbor.
inline double labeled_fraction(const Graph& g, NodeId v, const std::vector<bool>& is_train) {
  NodeId seed[1] = {v};
  auto hood = khop_neighborhood(g, seed, 2);
  std::size_t total = 0, train = 0;
  for (auto u : hood) {
    if (u == v) continue;
    ++total;
    train += is_train[u];
  }
  return total ? static_cast<double>(train) / static_cast<double>(total) : 0.0;
}

/// Test accuracy per quartile of labeled_fraction; bin 0 holds the smallest.
inline BinnedReport label_fraction_report(const Graph& g, const Split& split, std::span<const std::int32_t> preds,
                                          std::span<const std::int32_t> labels) {
  detail::check_report_inputs(g, split.test, preds, labels);
  std::vector<bool> is_train(g.n_nodes(), false);
  for (auto v : split.train) is_train[v] = true;
  std::vector<double> frac;
  for (auto v : split.test) frac.push_back(labeled_fraction(g, v, is_train));
  return detail::binned_accuracy("label_fraction", split.test, frac, quantile_bins(frac, 4), 4, preds, labels);
}

/// Mean pairwise cosine distance over the 2-hop neighborhood of v (v
/// included). A pair involving a zero vector has distance 0; fewer than two
/// nodes gives 0.
inline double attribute_diversity(const Graph& g, const FeatureMatrix& x, NodeId v) {
  NodeId seed[1] = {v};
  auto hood = khop_neighborhood(g, seed, 2);
  const auto m = hood.size();
  if (m < 2) return 0.0;
  // Over unit rows u_i: sum_{i<j} (1 - u_i.u_j) = P - (|sum u|^2 - k) / 2.
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(x.cols()));
  std::size_t nonzero = 0;
  for (auto u : hood) {
    Eigen::RowVectorXd row = x.values().row(u).cast<double>();
    const double norm = row.norm();
    if (norm == 0.0) continue;
    sum += row / norm;
    ++nonzero;
  }
  const double k = static_cast<double>(nonzero);
  const double dist = k * (k - 1) / 2 - (sum.squaredNorm() - k) / 2;
  return dist / (static_cast<double>(m) * static_cast<double>(m - 1) / 2);
}

/// Test accuracy per quartile of attribute_diversity; bin 0 is least diverse.
inline BinnedReport attribute_diversity_report(const Graph& g, const FeatureMatrix& x, std::span<const NodeId> test,
                                               std::span<const std::int32_t> preds,
                                               std::span<const std::int32_t> labels) {
  detail::check_report_inputs(g, test, preds, labels);
  if (x.rows() != g.n_nodes()) throw ShapeError("attribute_diversity_report: feature rows != nodes");
  std::vector<double> div;
  for (auto v : test) div.push_back(attribute_diversity(g, x, v));
  return detail::binned_accuracy("attribute_diversity", test, div, quantile_bins(div, 4), 4, preds, labels);
}

inline nlohmann::ordered_json to_json(const BinnedReport& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& b : r.rows)
    rows.push_back({{"bin", b.bin}, {"lower", b.lower}, {"upper", b.upper}, {"count", b.count}, {"accuracy", b.accuracy}});
  return {{"name", r.name}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// Multi-seed runs and sweeps

struct Dataset {
  Graph graph;
  FeatureMatrix features;
  LabelSet labels;
};

struct SplitRatios {
  double train = 0.4;
  double val = 0.1;
};

/// One arm (base or motif) trained over every seed in cfg.seeds; the split
/// of each run is drawn from the run's seed.
struct ArmReport {
  std::vector<RunResult> runs;
  Summary test_acc;
};

inline ArmReport run_arm(const Dataset& data, const MotifIndex* index, const TrainConfig& cfg, SplitRatios ratios) {
  cfg.validate();
  ArmReport rep;
  std::vector<double> acc;
  std::vector<std::int32_t> labels(data.labels.raw().begin(), data.labels.raw().end());
  for (auto seed : cfg.seeds) {
    auto split = make_splits(data.labels, ratios.train, ratios.val, seed);
    Trainer<float> trainer(data.graph, data.features, labels, data.labels.num_classes(), std::move(split),
                           cfg.use_motifs ? index : nullptr, cfg);
    rep.runs.push_back(trainer.run(seed).result);
    acc.push_back(rep.runs.back().test_acc);
  }
  rep.test_acc = summarize(acc);
  return rep;
}

struct ArmComparison {
  ArmReport base;
  ArmReport motif;
  double gain() const { return motif.test_acc.mean - base.test_acc.mean; }
};

/// Same seeds and splits for both arms; cfg.use_motifs is overridden.
inline ArmComparison compare_arms(const Dataset& data, const MotifIndex& index, TrainConfig cfg, SplitRatios ratios) {
  ArmComparison out;
  cfg.use_motifs = false;
  out.base = run_arm(data, nullptr, cfg, ratios);
  cfg.use_motifs = true;
  out.motif = run_arm(data, &index, cfg, ratios);
  return out;
}

inline TrainConfig benchmark_config(const PlantedRoleBenchmark& b) {
  TrainConfig cfg;
  cfg.gnn.hidden = b.hidden;
  cfg.gnn.out_dim = b.hidden;
  cfg.gnn.dropout = b.dropout;
  cfg.lr_grid = {b.lr};
  cfg.q = b.q;
  cfg.seeds = b.seeds;
  return cfg;
}

/// Both arms on the planted-role benchmark. Each seed draws its own graph,
/// split and initialization; both arms see the same graph and split.
inline ArmComparison run_planted_role(const PlantedRoleBenchmark& b, std::size_t q_override = 0) {
  auto cfg = benchmark_config(b);
  if (q_override) cfg.q = q_override;
  const auto catalog = builtin_catalog(false);
  ArmComparison out;
  std::vector<double> base_acc, motif_acc;
  for (auto seed : b.seeds) {
    auto planted = planted_role_graph(b.data, seed);
    Dataset data{std::move(planted.graph), std::move(planted.features), std::move(planted.labels)};
    auto index = MotifIndex::build(data.graph, catalog);
    cfg.seeds = {seed};
    auto arms = compare_arms(data, index, cfg, {b.train_ratio, b.val_ratio});
    out.base.runs.push_back(std::move(arms.base.runs.front()));
    out.motif.runs.push_back(std::move(arms.motif.runs.front()));
    base_acc.push_back(out.base.runs.back().test_acc);
    motif_acc.push_back(out.motif.runs.back().test_acc);
  }
  out.base.test_acc = summarize(base_acc);
  out.motif.test_acc = summarize(motif_acc);
  return out;
}

struct QSweepRow {
  std::size_t q = 0;
  Summary test_acc;
  std::vector<double> per_seed;
};

/// Motif-arm test accuracy for each sampling budget Q.
inline std::vector<QSweepRow> q_sweep(const Dataset& data, const MotifIndex& index, TrainConfig cfg,
                                      SplitRatios ratios, std::span<const std::size_t> qs) {
  if (qs.empty()) throw ConfigError("q_sweep: no Q values");
  cfg.use_motifs = true;
  std::vector<QSweepRow> rows;
  for (auto q : qs) {
    cfg.q = q;
    auto arm = run_arm(data, &index, cfg, ratios);
    QSweepRow row{q, arm.test_acc, {}};
    for (const auto& r : arm.runs) row.per_seed.push_back(r.test_acc);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Barabasi-Albert graphs and the runtime benchmark

/// Preferential attachment: a complete graph on m + 1 nodes, then each new
/// node links to m distinct existing nodes drawn proportionally to degree.
/// Edge count is m (n - m - 1) + (m + 1) m / 2.
inline Graph generate_ba_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw ConfigError("ba graph: m must be >= 1");
  if (n < m + 1) throw ConfigError("ba graph: n must be >= m + 1");
  auto rng = substream(seed, "ba");
  std::vector<Edge> edges;
  std::vector<NodeId> ends;  // one entry per edge endpoint
  for (NodeId u = 0; u <= m; ++u)
    for (NodeId w = u + 1; w <= m; ++w) {
      edges.push_back({u, w});
      ends.push_back(u);
      ends.push_back(w);
    }
  std::vector<NodeId> picked;
  for (auto v = static_cast<NodeId>(m + 1); v < n; ++v) {
    picked.clear();
    std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
    while (picked.size() < m) {
      auto u = ends[pick(rng)];
      if (std::find(picked.begin(), picked.end(), u) == picked.end()) picked.push_back(u);
    }
    for (auto u : picked) {
      edges.push_back({u, v});
      ends.push_back(u);
      ends.push_back(v);
    }
  }
  return Graph::build(n, edges, false);
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

/// Ordinary least squares y = slope x + intercept with the coefficient of
/// determination.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw ConfigError("fit_line: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

struct BenchConfig {
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::size_t m = 3;
  std::size_t feature_dim = 32;
  std::size_t classes = 4;
  int epochs = 3;
  std::uint64_t seed = 0;
  TrainConfig train;  ///< lr_grid[0] is used; early stopping is disabled

  BenchConfig() {
    train.gnn.hidden = 32;
    train.gnn.out_dim = 32;
    train.lr_grid = {1e-2};
  }
};

struct BenchRow {
  std::size_t n = 0;
  std::size_t edges = 0;
  double base_epoch_seconds = 0;   ///< median per epoch, base arm
  double motif_epoch_seconds = 0;  ///< median per epoch, motif arm
  double overhead_seconds = 0;     ///< median per epoch of motif-specific work
};

struct BenchReport {
  std::vector<BenchRow> rows;
  LinearFit overhead_fit;  ///< overhead_seconds against n
};

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto k = v.size() / 2;
  return v.size() % 2 ? v[k] : (v[k - 1] + v[k]) / 2;
}

inline double epoch_seconds(const EpochRecord& e) { return e.seconds_supervised + e.seconds_mi + e.seconds_eval; }

}  // namespace detail

/// Per-epoch timing of both arms on BA graphs with random features and
/// labels, plus a line fit of the regularization overhead against n.
inline BenchReport runtime_bench(const BenchConfig& bc, const MotifCatalog& catalog) {
  if (bc.sizes.size() < 2 || bc.epochs < 1 || bc.classes < 2 || bc.feature_dim == 0)
    throw ConfigError("bench: need >= 2 sizes, >= 1 epoch, >= 2 classes and features");
  BenchReport rep;
  for (auto n : bc.sizes) {
    auto g = generate_ba_graph(n, bc.m, bc.seed);
    auto rng = substream(bc.seed, "bench-data");
    std::normal_distribution<double> gauss(0.0, 1.0);
    FeatureMatrix::Storage x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(bc.feature_dim));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(gauss(rng));
    FeatureMatrix features(std::move(x));
    std::uniform_int_distribution<std::int32_t> cls(0, static_cast<std::int32_t>(bc.classes) - 1);
    std::vector<std::int32_t> labels(n);
    for (auto& y : labels) y = cls(rng);
    auto split = make_splits(LabelSet(labels, bc.classes), 0.4, 0.1, bc.seed);
    auto index = MotifIndex::build(g, catalog);

    TrainConfig cfg = bc.train;
    cfg.lr_grid = {bc.train.lr_grid.front()};
    cfg.max_epochs = bc.epochs;
    cfg.patience = bc.epochs + 1;
    BenchRow row{n, g.n_edges(), 0, 0, 0};
    for (int arm = 0; arm < 2; ++arm) {
      cfg.use_motifs = arm == 1;
      Trainer<float> trainer(g, features, labels, bc.classes, split, arm ? &index : nullptr, cfg);
      auto fit = trainer.fit_once(bc.seed, cfg.lr_grid.front());
      std::vector<double> total, overhead;
      for (const auto& e : fit.result.epochs) {
        total.push_back(detail::epoch_seconds(e));
        overhead.push_back(e.seconds_regularizer);
      }
      (arm ? row.motif_epoch_seconds : row.base_epoch_seconds) = detail::median(total);
      if (arm) row.overhead_seconds = detail::median(overhead);
    }
    rep.rows.push_back(row);
  }
  std::vector<double> xs, ys;
  for (const auto& r : rep.rows) {
    xs.push_back(static_cast<double>(r.n));
    ys.push_back(r.overhead_seconds);
  }
  rep.overhead_fit = fit_line(xs, ys);
  return rep;
}

// ---------------------------------------------------------------------------
// Writers. Column headers are listed in the README.

inline nlohmann::ordered_json to_json(const std::vector<QSweepRow>& rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& r : rows) out.push_back({{"q", r.q}, {"test_acc", to_json(r.test_acc)}, {"per_seed", r.per_seed}});
  return out;
}

inline nlohmann::ordered_json to_json(const BenchReport& b) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : b.rows)
    rows.push_back({{"n", r.n},
                    {"edges", r.edges},
                    {"base_epoch_seconds", r.base_epoch_seconds},
                    {"motif_epoch_seconds", r.motif_epoch_seconds},
                    {"overhead_seconds", r.overhead_seconds}});
  return {{"rows", rows},
          {"overhead_fit", {{"slope", b.overhead_fit.slope}, {"intercept", b.overhead_fit.intercept}, {"r2", b.overhead_fit.r2}}}};
}

inline nlohmann::ordered_json to_json(const ArmReport& a, bool with_timing = false) {
  auto runs = nlohmann::ordered_json::array();
  for (const auto& r : a.runs) runs.push_back(to_json(r, with_timing));
  return {{"test_acc", to_json(a.test_acc)}, {"runs", runs}};
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

}  // namespace detail

/// bin,lower,upper,count,accuracy
inline void write_csv(const std::filesystem::path& path, const BinnedReport& r) {
  auto out = detail::open_out(path);
  out << "bin,lower,upper,count,accuracy\n";
  for (const auto& b : r.rows) out << b.bin << ',' << b.lower << ',' << b.upper << ',' << b.count << ',' << b.accuracy << '\n';
}

/// q,mean,std,seeds
inline void write_csv(const std::filesystem::path& path, std::span<const QSweepRow> rows) {
  auto out = detail::open_out(path);
  out << "q,mean,std,seeds\n";
  for (const auto& r : rows) {
    out << r.q << ',' << r.test_acc.mean << ',';
    if (r.test_acc.std) out << *r.test_acc.std;
    out << ',' << r.test_acc.count << '\n';
  }
}

/// n,edges,base_epoch_seconds,motif_epoch_seconds,overhead_seconds
inline void write_csv(const std::filesystem::path& path, const BenchReport& b) {
  auto out = detail::open_out(path);
  out << "n,edges,base_epoch_seconds,motif_epoch_seconds,overhead_seconds\n";
  for (const auto& r : b.rows)
    out << r.n << ',' << r.edges << ',' << r.base_epoch_seconds << ',' << r.motif_epoch_seconds << ','
        << r.overhead_seconds << '\n';
}

/// seed,lr,best_epoch,val_acc,test_acc
inline void write_csv(const std::filesystem::path& path, const ArmReport& a) {
  auto out = detail::open_out(path);
  out << "seed,lr,best_epoch,val_acc,test_acc\n";
  for (const auto& r : a.runs)
    out << r.seed << ',' << r.lr << ',' << r.best_epoch << ',' << r.val_acc << ',' << r.test_acc << '\n';
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace infomotif
