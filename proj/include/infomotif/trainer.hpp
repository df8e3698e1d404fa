#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infomotif/curriculum.hpp"
#include "infomotif/gnn.hpp"
#include "infomotif/graph.hpp"
#include "infomotif/motif_index.hpp"
#include "infomotif/optim.hpp"
#include "infomotif/regularizer.hpp"
#include "infomotif/rng.hpp"

namespace infomotif {

struct TrainConfig {
  GnnConfig gnn;
  std::size_t q = 20;
  int max_epochs = 100;
  std::size_t batch_size = 256;
  std::vector<double> lr_grid{1e-4, 1e-3, 1e-2};
  int patience = 10;
  std::vector<std::uint64_t> seeds{0};
  bool use_motifs = true;  ///< false trains the base GNN alone
  bool mi_phase = true;    ///< false skips the MI phase of every epoch

  void validate() const {
    gnn.validate();
    if (q == 0) throw ConfigError("train: q must be >= 1");
    if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
    if (patience < 1) throw ConfigError("train: patience must be >= 1");
    if (lr_grid.empty()) throw ConfigError("train: lr_grid is empty");
    for (double lr : lr_grid)
      if (!(lr > 0.0)) throw ConfigError("train: learning rates must be > 0");
    if (seeds.empty()) throw ConfigError("train: no seeds");
  }
};

/// Flat dotted-key form, also used as the config file layout.
inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["gnn.arch"] = to_string(c.gnn.arch);
  j["gnn.layers"] = c.gnn.layers;
  j["gnn.hidden"] = c.gnn.hidden;
  j["gnn.heads"] = c.gnn.heads;
  j["gnn.dropout"] = c.gnn.dropout;
  j["gnn.out_dim"] = c.gnn.out_dim;
  j["train.q"] = c.q;
  j["train.max_epochs"] = c.max_epochs;
  j["train.batch_size"] = c.batch_size;
  j["train.lr_grid"] = c.lr_grid;
  j["train.patience"] = c.patience;
  j["train.seeds"] = c.seeds;
  j["train.use_motifs"] = c.use_motifs;
  j["train.mi_phase"] = c.mi_phase;
  return j;
}

/// Base encoder, per-motif heads, motif query vector and class predictor.
template <class T>
class InfoMotifModel {
 public:
  InfoMotifModel(const GnnConfig& gnn, std::size_t input_dim, std::size_t classes, std::size_t motifs, Rng& rng)
      : encoder_(gnn, input_dim, rng), classifier_(gnn.out_dim, static_cast<Eigen::Index>(classes), rng) {
    // Heads are drawn last so a base model and a motif model share encoder
    // and classifier initialization under the same seed.
    if (motifs > 0) {
      regularizer_ = MotifRegularizer<T>(motifs, gnn.out_dim, rng);
      query_ = Parameter<T>("motif.query", glorot_uniform<T>(gnn.out_dim, 1, rng));
    }
  }

  bool uses_motifs() const noexcept { return regularizer_.size() > 0; }
  std::size_t n_motifs() const noexcept { return regularizer_.size(); }
  GnnEncoder<T>& encoder() noexcept { return encoder_; }
  Classifier<T>& classifier() noexcept { return classifier_; }
  MotifRegularizer<T>& regularizer() noexcept { return regularizer_; }
  Parameter<T>& query() noexcept { return query_; }

  /// Every parameter in checkpoint order.
  std::vector<Parameter<T>*> parameters() {
    auto out = encoder_.parameters();
    for (auto* p : classifier_.parameters()) out.push_back(p);
    if (uses_motifs()) {
      for (auto* p : regularizer_.parameters()) out.push_back(p);
      out.push_back(&query_);
    }
    return out;
  }
  /// Parameters reached by the supervised loss.
  std::vector<Parameter<T>*> supervised_parameters() {
    auto out = encoder_.parameters();
    if (uses_motifs()) {
      for (auto* p : regularizer_.gate_parameters()) out.push_back(p);
      out.push_back(&query_);
    }
    for (auto* p : classifier_.parameters()) out.push_back(p);
    return out;
  }
  /// Parameters reached by the MI loss (classifier and query excluded).
  std::vector<Parameter<T>*> mi_parameters() {
    auto out = encoder_.parameters();
    for (auto* p : regularizer_.parameters()) out.push_back(p);
    return out;
  }

  struct Fused {
    Var<T> z;
    Var<T> alpha;  ///< invalid for the base model
  };

  /// z for the given base embedding rows: gated motif mixture, or h itself.
  Fused fuse(Tape<T>& tape, Var<T> h) {
    if (!uses_motifs()) return {h, {}};
    std::vector<Var<T>> gated;
    for (std::size_t t = 0; t < regularizer_.size(); ++t) gated.push_back(regularizer_.gate(tape, t, h));
    auto att = motif_attention<T>(gated, tape.param(query_));
    return {att.fused, att.weights};
  }

 private:
  GnnEncoder<T> encoder_;
  Classifier<T> classifier_;
  MotifRegularizer<T> regularizer_;
  Parameter<T> query_;
};

struct EpochRecord {
  int epoch = 0;
  double supervised_loss = 0;  ///< mean over minibatches
  double mi_loss = 0;          ///< mean over minibatches with a contributing motif
  double train_acc = 0;
  double val_acc = 0;
  std::size_t clamped = 0;         ///< true-class probabilities at the log floor
  std::size_t fallbacks = 0;       ///< negatives drawn after retry exhaustion
  double beta_max = 0;
  // Timing (excluded from determinism checks).
  double seconds_supervised = 0;
  double seconds_mi = 0;
  double seconds_eval = 0;
  double seconds_regularizer = 0;  ///< motif-specific work inside the epoch
};

struct LrScore {
  double lr = 0;
  double best_val_acc = 0;
  int best_epoch = 0;
};

/// Outcome of one seed: chosen lr, per-epoch history, best-validation metrics.
struct RunResult {
  std::uint64_t seed = 0;
  double lr = 0;
  std::vector<LrScore> lr_search;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double val_acc = 0;
  double test_acc = 0;
  std::vector<std::int32_t> predictions;
  double seconds_total = 0;
};

/// Deterministic part of a run plus a separate "timing" object.
inline nlohmann::ordered_json to_json(const RunResult& r, bool with_timing = true) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["lr"] = r.lr;
  j["lr_search"] = nlohmann::ordered_json::array();
  for (const auto& s : r.lr_search)
    j["lr_search"].push_back({{"lr", s.lr}, {"best_val_acc", s.best_val_acc}, {"best_epoch", s.best_epoch}});
  j["best_epoch"] = r.best_epoch;
  j["val_acc"] = r.val_acc;
  j["test_acc"] = r.test_acc;
  j["epochs"] = nlohmann::ordered_json::array();
  for (const auto& e : r.epochs)
    j["epochs"].push_back({{"epoch", e.epoch},
                           {"supervised_loss", e.supervised_loss},
                           {"mi_loss", e.mi_loss},
                           {"train_acc", e.train_acc},
                           {"val_acc", e.val_acc},
                           {"clamped", e.clamped},
                           {"fallbacks", e.fallbacks},
                           {"beta_max", e.beta_max}});
  if (with_timing) {
    nlohmann::ordered_json t;
    t["total_seconds"] = r.seconds_total;
    t["epochs"] = nlohmann::ordered_json::array();
    for (const auto& e : r.epochs)
      t["epochs"].push_back({{"supervised", e.seconds_supervised},
                             {"mi", e.seconds_mi},
                             {"eval", e.seconds_eval},
                             {"regularizer", e.seconds_regularizer}});
    j["timing"] = std::move(t);
  }
  return j;
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline double accuracy_on(const std::vector<std::int32_t>& pred, std::span<const std::int32_t> labels,
                          std::span<const NodeId> nodes) {
  if (nodes.empty()) return 0.0;
  std::size_t hit = 0;
  for (auto v : nodes) hit += pred[v] == labels[v];
  return static_cast<double>(hit) / static_cast<double>(nodes.size());
}

inline std::string rng_state(const Rng& r) {
  std::ostringstream s;
  s << r;
  return s.str();
}

}  // namespace detail

/// Saved model: config, parameter tensors and generator states.
template <class T>
struct Checkpoint {
  static constexpr char kMagic[4] = {'I', 'M', 'C', 'K'};
  static constexpr std::uint32_t kVersion = 1;

  std::string config;  ///< to_json(TrainConfig), serialized
  std::uint64_t seed = 0;
  double lr = 0;
  std::int32_t epoch = 0;
  std::vector<std::pair<std::string, Tensor<T>>> tensors;
  std::vector<std::pair<std::string, std::string>> rng_states;

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write checkpoint " + path.string());
    auto put = [&out](const auto& x) { out.write(reinterpret_cast<const char*>(&x), sizeof(x)); };
    auto put_str = [&](const std::string& s) {
      put(static_cast<std::uint64_t>(s.size()));
      out.write(s.data(), static_cast<std::streamsize>(s.size()));
    };
    out.write(kMagic, 4);
    put(kVersion);
    put(static_cast<std::uint8_t>(sizeof(T)));
    put_str(config);
    put(seed);
    put(lr);
    put(epoch);
    put(static_cast<std::uint64_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
      put_str(name);
      put(static_cast<std::int64_t>(t.rows()));
      put(static_cast<std::int64_t>(t.cols()));
      out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(sizeof(T) * t.size()));
    }
    put(static_cast<std::uint64_t>(rng_states.size()));
    for (const auto& [name, s] : rng_states) {
      put_str(name);
      put_str(s);
    }
    if (!out) throw ParseError("failed writing checkpoint " + path.string());
  }

  static Checkpoint load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open checkpoint " + path.string());
    auto fail = [&](const std::string& what) { return ParseError(path.string() + ": " + what); };
    auto get = [&](auto& x) {
      if (!in.read(reinterpret_cast<char*>(&x), sizeof(x))) throw fail("truncated");
    };
    auto get_str = [&] {
      std::uint64_t n = 0;
      get(n);
      if (n > (1u << 30)) throw fail("corrupt string length");
      std::string s(n, '\0');
      if (!in.read(s.data(), static_cast<std::streamsize>(n))) throw fail("truncated");
      return s;
    };
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw fail("not a checkpoint");
    std::uint32_t version = 0;
    get(version);
    if (version != kVersion) throw fail("unsupported version " + std::to_string(version));
    std::uint8_t width = 0;
    get(width);
    if (width != sizeof(T)) throw fail("scalar width " + std::to_string(width) + " does not match");
    Checkpoint c;
    c.config = get_str();
    get(c.seed);
    get(c.lr);
    get(c.epoch);
    std::uint64_t n = 0;
    get(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      auto name = get_str();
      std::int64_t r = 0, k = 0;
      get(r);
      get(k);
      if (r < 0 || k < 0 || r * k > (std::int64_t{1} << 34)) throw fail("corrupt tensor shape");
      Tensor<T> t(r, k);
      if (!in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(sizeof(T) * t.size())))
        throw fail("truncated");
      c.tensors.emplace_back(std::move(name), std::move(t));
    }
    get(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      auto name = get_str();
      c.rng_states.emplace_back(std::move(name), get_str());
    }
    return c;
  }

  /// Copies the saved tensors into a model with matching names and shapes.
  void restore(InfoMotifModel<T>& model) const {
    auto params = model.parameters();
    if (params.size() != tensors.size())
      throw ConfigError("checkpoint has " + std::to_string(tensors.size()) + " tensors, model expects " +
                        std::to_string(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& [name, t] = tensors[i];
      if (params[i]->name != name || params[i]->value.rows() != t.rows() || params[i]->value.cols() != t.cols())
        throw ConfigError("checkpoint tensor " + name + " does not match model parameter " + params[i]->name);
      params[i]->value = t;
    }
  }
};

/// Class probabilities and motif attention for every node, eval mode.
template <class T>
struct Prediction {
  Tensor<T> probabilities;  ///< n x C
  Tensor<T> alpha;          ///< n x T, empty for the base model
};

template <class T>
Prediction<T> predict(InfoMotifModel<T>& model, const GraphOperators<T>& ops, const Tensor<T>& x) {
  Tape<T> tape(false);
  Rng unused(0);
  auto h = model.encoder().forward(tape, ops, tape.constant(x), false, unused);
  auto fused = model.fuse(tape, h);
  Prediction<T> p{model.classifier().probabilities(tape, fused.z).value(), {}};
  if (fused.alpha.valid()) p.alpha = fused.alpha.value();
  return p;
}

/// Alternating supervised / MI optimization with early stopping on validation accuracy.
template <class T>
class Trainer {
 public:
  /// labels has one entry per node (kUnlabeled allowed outside the split);
  /// index may be null only when cfg.use_motifs is false.
  Trainer(const Graph& g, const FeatureMatrix& features, std::vector<std::int32_t> labels, std::size_t classes,
          Split split, const MotifIndex* index, TrainConfig cfg)
      : graph_(g),
        labels_(std::move(labels)),
        classes_(classes),
        split_(std::move(split)),
        index_(index),
        cfg_(std::move(cfg)),
        ops_(GraphOperators<T>::build(g)),
        x_(features.values().template cast<T>()) {
    cfg_.validate();
    if (features.rows() != g.n_nodes() || labels_.size() != g.n_nodes())
      throw ShapeError("trainer: features/labels do not cover the " + std::to_string(g.n_nodes()) + " nodes");
    if (split_.train.empty() || split_.val.empty()) throw ConfigError("trainer: empty train or validation split");
    for (const auto* part : {&split_.train, &split_.val, &split_.test})
      for (auto v : *part)
        if (v >= g.n_nodes() || labels_[v] < 0 || static_cast<std::size_t>(labels_[v]) >= classes_)
          throw BoundsError("trainer: split node " + std::to_string(v) + " is unlabeled or out of range");
    if (cfg_.use_motifs) {
      if (!index_) throw ConfigError("trainer: motif model needs a motif index");
      if (index_->n_nodes() != g.n_nodes()) throw ConfigError("trainer: motif index built for another graph");
    }
  }

  const TrainConfig& config() const noexcept { return cfg_; }
  const GraphOperators<T>& operators() const noexcept { return ops_; }
  const Tensor<T>& features() const noexcept { return x_; }

  InfoMotifModel<T> make_model(std::uint64_t seed) const {
    auto init = substream(seed, "init");
    return InfoMotifModel<T>(cfg_.gnn, static_cast<std::size_t>(x_.cols()), classes_,
                             cfg_.use_motifs ? index_->n_motifs() : 0, init);
  }

  struct Fit {
    InfoMotifModel<T> model;
    Checkpoint<T> checkpoint;
    RunResult result;
  };

  /// Trains once per lr in the grid and keeps the best validation accuracy
  /// (earlier grid entries win ties).
  Fit run(std::uint64_t seed) const {
    detail::Stopwatch clock;
    std::optional<Fit> best;
    std::vector<LrScore> scores;
    for (double lr : cfg_.lr_grid) {
      auto fit = fit_once(seed, lr);
      scores.push_back({lr, fit.result.val_acc, fit.result.best_epoch});
      if (!best || fit.result.val_acc > best->result.val_acc) best.emplace(std::move(fit));
    }
    best->result.lr_search = std::move(scores);
    best->result.seconds_total = clock.seconds();
    return std::move(*best);
  }

  Fit fit_once(std::uint64_t seed, double lr) const {
    auto model = make_model(seed);
    auto dropout_rng = substream(seed, "dropout");
    auto sampling_rng = substream(seed, "sampling");
    auto order_rng = substream(seed, "order");
    Adam<T> sup_opt(model.supervised_parameters(), {.lr = lr});
    std::optional<Adam<T>> mi_opt;
    if (model.uses_motifs()) mi_opt.emplace(model.mi_parameters(), AdamOptions{.lr = lr});

    const auto n = graph_.n_nodes();
    const auto& train = split_.train;
    // Uniform equivalent of beta = 1 before the first recomputation.
    std::vector<T> beta(train.size(), T(1) / static_cast<T>(train.size()));
    Tensor<T> alpha;

    RunResult result;
    result.seed = seed;
    result.lr = lr;
    Checkpoint<T> best_ckpt;
    double best_val = -1;
    int since_best = 0;
    auto snapshot = [&](int epoch) {
      best_ckpt = Checkpoint<T>{};
      best_ckpt.config = to_json(cfg_).dump();
      best_ckpt.seed = seed;
      best_ckpt.lr = lr;
      best_ckpt.epoch = epoch;
      for (auto* p : model.parameters()) best_ckpt.tensors.emplace_back(p->name, p->value);
      best_ckpt.rng_states = {{"dropout", detail::rng_state(dropout_rng)},
                              {"sampling", detail::rng_state(sampling_rng)},
                              {"order", detail::rng_state(order_rng)}};
    };

    for (int epoch = 0; epoch < cfg_.max_epochs; ++epoch) {
      EpochRecord rec;
      rec.epoch = epoch;
      try {
        // (i) supervised phase over the training nodes, beta fixed.
        detail::Stopwatch sup_clock;
        std::vector<NodeId> order(train.begin(), train.end());
        std::vector<std::size_t> pos(n, 0);
        for (std::size_t i = 0; i < train.size(); ++i) pos[train[i]] = i;
        std::shuffle(order.begin(), order.end(), order_rng);
        std::size_t batches = 0;
        for (std::size_t at = 0; at < order.size(); at += cfg_.batch_size) {
          const auto end = std::min(order.size(), at + cfg_.batch_size);
          std::vector<std::uint32_t> rows(order.begin() + static_cast<std::ptrdiff_t>(at),
                                          order.begin() + static_cast<std::ptrdiff_t>(end));
          std::vector<std::int32_t> y;
          std::vector<T> w;
          const T scale = static_cast<T>(train.size()) / static_cast<T>(rows.size());
          for (auto v : rows) {
            y.push_back(labels_[v]);
            w.push_back(beta[pos[v]] * scale);
          }
          sup_opt.zero_grad();
          Tape<T> tape;
          auto h = gather_rows<T>(model.encoder().forward(tape, ops_, tape.constant(x_), true, dropout_rng), rows);
          detail::Stopwatch reg_clock;
          typename InfoMotifModel<T>::Fused fused;
          {
            SectionScope<T> section(tape, Section::kRegularizer);
            fused = model.fuse(tape, h);
          }
          if (model.uses_motifs()) rec.seconds_regularizer += reg_clock.seconds();
          std::size_t clamped = 0;
          auto loss = supervised_loss<T>(model.classifier().probabilities(tape, fused.z), y, w, &clamped);
          tape.backward(loss);
          rec.seconds_regularizer += tape.backward_seconds(Section::kRegularizer);
          sup_opt.step();
          rec.supervised_loss += static_cast<double>(loss.value()(0, 0));
          rec.clamped += clamped;
          ++batches;
        }
        rec.supervised_loss /= static_cast<double>(batches);
        rec.seconds_supervised = sup_clock.seconds();

        if (model.uses_motifs() && cfg_.mi_phase) {
          // (ii) motif attention for every node, eval mode.
          detail::Stopwatch att_clock;
          alpha = predict(model, ops_, x_).alpha;
          rec.seconds_regularizer += att_clock.seconds();

          // (iii) MI phase over all nodes with alpha held constant.
          detail::Stopwatch mi_clock;
          std::vector<NodeId> all(n);
          std::iota(all.begin(), all.end(), NodeId{0});
          std::shuffle(all.begin(), all.end(), order_rng);
          std::size_t mi_batches = 0;
          for (std::size_t at = 0; at < n; at += cfg_.batch_size) {
            const auto end = std::min<std::size_t>(n, at + cfg_.batch_size);
            std::span<const NodeId> nodes(all.data() + at, end - at);
            detail::Stopwatch sample_clock;
            std::vector<MotifBatch> samples;
            bool any = false;
            for (std::size_t t = 0; t < model.n_motifs(); ++t) {
              samples.push_back(assemble_batch(graph_, *index_, t, nodes, cfg_.q, sampling_rng));
              rec.fallbacks += samples.back().fallbacks;
              any = any || !samples.back().empty();
            }
            rec.seconds_regularizer += sample_clock.seconds();
            if (!any) continue;
            mi_opt->zero_grad();
            Tape<T> tape;
            auto h = model.encoder().forward(tape, ops_, tape.constant(x_), true, dropout_rng);
            detail::Stopwatch reg_clock;
            Var<T> loss;
            {
              SectionScope<T> section(tape, Section::kRegularizer);
              std::vector<MotifLossTerms<T>> terms;
              for (std::size_t t = 0; t < samples.size(); ++t) {
                if (samples[t].empty()) continue;
                MotifLossTerms<T> term;
                term.motif = t;
                term.rows.assign(samples[t].anchors.begin(), samples[t].anchors.end());
                term.losses = model.regularizer().anchor_losses(tape, t, h, samples[t]).losses;
                terms.push_back(std::move(term));
              }
              loss = weighted_mi_loss<T>(tape, alpha, terms, nodes.size());
            }
            rec.seconds_regularizer += reg_clock.seconds();
            tape.backward(loss);
            rec.seconds_regularizer += tape.backward_seconds(Section::kRegularizer);
            mi_opt->step();
            rec.mi_loss += static_cast<double>(loss.value()(0, 0));
            ++mi_batches;
          }
          if (mi_batches > 0) rec.mi_loss /= static_cast<double>(mi_batches);
          rec.seconds_mi = mi_clock.seconds();
        }

        // (iv) evaluation, fresh alpha and novelty weights.
        detail::Stopwatch eval_clock;
        auto pred = predict(model, ops_, x_);
        auto labels_hat = argmax_rows(pred.probabilities);
        rec.train_acc = detail::accuracy_on(labels_hat, labels_, train);
        rec.val_acc = detail::accuracy_on(labels_hat, labels_, split_.val);
        if (model.uses_motifs()) {
          detail::Stopwatch beta_clock;
          Tensor<T> train_alpha(static_cast<Eigen::Index>(train.size()), pred.alpha.cols());
          for (std::size_t i = 0; i < train.size(); ++i)
            train_alpha.row(static_cast<Eigen::Index>(i)) = pred.alpha.row(train[i]);
          beta = novelty_weights(train_alpha);
          rec.beta_max = static_cast<double>(*std::max_element(beta.begin(), beta.end()));
          rec.seconds_regularizer += beta_clock.seconds();
        }
        rec.seconds_eval = eval_clock.seconds();
      } catch (const NumericError& e) {
        throw NumericError("training diverged in epoch " + std::to_string(epoch) + " (lr " + std::to_string(lr) +
                           "): " + e.what());
      }
      result.epochs.push_back(rec);
      if (rec.val_acc > best_val) {
        best_val = rec.val_acc;
        result.best_epoch = epoch;
        since_best = 0;
        snapshot(epoch);
      } else if (++since_best >= cfg_.patience) {
        break;
      }
    }

    best_ckpt.restore(model);
    auto pred = predict(model, ops_, x_);
    result.predictions = argmax_rows(pred.probabilities);
    result.val_acc = detail::accuracy_on(result.predictions, labels_, split_.val);
    result.test_acc = detail::accuracy_on(result.predictions, labels_, split_.test);
    result.lr_search = {{lr, result.val_acc, result.best_epoch}};
    return {std::move(model), std::move(best_ckpt), std::move(result)};
  }

 private:
  const Graph& graph_;
  std::vector<std::int32_t> labels_;
  std::size_t classes_;
  Split split_;
  const MotifIndex* index_;
  TrainConfig cfg_;
  GraphOperators<T> ops_;
  Tensor<T> x_;
};

}  // namespace infomotif
