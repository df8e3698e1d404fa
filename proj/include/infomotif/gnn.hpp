#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "infomotif/autodiff.hpp"
#include "infomotif/errors.hpp"
#include "infomotif/graph.hpp"
#include "infomotif/optim.hpp"

namespace infomotif {

enum class Arch { kGcn, kGat };

inline std::string to_string(Arch a) { return a == Arch::kGcn ? "gcn" : "gat"; }
inline Arch parse_arch(const std::string& s) {
  if (s == "gcn") return Arch::kGcn;
  if (s == "gat") return Arch::kGat;
  throw ConfigError("unknown architecture '" + s + "' (expected gcn or gat)");
}

struct GnnConfig {
  Arch arch = Arch::kGcn;
  int layers = 2;
  int hidden = 256;
  int heads = 8;
  double dropout = 0.5;
  int out_dim = 256;

  void validate() const {
    if (layers < 1) throw ConfigError("gnn: layers must be >= 1");
    if (hidden < 1 || out_dim < 1) throw ConfigError("gnn: widths must be >= 1");
    if (heads < 1) throw ConfigError("gnn: heads must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("gnn: dropout must be in [0, 1)");
    if (arch == Arch::kGat && layers > 1 && hidden % heads != 0)
      throw ConfigError("gat: hidden width must be divisible by the head count");
  }
};

/// D^-1/2 (A + I) D^-1/2 over the symmetrized adjacency; rows sorted.
template <class T>
Csr<T> normalize_adjacency(const Graph& g) {
  const auto n = g.n_nodes();
  std::vector<std::uint32_t> off{0}, idx;
  std::vector<double> inv_sqrt(n);
  for (NodeId v = 0; v < n; ++v) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
  std::vector<T> vals;
  for (NodeId v = 0; v < n; ++v) {
    auto nb = g.neighbors(v);
    bool self_done = false;
    auto emit = [&](NodeId u) {
      idx.push_back(u);
      vals.push_back(static_cast<T>(inv_sqrt[v] * inv_sqrt[u]));
    };
    for (NodeId u : nb) {
      if (!self_done && u > v) {
        emit(v);
        self_done = true;
      }
      emit(u);
    }
    if (!self_done) emit(v);
    off.push_back(static_cast<std::uint32_t>(idx.size()));
  }
  return Csr<T>(CsrPattern::from_rows(n, n, std::move(off), std::move(idx)), std::move(vals));
}

/// Attention neighborhoods N(v) + {v}, same layout as normalize_adjacency.
inline std::shared_ptr<const CsrPattern> attention_pattern(const Graph& g) {
  return normalize_adjacency<float>(g).pattern_ptr();
}

/// Graph-derived constants shared by every forward pass.
template <class T>
struct GraphOperators {
  Csr<T> norm_adj;
  std::shared_ptr<const CsrPattern> attention;

  static GraphOperators build(const Graph& g) {
    auto a = normalize_adjacency<T>(g);
    return {a, a.pattern_ptr()};
  }
};

/// Stacked GCN or GAT layers producing the base embeddings h_v.
template <class T>
class GnnEncoder {
 public:
  GnnEncoder() = default;

  template <class Rng>
  GnnEncoder(const GnnConfig& cfg, std::size_t input_dim, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    auto in = static_cast<Eigen::Index>(input_dim);
    for (int l = 0; l < cfg_.layers; ++l) {
      const bool last = l + 1 == cfg_.layers;
      const std::string tag = "encoder." + std::to_string(l);
      if (cfg_.arch == Arch::kGcn) {
        const Eigen::Index out = last ? cfg_.out_dim : cfg_.hidden;
        layers_.push_back({Parameter<T>(tag + ".weight", glorot_uniform<T>(in, out, rng)),
                           Parameter<T>(tag + ".bias", Tensor<T>::Zero(1, out)),
                           {}, {}, 1, out});
        in = out;
      } else {
        const Eigen::Index per_head = last ? cfg_.out_dim : cfg_.hidden / cfg_.heads;
        const Eigen::Index heads = cfg_.heads;
        Layer layer{Parameter<T>(tag + ".weight", glorot_uniform<T>(in, heads * per_head, rng)),
                    Parameter<T>(tag + ".bias", Tensor<T>::Zero(1, last ? per_head : heads * per_head)),
                    {}, {}, heads, per_head};
        for (Eigen::Index h = 0; h < heads; ++h) {
          const auto ht = tag + ".head" + std::to_string(h);
          layer.att_src.emplace_back(ht + ".att_src", glorot_uniform<T>(per_head, 1, rng));
          layer.att_dst.emplace_back(ht + ".att_dst", glorot_uniform<T>(per_head, 1, rng));
        }
        layers_.push_back(std::move(layer));
        in = last ? per_head : heads * per_head;
      }
    }
  }

  const GnnConfig& config() const noexcept { return cfg_; }
  Eigen::Index out_dim() const noexcept { return cfg_.out_dim; }

  std::vector<Parameter<T>*> parameters() {
    std::vector<Parameter<T>*> out;
    for (auto& l : layers_) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
      for (auto& p : l.att_src) out.push_back(&p);
      for (auto& p : l.att_dst) out.push_back(&p);
    }
    return out;
  }

  /// Full-graph forward. Dropout is applied to each layer's input when
  /// training. When attention_out is given, GAT attention weights per layer
  /// and head are appended to it.
  template <class Rng>
  Var<T> forward(Tape<T>& tape, const GraphOperators<T>& ops, Var<T> x, bool train, Rng& rng,
                 std::vector<Var<T>>* attention_out = nullptr) {
    if (static_cast<std::size_t>(x.rows()) != ops.norm_adj.rows())
      throw ShapeError("gnn forward: feature rows " + std::to_string(x.rows()) + " != nodes " +
                       std::to_string(ops.norm_adj.rows()));
    auto h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const bool last = l + 1 == layers_.size();
      auto& layer = layers_[l];
      auto in = dropout(h, cfg_.dropout, train, rng);
      if (cfg_.arch == Arch::kGcn) {
        auto z = add(spmm(ops.norm_adj, matmul(in, tape.param(layer.weight))), tape.param(layer.bias));
        h = last ? z : tanh(z);
        continue;
      }
      auto wh = matmul(in, tape.param(layer.weight));
      std::vector<Var<T>> heads;
      for (Eigen::Index k = 0; k < layer.heads; ++k) {
        auto whk = layer.heads == 1 ? wh : slice_cols(wh, k * layer.per_head, layer.per_head);
        auto s_dst = matmul(whk, tape.param(layer.att_dst[k]));
        auto s_src = matmul(whk, tape.param(layer.att_src[k]));
        auto alpha = edge_softmax(ops.attention, leaky_relu(edge_scores(ops.attention, s_dst, s_src)));
        if (attention_out) attention_out->push_back(alpha);
        heads.push_back(spmm_weighted(ops.attention, alpha, whk));
      }
      if (last) {
        auto mean = heads[0];
        for (std::size_t k = 1; k < heads.size(); ++k) mean = add(mean, heads[k]);
        if (heads.size() > 1) mean = scale(mean, T(1) / static_cast<T>(heads.size()));
        h = add(mean, tape.param(layer.bias));
      } else {
        h = elu(add(concat_cols<T>(heads), tape.param(layer.bias)));
      }
    }
    return h;
  }

 private:
  struct Layer {
    Parameter<T> weight;
    Parameter<T> bias;
    std::vector<Parameter<T>> att_src;
    std::vector<Parameter<T>> att_dst;
    Eigen::Index heads = 1;
    Eigen::Index per_head = 0;
  };

  GnnConfig cfg_;
  std::vector<Layer> layers_;
};

/// Linear map plus row softmax over C classes.
template <class T>
class Classifier {
 public:
  Classifier() = default;
  template <class Rng>
  Classifier(Eigen::Index in_dim, Eigen::Index classes, Rng& rng)
      : weight_("classifier.weight", glorot_uniform<T>(in_dim, classes, rng)),
        bias_("classifier.bias", Tensor<T>::Zero(1, classes)) {}

  std::vector<Parameter<T>*> parameters() { return {&weight_, &bias_}; }
  Eigen::Index classes() const { return weight_.value.cols(); }

  Var<T> probabilities(Tape<T>& tape, Var<T> z) {
    return row_softmax(add(matmul(z, tape.param(weight_)), tape.param(bias_)));
  }

 private:
  Parameter<T> weight_;
  Parameter<T> bias_;
};

/// Argmax per row; ties go to the lowest class index.
template <class T>
std::vector<std::int32_t> argmax_rows(const Tensor<T>& probs) {
  std::vector<std::int32_t> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c)
      if (probs(r, c) > probs(r, best)) best = c;
    out[static_cast<std::size_t>(r)] = static_cast<std::int32_t>(best);
  }
  return out;
}

inline constexpr double kProbFloor = 1e-12;

/// -sum_v w_v log(max(p_v[y_v], 1e-12)) over the rows of probs.
/// *clamped receives how many true-class probabilities hit the floor.
template <class T>
Var<T> supervised_loss(Var<T> probs, std::span<const std::int32_t> labels, std::span<const T> weights,
                       std::size_t* clamped = nullptr) {
  if (labels.size() != weights.size() || static_cast<Eigen::Index>(labels.size()) != probs.rows())
    throw ShapeError("supervised_loss: " + std::to_string(labels.size()) + " labels, " +
                     std::to_string(weights.size()) + " weights, " + shape_of(probs.value()) + " probabilities");
  auto& tape = *probs.tape();
  auto picked = pick_per_row(probs, labels);
  if (clamped) {
    *clamped = 0;
    for (Eigen::Index i = 0; i < picked.rows(); ++i) *clamped += picked.value()(i, 0) <= T(kProbFloor);
  }
  Tensor<T> w(static_cast<Eigen::Index>(weights.size()), 1);
  for (std::size_t i = 0; i < weights.size(); ++i) w(static_cast<Eigen::Index>(i), 0) = weights[i];
  return scale(reduce_sum(hadamard(log(picked, T(kProbFloor)), tape.constant(std::move(w)))), T(-1));
}

}  // namespace infomotif
