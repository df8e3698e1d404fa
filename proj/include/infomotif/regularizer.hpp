#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "infomotif/autodiff.hpp"
#include "infomotif/errors.hpp"
#include "infomotif/motif_index.hpp"
#include "infomotif/optim.hpp"

namespace infomotif {

template <class T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

/// Parameters of one motif's gate, instance encoder and discriminator.
template <class T>
struct MotifHead {
  Parameter<T> gate_weight;  ///< D x D
  Parameter<T> gate_bias;    ///< 1 x D
  Parameter<T> attention;    ///< 2D x 1, scores [h_u || h_anchor]
  Parameter<T> scorer;       ///< D x D bilinear discriminator

  template <class Rng>
  static MotifHead make(const std::string& name, Eigen::Index d, Rng& rng) {
    return {Parameter<T>(name + ".gate.weight", glorot_uniform<T>(d, d, rng)),
            Parameter<T>(name + ".gate.bias", Tensor<T>::Zero(1, d)),
            Parameter<T>(name + ".encoder.attention", glorot_uniform<T>(2 * d, 1, rng)),
            Parameter<T>(name + ".discriminator.weight", glorot_uniform<T>(d, d, rng))};
  }
};

// ---- single-instance reference path (plain Eigen, no tape) ----------------

template <class T>
T sigmoid_scalar(T x) {
  return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

/// h * sigmoid(h W + b) for a row vector h.
template <class T>
RowVec<T> self_gate(const RowVec<T>& h, const Tensor<T>& w, const RowVec<T>& b) {
  RowVec<T> pre = h * w + b;
  return h.cwiseProduct(pre.unaryExpr([](T x) { return sigmoid_scalar(x); }));
}

template <class T>
struct EncodedInstance {
  RowVec<T> embedding;
  std::array<T, 3> weights;
};

/// Attention-weighted average of the gated slot embeddings; slot 0 is the anchor.
template <class T>
EncodedInstance<T> encode_instance(const std::array<RowVec<T>, 3>& gated, const Tensor<T>& attention) {
  const auto d = gated[0].size();
  if (attention.rows() != 2 * d || attention.cols() != 1)
    throw ShapeError("encode_instance: attention must be " + std::to_string(2 * d) + "x1");
  std::array<T, 3> score{};
  for (int j = 0; j < 3; ++j)
    score[j] = gated[j].dot(attention.col(0).head(d)) + gated[0].dot(attention.col(0).tail(d));
  const T mx = *std::max_element(score.begin(), score.end());
  T sum = 0;
  for (auto& s : score) sum += (s = std::exp(s - mx));
  EncodedInstance<T> out{RowVec<T>::Zero(d), {}};
  for (int j = 0; j < 3; ++j) {
    out.weights[j] = score[j] / sum;
    out.embedding += out.weights[j] * gated[j];
  }
  return out;
}

/// sigmoid(mean of the instance embeddings).
template <class T>
RowVec<T> readout(std::span<const RowVec<T>> embeddings) {
  if (embeddings.empty()) throw ConfigError("readout: no instances");
  RowVec<T> mean = RowVec<T>::Zero(embeddings[0].size());
  for (const auto& e : embeddings) mean += e;
  mean /= static_cast<T>(embeddings.size());
  return mean.unaryExpr([](T x) { return sigmoid_scalar(x); });
}

/// sigmoid(e W s^T).
template <class T>
T discriminate(const RowVec<T>& e, const RowVec<T>& s, const Tensor<T>& w) {
  return sigmoid_scalar(T(e * w * s.transpose()));
}

inline constexpr double kMiProbFloor = 1e-12;

/// -1/(2Q') sum [log D+ + log(1 - D-)], probabilities clamped to [1e-12, 1 - 1e-12].
template <class T>
T motif_mi_loss(std::span<const T> pos, std::span<const T> neg) {
  if (pos.empty() || pos.size() != neg.size()) throw ConfigError("motif_mi_loss: need matched nonempty samples");
  auto clamp = [](T p) { return std::clamp<T>(p, T(kMiProbFloor), T(1 - kMiProbFloor)); };
  T sum = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) sum += std::log(clamp(pos[i])) + std::log(T(1) - clamp(neg[i]));
  return -sum / (T(2) * static_cast<T>(pos.size()));
}

// ---- batched training path ---------------------------------------------------

/// Sampled positives and matched negatives for one motif over a node batch.
struct MotifBatch {
  std::vector<NodeId> anchors;         ///< nodes with at least one instance
  std::vector<Triple> positives;       ///< anchor first, grouped by anchor
  std::vector<Triple> negatives;       ///< aligned 1:1 with positives
  std::vector<std::uint32_t> group;    ///< anchor index per instance
  std::size_t fallbacks = 0;           ///< negatives drawn after retry exhaustion

  bool empty() const noexcept { return anchors.empty(); }
};

/// Up to Q positives per node (without replacement) and one negative per
/// positive. Nodes without instances of t are skipped.
template <class Rng>
MotifBatch assemble_batch(const Graph& g, const MotifIndex& index, std::size_t t,
                          std::span<const NodeId> nodes, std::size_t q, Rng& rng) {
  MotifBatch b;
  for (NodeId v : nodes) {
    if (index.count(v, t) == 0) continue;
    const auto gi = static_cast<std::uint32_t>(b.anchors.size());
    b.anchors.push_back(v);
    for (const auto& inst : sample_instances(index, v, t, q, rng)) {
      auto neg = sample_negative_instance(g, index, v, t, rng);
      b.fallbacks += neg.fallback ? 1 : 0;
      b.positives.push_back(inst.nodes);
      b.negatives.push_back(neg.instance.nodes);
      b.group.push_back(gi);
    }
  }
  return b;
}

/// One head per catalog motif.
template <class T>
class MotifRegularizer {
 public:
  MotifRegularizer() = default;
  template <class Rng>
  MotifRegularizer(std::size_t motifs, Eigen::Index d, Rng& rng) : d_(d) {
    for (std::size_t t = 0; t < motifs; ++t) heads_.push_back(MotifHead<T>::make("motif." + std::to_string(t), d, rng));
  }

  std::size_t size() const noexcept { return heads_.size(); }
  Eigen::Index dim() const noexcept { return d_; }
  MotifHead<T>& head(std::size_t t) { return heads_.at(t); }

  std::vector<Parameter<T>*> parameters() {
    std::vector<Parameter<T>*> out;
    for (auto& h : heads_)
      for (auto* p : {&h.gate_weight, &h.gate_bias, &h.attention, &h.scorer}) out.push_back(p);
    return out;
  }
  /// Gate parameters only (used to form z_v in the supervised phase).
  std::vector<Parameter<T>*> gate_parameters() {
    std::vector<Parameter<T>*> out;
    for (auto& h : heads_) {
      out.push_back(&h.gate_weight);
      out.push_back(&h.gate_bias);
    }
    return out;
  }

  /// h * sigmoid(h W_g + b_g), row-wise.
  Var<T> gate(Tape<T>& tape, std::size_t t, Var<T> h) {
    auto& hd = heads_.at(t);
    return hadamard(h, sigmoid(add(matmul(h, tape.param(hd.gate_weight)), tape.param(hd.gate_bias))));
  }

  /// Instance embeddings for the given slot rows of `gated` (anchor slot first).
  /// When weights_out is set it receives the P x 3 attention matrix.
  Var<T> encode(Tape<T>& tape, std::size_t t, Var<T> gated, const std::array<std::vector<std::uint32_t>, 3>& slots,
                Var<T>* weights_out = nullptr) {
    auto a = tape.param(heads_.at(t).attention);
    std::array<Var<T>, 3> rows;
    for (int j = 0; j < 3; ++j) rows[j] = gather_rows<T>(gated, slots[j]);
    std::vector<Var<T>> scores;
    for (int j = 0; j < 3; ++j) {
      std::vector<Var<T>> pair{rows[j], rows[0]};
      scores.push_back(matmul(concat_cols<T>(pair), a));
    }
    auto weights = row_softmax(concat_cols<T>(scores));
    if (weights_out) *weights_out = weights;
    auto e = scale_rows(rows[0], slice_cols(weights, 0, 1));
    for (int j = 1; j < 3; ++j) e = add(e, scale_rows(rows[j], slice_cols(weights, j, 1)));
    return e;
  }

  struct BatchOutput {
    Var<T> losses;       ///< anchors x 1, L_MI^t(v)
    Var<T> pos_scores;   ///< positives x 1, D(e+, s)
    Var<T> neg_scores;   ///< negatives x 1, D(e-, s)
  };

  /// Per-anchor noise-contrastive losses for motif t; h holds base embeddings of all nodes.
  BatchOutput anchor_losses(Tape<T>& tape, std::size_t t, Var<T> h, const MotifBatch& batch) {
    if (batch.empty()) throw ConfigError("anchor_losses: empty batch");
    if (h.cols() != d_) throw ShapeError("anchor_losses: embedding width " + std::to_string(h.cols()) +
                                         " != " + std::to_string(d_));
    // Gate only the rows that appear in some instance.
    std::unordered_map<NodeId, std::uint32_t> local;
    std::vector<std::uint32_t> rows;
    auto id_of = [&](NodeId v) {
      auto [it, inserted] = local.try_emplace(v, static_cast<std::uint32_t>(rows.size()));
      if (inserted) rows.push_back(v);
      return it->second;
    };
    const auto p = batch.positives.size();
    std::array<std::vector<std::uint32_t>, 3> slots;
    for (auto& s : slots) s.reserve(2 * p);
    for (const auto* set : {&batch.positives, &batch.negatives})
      for (const auto& tr : *set)
        for (int j = 0; j < 3; ++j) slots[j].push_back(id_of(tr[j]));
    auto gated = gate(tape, t, gather_rows<T>(h, rows));
    auto e_all = encode(tape, t, gated, slots);
    auto e_pos = slice_rows(e_all, 0, p);
    auto e_neg = slice_rows(e_all, p, p);

    // Readout: s_v = sigmoid(mean of its positive embeddings).
    const auto n_anchor = batch.anchors.size();
    std::vector<std::uint32_t> counts(n_anchor, 0);
    for (auto gi : batch.group) ++counts[gi];
    auto avg = group_operator(batch.group, counts, [](std::uint32_t c) { return T(1) / static_cast<T>(c); });
    auto summary = sigmoid(spmm(avg, e_pos));

    // Bilinear scores e W s^T, evaluated as rowdot(e, s W^T).
    auto projected = gather_rows<T>(matmul_nt(summary, tape.param(heads_.at(t).scorer)), batch.group);
    auto pos_logit = row_dot(e_pos, projected);
    auto neg_logit = row_dot(e_neg, projected);
    auto terms = add(log_sigmoid(pos_logit), log_sigmoid(scale(neg_logit, T(-1))));
    auto half = group_operator(batch.group, counts, [](std::uint32_t c) { return T(-1) / (T(2) * static_cast<T>(c)); });
    return {spmm(half, terms), sigmoid(pos_logit), sigmoid(neg_logit)};
  }

 private:
  template <class F>
  static Csr<T> group_operator(const std::vector<std::uint32_t>& group, const std::vector<std::uint32_t>& counts, F weight) {
    // Instances are grouped contiguously by anchor.
    std::vector<std::uint32_t> off(counts.size() + 1, 0), idx(group.size());
    for (std::size_t g = 0; g < counts.size(); ++g) off[g + 1] = off[g] + counts[g];
    std::vector<T> vals(group.size());
    auto cursor = off;
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto k = cursor[group[i]]++;
      idx[k] = static_cast<std::uint32_t>(i);
      vals[k] = weight(counts[group[i]]);
    }
    return Csr<T>(CsrPattern::from_rows(counts.size(), group.size(), std::move(off), std::move(idx)), std::move(vals));
  }

  Eigen::Index d_ = 0;
  std::vector<MotifHead<T>> heads_;
};

}  // namespace infomotif
