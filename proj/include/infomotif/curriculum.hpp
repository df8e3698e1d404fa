#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "infomotif/autodiff.hpp"
#include "infomotif/errors.hpp"

namespace infomotif {

/// Node-by-motif attention (rows sum to 1) and the fused representation z.
template <class T>
struct MotifAttention {
  Var<T> weights;  ///< n x T
  Var<T> fused;    ///< n x D
};

/// softmax_t(h_v^t p) per node; z_v = sum_t alpha_vt h_v^t.
template <class T>
MotifAttention<T> motif_attention(std::span<const Var<T>> gated, Var<T> p) {
  if (gated.empty()) throw ConfigError("motif_attention: needs at least one motif");
  std::vector<Var<T>> scores;
  scores.reserve(gated.size());
  for (const auto& h : gated) scores.push_back(matmul(h, p));
  auto alpha = gated.size() == 1 ? row_softmax(scores[0]) : row_softmax(concat_cols<T>(scores));
  auto z = scale_rows(gated[0], slice_cols(alpha, 0, 1));
  for (std::size_t t = 1; t < gated.size(); ++t)
    z = add(z, scale_rows(gated[t], slice_cols(alpha, static_cast<Eigen::Index>(t), 1)));
  return {alpha, z};
}

/// Per-(v, t) MI losses of the nodes that have instances of motif t.
template <class T>
struct MotifLossTerms {
  std::size_t motif = 0;
  std::vector<std::size_t> rows;  ///< row of each anchor in the attention matrix
  Var<T> losses;                  ///< rows.size() x 1
};

/// (1 / (n T)) sum_t sum_v alpha_vt L^t(v) with alpha held constant.
template <class T>
Var<T> weighted_mi_loss(Tape<T>& tape, const Tensor<T>& alpha, std::span<const MotifLossTerms<T>> terms,
                        std::size_t n_nodes) {
  if (terms.empty()) throw ConfigError("weighted_mi_loss: no contributing motif");
  const auto n_motifs = alpha.cols();
  Var<T> total;
  for (const auto& term : terms) {
    if (static_cast<Eigen::Index>(term.motif) >= n_motifs || term.losses.rows() != static_cast<Eigen::Index>(term.rows.size()))
      throw ShapeError("weighted_mi_loss: terms do not match the " + shape_of(alpha) + " attention matrix");
    Tensor<T> w(static_cast<Eigen::Index>(term.rows.size()), 1);
    for (std::size_t i = 0; i < term.rows.size(); ++i)
      w(static_cast<Eigen::Index>(i), 0) = alpha(static_cast<Eigen::Index>(term.rows[i]), static_cast<Eigen::Index>(term.motif));
    auto part = reduce_sum(hadamard(term.losses, tape.constant(std::move(w))));
    total = total.valid() ? add(total, part) : part;
  }
  return scale(total, T(1) / static_cast<T>(n_nodes * static_cast<std::size_t>(n_motifs)));
}

/// Same quantity from plain values; losses(v, t) is ignored where present(v, t) is false.
template <class T>
T weighted_mi_loss_value(const Tensor<T>& alpha, const Tensor<T>& losses, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& present) {
  if (alpha.rows() != losses.rows() || alpha.cols() != losses.cols() || present.rows() != alpha.rows() ||
      present.cols() != alpha.cols())
    throw ShapeError("weighted_mi_loss_value: mismatched shapes");
  T sum = 0;
  for (Eigen::Index v = 0; v < alpha.rows(); ++v)
    for (Eigen::Index t = 0; t < alpha.cols(); ++t)
      if (present(v, t)) sum += alpha(v, t) * losses(v, t);
  return sum / static_cast<T>(alpha.rows() * alpha.cols());
}

/// beta_v = softmax over the given rows of ||alpha_v - mean alpha||^2.
template <class T>
std::vector<T> novelty_weights(const Tensor<T>& alpha) {
  if (alpha.rows() == 0) throw ConfigError("novelty_weights: empty labeled set");
  Eigen::Matrix<T, 1, Eigen::Dynamic> mu = alpha.colwise().mean();
  std::vector<T> dev(static_cast<std::size_t>(alpha.rows()));
  T mx = 0;
  for (Eigen::Index v = 0; v < alpha.rows(); ++v) {
    dev[static_cast<std::size_t>(v)] = (alpha.row(v) - mu).squaredNorm();
    mx = std::max(mx, dev[static_cast<std::size_t>(v)]);
  }
  T sum = 0;
  for (auto& d : dev) sum += (d = std::exp(d - mx));
  for (auto& d : dev) d /= sum;
  return dev;
}

}  // namespace infomotif
