#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "infomotif/autodiff.hpp"
#include "infomotif/errors.hpp"

namespace infomotif {

/// Glorot/Xavier uniform in [-r, r], r = sqrt(6 / (fan_in + fan_out)).
template <class T, class Rng>
Tensor<T> glorot_uniform(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-r, r);
  Tensor<T> w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(u(rng));
  return w;
}

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected adaptive-moment optimizer over a fixed parameter list.
template <class T>
class Adam {
 public:
  Adam(std::vector<Parameter<T>*> params, AdamOptions opts = {}) : params_(std::move(params)), opts_(opts) {
    for (auto* p : params_) {
      m_.push_back(Tensor<T>::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Tensor<T>::Zero(p->value.rows(), p->value.cols()));
    }
  }

  std::int64_t steps() const noexcept { return t_; }
  const AdamOptions& options() const noexcept { return opts_; }
  void set_lr(double lr) { opts_.lr = lr; }

  /// One update from the parameters' current .grad; grads are left untouched.
  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
    const T b1 = static_cast<T>(opts_.beta1), b2 = static_cast<T>(opts_.beta2);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = *params_[i];
      if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols())
        throw ShapeError("adam: gradient shape mismatch for " + p.name);
      m_[i] = b1 * m_[i] + (T(1) - b1) * p.grad;
      v_[i] = b2 * v_[i] + (T(1) - b2) * p.grad.cwiseProduct(p.grad);
      const auto mhat = m_[i].array() / static_cast<T>(bc1);
      const auto vhat = v_[i].array() / static_cast<T>(bc2);
      p.value.array() -= static_cast<T>(opts_.lr) * mhat / (vhat.sqrt() + static_cast<T>(opts_.eps));
      if (!p.value.allFinite()) throw NumericError("adam: parameter " + p.name + " became non-finite");
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  /// Moments and step counter, for checkpoints.
  std::vector<Tensor<T>>& first_moments() noexcept { return m_; }
  std::vector<Tensor<T>>& second_moments() noexcept { return v_; }
  void set_steps(std::int64_t t) { t_ = t; }

 private:
  std::vector<Parameter<T>*> params_;
  AdamOptions opts_;
  std::vector<Tensor<T>> m_, v_;
  std::int64_t t_ = 0;
};

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h per coordinate.
inline Tensor<double> finite_difference_grad(const std::function<double(const Tensor<double>&)>& f,
                                             Tensor<double> x, double h = 1e-5) {
  if (!(h > 0)) throw ConfigError("finite_difference_grad: h must be > 0");
  Tensor<double> g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = f(x);
    x.data()[i] = saved - h;
    const double down = f(x);
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace infomotif
