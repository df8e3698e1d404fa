#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "infomotif/autodiff.hpp"
#include "infomotif/optim.hpp"
#include "infomotif/rng.hpp"

namespace infomotif {

struct GradcheckOptions {
  double h = 1e-5;
  double rel_tol = 1e-4;
  /// Coordinates with |analytic| below this are compared absolutely, against the same bound.
  double abs_floor = 1e-6;
  int configs = 20;
  std::uint64_t seed = 1;
};

struct GradcheckResult {
  std::string op;
  int configs = 0;
  int failures = 0;  ///< failing coordinates over all configs
  double max_error = 0.0;
  bool passed() const noexcept { return failures == 0 && configs > 0; }
};

/// One differentiable function of several tensors; the checked scalar is
/// sum(C * build(inputs)) for a random fixed C.
struct GradcheckCase {
  std::vector<Tensor<double>> inputs;
  std::function<Var<double>(Tape<double>&, std::vector<Var<double>>&)> build;
};

namespace detail {

inline Tensor<double> random_tensor(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -2,
                                    double hi = 2, double avoid = 0.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor<double> t(r, c);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    double x;
    do x = u(rng);
    while (std::abs(x) < avoid);
    t.data()[i] = x;
  }
  return t;
}

inline Eigen::Index dim(Rng& rng, int lo = 1, int hi = 5) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline std::shared_ptr<const CsrPattern> random_pattern(std::size_t rows, std::size_t cols, Rng& rng,
                                                        double density = 0.5) {
  std::bernoulli_distribution keep(density);
  std::vector<std::uint32_t> off{0}, idx;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c)
      if (keep(rng)) idx.push_back(static_cast<std::uint32_t>(c));
    off.push_back(static_cast<std::uint32_t>(idx.size()));
  }
  return CsrPattern::from_rows(rows, cols, std::move(off), std::move(idx));
}

inline double evaluate(const GradcheckCase& c, const std::vector<Tensor<double>>& inputs,
                       const Tensor<double>& coeff) {
  Tape<double> tape(false);
  std::vector<Var<double>> vars;
  for (const auto& x : inputs) vars.push_back(tape.constant(x));
  auto out = c.build(tape, vars);
  return out.value().cwiseProduct(coeff).sum();
}

/// Coordinates where analytic and numeric disagree beyond the tolerances.
inline int count_failures(const Tensor<double>& analytic, const Tensor<double>& numeric, const GradcheckOptions& opts,
                          double* worst) {
  int failures = 0;
  for (Eigen::Index k = 0; k < analytic.size(); ++k) {
    const double a = analytic.data()[k], n = numeric.data()[k];
    double err;
    bool ok;
    if (std::abs(a) < opts.abs_floor) {
      err = std::abs(a - n);
      ok = err < opts.abs_floor;
    } else {
      err = std::abs(a - n) / std::max(std::abs(a), std::abs(n));
      ok = err < opts.rel_tol;
    }
    *worst = std::max(*worst, err);
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace detail

/// Analytic vs central-difference gradients for every input of one case.
/// Returns the number of failing coordinates; *worst receives the largest error.
inline int compare_case(const GradcheckCase& c, Rng& rng, const GradcheckOptions& opts, double* worst) {
  Tape<double> tape;
  std::vector<Var<double>> vars;
  for (const auto& x : c.inputs) vars.push_back(tape.variable(x));
  auto out = c.build(tape, vars);
  Tensor<double> coeff = detail::random_tensor(out.rows(), out.cols(), rng, -1, 1);
  auto loss = reduce_sum(hadamard(out, tape.constant(coeff)));
  tape.backward(loss);
  int failures = 0;
  for (std::size_t i = 0; i < c.inputs.size(); ++i) {
    auto analytic = tape.grad(vars[i]);
    auto numeric = finite_difference_grad(
        [&](const Tensor<double>& x) {
          auto in = c.inputs;
          in[i] = x;
          return detail::evaluate(c, in, coeff);
        },
        c.inputs[i], opts.h);
    failures += detail::count_failures(analytic, numeric, opts, worst);
  }
  return failures;
}

/// Runs opts.configs cases drawn from make(rng, config_index).
inline GradcheckResult check_op(const std::string& name,
                                const std::function<GradcheckCase(Rng&, int)>& make,
                                const GradcheckOptions& opts) {
  GradcheckResult r{name, 0, 0, 0.0};
  auto rng = substream(opts.seed, "gradcheck/" + name);
  for (int k = 0; k < opts.configs; ++k) {
    auto c = make(rng, k);
    r.failures += compare_case(c, rng, opts, &r.max_error);
    ++r.configs;
  }
  return r;
}

/// Finite-difference checks for every differentiable tensor op.
inline std::vector<GradcheckResult> gradcheck_ops(const GradcheckOptions& opts = {}) {
  using detail::dim;
  using detail::random_tensor;
  using V = Var<double>;
  using Vs = std::vector<V>;
  std::vector<GradcheckResult> out;
  auto run = [&](const std::string& name, std::function<GradcheckCase(Rng&, int)> make) {
    out.push_back(check_op(name, make, opts));
  };
  // Unary elementwise ops share a shape generator; kinked ones avoid |x| < 1e-3.
  auto unary = [&](const std::string& name, std::function<V(V)> f, double lo = -2, double hi = 2,
                   double avoid = 0.0) {
    run(name, [=](Rng& rng, int) {
      return GradcheckCase{{random_tensor(dim(rng), dim(rng), rng, lo, hi, avoid)},
                           [f](Tape<double>&, Vs& v) { return f(v[0]); }};
    });
  };

  run("matmul", [](Rng& rng, int) {
    auto m = dim(rng), k = dim(rng), n = dim(rng);
    return GradcheckCase{{random_tensor(m, k, rng), random_tensor(k, n, rng)},
                         [](Tape<double>&, Vs& v) { return matmul(v[0], v[1]); }};
  });
  run("matmul_nt", [](Rng& rng, int) {
    auto m = dim(rng), k = dim(rng), n = dim(rng);
    return GradcheckCase{{random_tensor(m, k, rng), random_tensor(n, k, rng)},
                         [](Tape<double>&, Vs& v) { return matmul_nt(v[0], v[1]); }};
  });
  run("spmm", [](Rng& rng, int) {
    auto m = dim(rng), k = dim(rng), n = dim(rng);
    auto p = detail::random_pattern(m, k, rng);
    std::vector<double> vals;
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t e = 0; e < p->nnz(); ++e) vals.push_back(u(rng));
    Csr<double> a(p, vals);
    return GradcheckCase{{random_tensor(k, n, rng)}, [a](Tape<double>&, Vs& v) { return spmm(a, v[0]); }};
  });
  run("spmm_weighted", [](Rng& rng, int) {
    auto m = dim(rng), k = dim(rng), n = dim(rng);
    auto p = detail::random_pattern(m, k, rng, 0.7);
    while (p->nnz() == 0) p = detail::random_pattern(m, k, rng, 0.7);
    return GradcheckCase{{random_tensor(static_cast<Eigen::Index>(p->nnz()), 1, rng), random_tensor(k, n, rng)},
                         [p](Tape<double>&, Vs& v) { return spmm_weighted(p, v[0], v[1]); }};
  });
  run("edge_scores", [](Rng& rng, int) {
    auto m = dim(rng), k = dim(rng);
    auto p = detail::random_pattern(m, k, rng, 0.7);
    while (p->nnz() == 0) p = detail::random_pattern(m, k, rng, 0.7);
    return GradcheckCase{{random_tensor(m, 1, rng), random_tensor(k, 1, rng)},
                         [p](Tape<double>&, Vs& v) { return edge_scores(p, v[0], v[1]); }};
  });
  run("edge_softmax", [](Rng& rng, int) {
    auto m = dim(rng), k = dim(rng);
    auto p = detail::random_pattern(m, k, rng, 0.7);
    while (p->nnz() == 0) p = detail::random_pattern(m, k, rng, 0.7);
    return GradcheckCase{{random_tensor(static_cast<Eigen::Index>(p->nnz()), 1, rng)},
                         [p](Tape<double>&, Vs& v) { return edge_softmax(p, v[0]); }};
  });
  run("add", [](Rng& rng, int k) {
    auto m = dim(rng), n = dim(rng);
    const bool broadcast = k % 2 == 1;
    return GradcheckCase{{random_tensor(m, n, rng), random_tensor(broadcast ? 1 : m, n, rng)},
                         [](Tape<double>&, Vs& v) { return add(v[0], v[1]); }};
  });
  run("sub", [](Rng& rng, int) {
    auto m = dim(rng), n = dim(rng);
    return GradcheckCase{{random_tensor(m, n, rng), random_tensor(m, n, rng)},
                         [](Tape<double>&, Vs& v) { return sub(v[0], v[1]); }};
  });
  run("hadamard", [](Rng& rng, int) {
    auto m = dim(rng), n = dim(rng);
    return GradcheckCase{{random_tensor(m, n, rng), random_tensor(m, n, rng)},
                         [](Tape<double>&, Vs& v) { return hadamard(v[0], v[1]); }};
  });
  run("scale_rows", [](Rng& rng, int) {
    auto m = dim(rng), n = dim(rng);
    return GradcheckCase{{random_tensor(m, n, rng), random_tensor(m, 1, rng)},
                         [](Tape<double>&, Vs& v) { return scale_rows(v[0], v[1]); }};
  });
  run("row_dot", [](Rng& rng, int) {
    auto m = dim(rng), n = dim(rng);
    return GradcheckCase{{random_tensor(m, n, rng), random_tensor(m, n, rng)},
                         [](Tape<double>&, Vs& v) { return row_dot(v[0], v[1]); }};
  });
  unary("affine", [](V a) { return affine(a, -1.7, 0.3); });
  unary("sigmoid", [](V a) { return sigmoid(a); }, -6, 6);
  unary("tanh", [](V a) { return tanh(a); });
  unary("leaky_relu", [](V a) { return leaky_relu(a); }, -2, 2, 1e-3);
  unary("elu", [](V a) { return elu(a); }, -2, 2, 1e-3);
  unary("log", [](V a) { return log(a, 1e-12); }, 0.2, 3);
  unary("clamp", [](V a) { return clamp(a, -1.0, 1.0); }, -2, 2, 0.0);
  unary("log_sigmoid", [](V a) { return log_sigmoid(a); }, -8, 8);
  unary("row_softmax", [](V a) { return row_softmax(a); });
  unary("reduce_sum", [](V a) { return reduce_sum(a); });
  unary("reduce_mean", [](V a) { return reduce_mean(a); });
  unary("row_sum", [](V a) { return row_sum(a); });
  run("dropout", [](Rng& rng, int k) {
    const auto seed = rng();
    const double rate = 0.1 + 0.04 * (k % 10);
    return GradcheckCase{{random_tensor(dim(rng), dim(rng), rng)}, [seed, rate](Tape<double>&, Vs& v) {
                           Rng local(seed);
                           return dropout(v[0], rate, true, local);
                         }};
  });
  run("gather_rows", [](Rng& rng, int) {
    auto m = dim(rng), n = dim(rng), q = dim(rng, 1, 8);
    std::vector<std::uint32_t> idx;
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(m - 1));
    for (Eigen::Index i = 0; i < q; ++i) idx.push_back(pick(rng));
    return GradcheckCase{{random_tensor(m, n, rng)},
                         [idx](Tape<double>&, Vs& v) { return gather_rows<double>(v[0], idx); }};
  });
  run("pick_per_row", [](Rng& rng, int) {
    auto m = dim(rng), n = dim(rng);
    std::vector<std::int32_t> cols;
    std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(n - 1));
    for (Eigen::Index i = 0; i < m; ++i) cols.push_back(pick(rng));
    return GradcheckCase{{random_tensor(m, n, rng)},
                         [cols](Tape<double>&, Vs& v) { return pick_per_row<double>(v[0], cols); }};
  });
  run("concat_cols", [](Rng& rng, int) {
    auto m = dim(rng);
    return GradcheckCase{{random_tensor(m, dim(rng), rng), random_tensor(m, dim(rng), rng), random_tensor(m, dim(rng), rng)},
                         [](Tape<double>&, Vs& v) { return concat_cols<double>(v); }};
  });
  run("concat_rows", [](Rng& rng, int) {
    auto n = dim(rng);
    return GradcheckCase{{random_tensor(dim(rng), n, rng), random_tensor(dim(rng), n, rng)},
                         [](Tape<double>&, Vs& v) { return concat_rows<double>(v); }};
  });
  run("slice_cols", [](Rng& rng, int) {
    auto m = dim(rng), n = dim(rng, 2, 6);
    auto start = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    auto count = std::uniform_int_distribution<Eigen::Index>(1, n - start)(rng);
    return GradcheckCase{{random_tensor(m, n, rng)},
                         [start, count](Tape<double>&, Vs& v) { return slice_cols(v[0], start, count); }};
  });
  run("slice_rows", [](Rng& rng, int) {
    auto m = dim(rng, 2, 6), n = dim(rng);
    auto start = std::uniform_int_distribution<Eigen::Index>(0, m - 1)(rng);
    auto count = std::uniform_int_distribution<Eigen::Index>(1, m - start)(rng);
    return GradcheckCase{{random_tensor(m, n, rng)},
                         [start, count](Tape<double>&, Vs& v) { return slice_rows(v[0], start, count); }};
  });
  run("mlp3", [](Rng& rng, int) {
    auto b = dim(rng, 2, 5), d0 = dim(rng), d1 = dim(rng), d2 = dim(rng), d3 = dim(rng, 2, 4);
    return GradcheckCase{
        {random_tensor(b, d0, rng), random_tensor(d0, d1, rng, -1, 1), random_tensor(1, d1, rng),
         random_tensor(d1, d2, rng, -1, 1), random_tensor(d2, d3, rng, -1, 1)},
        [](Tape<double>&, Vs& v) {
          auto h1 = tanh(add(matmul(v[0], v[1]), v[2]));
          auto h2 = sigmoid(matmul(h1, v[3]));
          return log(row_softmax(matmul(h2, v[4])));
        }};
  });
  return out;
}

}  // namespace infomotif
