#pragma once

#include <string>
#include <vector>

#include "infomotif/gnn.hpp"
#include "infomotif/gradcheck.hpp"
#include "infomotif/graph.hpp"

namespace infomotif {

/// Whole GNN layers on random small graphs: gradients of sum(C * h) with
/// respect to the input features and every layer parameter.
inline GradcheckResult check_layer(Arch arch, const GradcheckOptions& opts) {
  const std::string name = "layer/" + to_string(arch);
  GradcheckResult r{name, 0, 0, 0.0};
  auto rng = substream(opts.seed, "gradcheck/" + name);
  for (int k = 0; k < opts.configs; ++k) {
    const auto n = static_cast<std::size_t>(detail::dim(rng, 3, 9));
    std::bernoulli_distribution keep(0.4);
    std::vector<Edge> edges;
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b)
        if (keep(rng)) edges.push_back({a, b});
    auto g = Graph::build(n, edges, false);

    GnnConfig cfg;
    cfg.arch = arch;
    cfg.layers = 1 + k % 2;
    cfg.heads = arch == Arch::kGat ? static_cast<std::size_t>(detail::dim(rng, 1, 3)) : 1;
    cfg.hidden = cfg.heads * static_cast<std::size_t>(detail::dim(rng, 1, 3));
    cfg.out_dim = static_cast<std::size_t>(detail::dim(rng, 1, 4));
    cfg.dropout = 0.0;
    const auto f = detail::dim(rng, 1, 4);
    GnnEncoder<double> enc(cfg, static_cast<std::size_t>(f), rng);
    for (auto* p : enc.parameters()) p->value = detail::random_tensor(p->value.rows(), p->value.cols(), rng, -1, 1);
    auto ops = GraphOperators<double>::build(g);
    auto x = detail::random_tensor(static_cast<Eigen::Index>(n), f, rng);
    auto coeff = detail::random_tensor(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.out_dim), rng, -1, 1);

    auto value_at = [&](const Tensor<double>& input) {
      Tape<double> tape(false);
      Rng unused(0);
      return enc.forward(tape, ops, tape.constant(input), false, unused).value().cwiseProduct(coeff).sum();
    };
    for (auto* p : enc.parameters()) p->zero_grad();
    Tensor<double> gx;
    {
      Tape<double> tape;
      Rng unused(0);
      auto xv = tape.variable(x);
      auto h = enc.forward(tape, ops, xv, false, unused);
      tape.backward(reduce_sum(hadamard(h, tape.constant(coeff))));
      gx = tape.grad(xv);
    }
    r.failures += detail::count_failures(gx, finite_difference_grad(value_at, x, opts.h), opts, &r.max_error);
    for (auto* p : enc.parameters()) {
      const Tensor<double> analytic = p->grad;
      const Tensor<double> saved = p->value;
      auto numeric = finite_difference_grad(
          [&](const Tensor<double>& v) {
            p->value = v;
            return value_at(x);
          },
          saved, opts.h);
      p->value = saved;
      r.failures += detail::count_failures(analytic, numeric, opts, &r.max_error);
    }
    ++r.configs;
  }
  return r;
}

/// Every tensor op followed by both layer types.
inline std::vector<GradcheckResult> gradcheck_all(const GradcheckOptions& opts = {}) {
  auto out = gradcheck_ops(opts);
  out.push_back(check_layer(Arch::kGcn, opts));
  out.push_back(check_layer(Arch::kGat, opts));
  return out;
}

}  // namespace infomotif
