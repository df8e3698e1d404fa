#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infomotif/errors.hpp"
#include "infomotif/tensor.hpp"

namespace infomotif {

/// Named trainable tensor with its accumulated gradient.
template <class T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, Tensor<T> v)
      : name(std::move(n)), value(std::move(v)), grad(Tensor<T>::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

/// Cost attribution for backward timing.
enum class Section : std::uint8_t { kBase = 0, kRegularizer = 1 };

template <class T>
class Tape;

/// Handle to a tape node.
template <class T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape<T>* tape() const noexcept { return tape_; }
  std::uint32_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }
  const Tensor<T>& value() const { return tape_->value(*this); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }

 private:
  Tape<T>* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, which is a
/// topological order; backward() walks them once in reverse.
template <class T>
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Tensor<T>& out_grad)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const noexcept { return grad_enabled_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  Var<T> constant(Tensor<T> value) { return push("constant", std::move(value), false, {}, nullptr); }
  /// Leaf that receives a gradient (when the tape records gradients).
  Var<T> variable(Tensor<T> value) {
    return push("variable", std::move(value), grad_enabled_, {}, nullptr);
  }
  /// Leaf bound to a parameter; backward() adds into p.grad.
  Var<T> param(Parameter<T>& p) {
    auto v = push("param", p.value, grad_enabled_, {}, nullptr);
    nodes_[v.id()].param = &p;
    return v;
  }

  const Tensor<T>& value(Var<T> v) const { return node(v).value; }

  bool has_grad(Var<T> v) const { return node(v).grad.size() > 0; }
  /// Gradient of the last backward() loss w.r.t. v (zeros if unreached).
  Tensor<T> grad(Var<T> v) const {
    const auto& n = node(v);
    if (n.grad.size() == 0) return Tensor<T>::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  bool requires_grad(Var<T> v) const { return node(v).requires_grad; }

  /// Handle the next record() will return; lets a closure read its own output.
  Var<T> next_var() { return Var<T>(this, static_cast<std::uint32_t>(nodes_.size())); }

  /// Appends an op result. Throws NumericError on non-finite output.
  Var<T> record(const char* op, Tensor<T> value, std::initializer_list<Var<T>> inputs,
                Backward backward) {
    return record(op, std::move(value), std::span<const Var<T>>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }
  Var<T> record(const char* op, Tensor<T> value, std::span<const Var<T>> inputs,
                Backward backward) {
    bool rg = false;
    for (auto in : inputs) {
      if (in.tape() != this) throw StateError(std::string(op) + ": input from another tape");
      rg = rg || node(in).requires_grad;
    }
    return push(op, std::move(value), rg && grad_enabled_, std::move(backward), nullptr);
  }

  /// grad(v) += g, if v takes part in differentiation.
  template <class Expr>
  void accumulate(Var<T> v, const Expr& g) {
    auto& n = nodes_[v.id()];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) n.grad = Tensor<T>::Zero(n.value.rows(), n.value.cols());
    n.grad += g;
  }
  /// Direct access for scatter-style accumulation; nullptr when v needs no grad.
  Tensor<T>* grad_buffer(Var<T> v) {
    auto& n = nodes_[v.id()];
    if (!n.requires_grad) return nullptr;
    if (n.grad.size() == 0) n.grad = Tensor<T>::Zero(n.value.rows(), n.value.cols());
    return &n.grad;
  }

  void set_section(Section s) noexcept { section_ = s; }
  Section section() const noexcept { return section_; }
  double backward_seconds(Section s) const { return backward_seconds_[static_cast<int>(s)]; }

  /// Seeds d(loss)/d(loss) = 1 and propagates; loss must be 1 x 1.
  void backward(Var<T> loss) {
    if (!grad_enabled_) throw StateError("backward: tape records no gradients");
    if (backward_done_) throw StateError("backward: already called on this tape");
    const auto& l = node(loss);
    if (l.value.rows() != 1 || l.value.cols() != 1)
      throw ShapeError("backward: loss must be 1x1, got " + shape_of(l.value));
    backward_done_ = true;
    if (!l.requires_grad) return;
    nodes_[loss.id()].grad = Tensor<T>::Ones(1, 1);
    using Clock = std::chrono::steady_clock;
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
      auto& n = nodes_[i];
      if (!n.requires_grad || n.grad.size() == 0) continue;
      if (n.backward) {
        auto start = Clock::now();
        n.backward(*this, n.grad);
        backward_seconds_[static_cast<int>(n.section)] +=
            std::chrono::duration<double>(Clock::now() - start).count();
      }
      if (n.param) n.param->grad += n.grad;
    }
  }

 private:
  struct Node {
    const char* op = "";
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    Section section = Section::kBase;
    Backward backward;
    Parameter<T>* param = nullptr;
  };

  const Node& node(Var<T> v) const {
    if (v.tape() != this || v.id() >= nodes_.size()) throw StateError("variable does not belong to this tape");
    return nodes_[v.id()];
  }

  Var<T> push(const char* op, Tensor<T> value, bool requires_grad, Backward backward,
              Parameter<T>* param) {
    if (!value.allFinite()) throw NumericError(std::string(op) + " produced a non-finite value");
    if (nodes_.size() >= std::numeric_limits<std::uint32_t>::max()) throw StateError("tape is full");
    Node n;
    n.op = op;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    n.section = section_;
    if (requires_grad) n.backward = std::move(backward);
    n.param = param;
    nodes_.push_back(std::move(n));
    return Var<T>(this, static_cast<std::uint32_t>(nodes_.size() - 1));
  }

  std::vector<Node> nodes_;
  bool grad_enabled_ = true;
  bool backward_done_ = false;
  Section section_ = Section::kBase;
  std::array<double, 2> backward_seconds_{0.0, 0.0};
};

/// Sets the tape section for the lifetime of the guard.
template <class T>
class SectionScope {
 public:
  SectionScope(Tape<T>& tape, Section s) : tape_(tape), saved_(tape.section()) { tape.set_section(s); }
  ~SectionScope() { tape_.set_section(saved_); }
  SectionScope(const SectionScope&) = delete;
  SectionScope& operator=(const SectionScope&) = delete;

 private:
  Tape<T>& tape_;
  Section saved_;
};

namespace detail {

[[noreturn]] inline void shape_mismatch(const char* op, const std::string& a, const std::string& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a + " and " + b);
}

template <class T>
Tape<T>& same_tape(const char* op, Var<T> a, Var<T> b) {
  if (!a.valid() || a.tape() != b.tape()) throw StateError(std::string(op) + ": operands on different tapes");
  return *a.tape();
}

}  // namespace detail

// ---- linear algebra -------------------------------------------------------

template <class T>
Var<T> matmul(Var<T> a, Var<T> b) {
  auto& tape = detail::same_tape("matmul", a, b);
  const auto& A = a.value();
  const auto& B = b.value();
  if (A.cols() != B.rows()) detail::shape_mismatch("matmul", shape_of(A), shape_of(B));
  Tensor<T> out = A * B;
  return tape.record("matmul", std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    if (t.requires_grad(a)) t.accumulate(a, g * b.value().transpose());
    if (t.requires_grad(b)) t.accumulate(b, a.value().transpose() * g);
  });
}

/// a * b^T
template <class T>
Var<T> matmul_nt(Var<T> a, Var<T> b) {
  auto& tape = detail::same_tape("matmul_nt", a, b);
  const auto& A = a.value();
  const auto& B = b.value();
  if (A.cols() != B.cols()) detail::shape_mismatch("matmul_nt", shape_of(A), shape_of(B));
  Tensor<T> out = A * B.transpose();
  return tape.record("matmul_nt", std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    if (t.requires_grad(a)) t.accumulate(a, g * b.value());
    if (t.requires_grad(b)) t.accumulate(b, g.transpose() * a.value());
  });
}

/// Constant sparse operator times dense.
template <class T>
Var<T> spmm(const Csr<T>& a, Var<T> x) {
  auto& tape = *x.tape();
  const auto& X = x.value();
  if (a.cols() != static_cast<std::size_t>(X.rows()))
    detail::shape_mismatch("spmm", std::to_string(a.rows()) + "x" + std::to_string(a.cols()), shape_of(X));
  const auto& p = a.pattern();
  auto vals = a.values();
  Tensor<T> out = Tensor<T>::Zero(static_cast<Eigen::Index>(a.rows()), X.cols());
  for (std::size_t k = 0; k < p.nnz(); ++k) out.row(p.entry_row[k]) += vals[k] * X.row(p.indices[k]);
  return tape.record("spmm", std::move(out), {x}, [a, x](Tape<T>& t, const Tensor<T>& g) {
    auto* dx = t.grad_buffer(x);
    if (!dx) return;
    const auto& pp = a.pattern();
    auto v = a.values();
    for (std::size_t k = 0; k < pp.nnz(); ++k) dx->row(pp.indices[k]) += v[k] * g.row(pp.entry_row[k]);
  });
}

/// Sparse operator with differentiable entry values w (nnz x 1) times dense x.
template <class T>
Var<T> spmm_weighted(std::shared_ptr<const CsrPattern> pattern, Var<T> w, Var<T> x) {
  auto& tape = detail::same_tape("spmm_weighted", w, x);
  const auto& p = *pattern;
  const auto& W = w.value();
  const auto& X = x.value();
  if (W.cols() != 1 || static_cast<std::size_t>(W.rows()) != p.nnz() ||
      static_cast<std::size_t>(X.rows()) != p.cols)
    detail::shape_mismatch("spmm_weighted", shape_of(W), shape_of(X));
  Tensor<T> out = Tensor<T>::Zero(static_cast<Eigen::Index>(p.rows), X.cols());
  for (std::size_t k = 0; k < p.nnz(); ++k) out.row(p.entry_row[k]) += W(k, 0) * X.row(p.indices[k]);
  return tape.record("spmm_weighted", std::move(out), {w, x},
                     [pattern, w, x](Tape<T>& t, const Tensor<T>& g) {
                       const auto& pp = *pattern;
                       auto* dw = t.grad_buffer(w);
                       auto* dx = t.grad_buffer(x);
                       const auto& Wv = w.value();
                       const auto& Xv = x.value();
                       for (std::size_t k = 0; k < pp.nnz(); ++k) {
                         const auto r = pp.entry_row[k];
                         const auto c = pp.indices[k];
                         if (dw) (*dw)(k, 0) += g.row(r).dot(Xv.row(c));
                         if (dx) dx->row(c) += Wv(k, 0) * g.row(r);
                       }
                     });
}

/// Per-entry score dst[row] + src[col] for every pattern entry (nnz x 1).
template <class T>
Var<T> edge_scores(std::shared_ptr<const CsrPattern> pattern, Var<T> dst, Var<T> src) {
  auto& tape = detail::same_tape("edge_scores", dst, src);
  const auto& p = *pattern;
  const auto& D = dst.value();
  const auto& S = src.value();
  if (D.cols() != 1 || S.cols() != 1 || static_cast<std::size_t>(D.rows()) != p.rows ||
      static_cast<std::size_t>(S.rows()) != p.cols)
    detail::shape_mismatch("edge_scores", shape_of(D), shape_of(S));
  Tensor<T> out(static_cast<Eigen::Index>(p.nnz()), 1);
  for (std::size_t k = 0; k < p.nnz(); ++k) out(k, 0) = D(p.entry_row[k], 0) + S(p.indices[k], 0);
  return tape.record("edge_scores", std::move(out), {dst, src},
                     [pattern, dst, src](Tape<T>& t, const Tensor<T>& g) {
                       const auto& pp = *pattern;
                       auto* dd = t.grad_buffer(dst);
                       auto* ds = t.grad_buffer(src);
                       for (std::size_t k = 0; k < pp.nnz(); ++k) {
                         if (dd) (*dd)(pp.entry_row[k], 0) += g(k, 0);
                         if (ds) (*ds)(pp.indices[k], 0) += g(k, 0);
                       }
                     });
}

/// Softmax of entry logits (nnz x 1) within each pattern row.
template <class T>
Var<T> edge_softmax(std::shared_ptr<const CsrPattern> pattern, Var<T> logits) {
  auto& tape = *logits.tape();
  const auto& p = *pattern;
  const auto& L = logits.value();
  if (L.cols() != 1 || static_cast<std::size_t>(L.rows()) != p.nnz())
    detail::shape_mismatch("edge_softmax", shape_of(L), std::to_string(p.nnz()) + "x1");
  Tensor<T> out(L.rows(), 1);
  for (std::size_t r = 0; r < p.rows; ++r) {
    const auto b = p.offsets[r], e = p.offsets[r + 1];
    if (b == e) continue;
    T mx = L(b, 0);
    for (auto k = b; k < e; ++k) mx = std::max(mx, L(k, 0));
    T sum = 0;
    for (auto k = b; k < e; ++k) sum += (out(k, 0) = std::exp(L(k, 0) - mx));
    for (auto k = b; k < e; ++k) out(k, 0) /= sum;
  }
  auto y = tape.next_var();
  return tape.record("edge_softmax", std::move(out), {logits},
                     [pattern, logits, y](Tape<T>& t, const Tensor<T>& g) {
                       const auto& pp = *pattern;
                       const auto& Y = y.value();
                       auto* dl = t.grad_buffer(logits);
                       for (std::size_t r = 0; r < pp.rows; ++r) {
                         T dot = 0;
                         for (auto k = pp.offsets[r]; k < pp.offsets[r + 1]; ++k) dot += g(k, 0) * Y(k, 0);
                         for (auto k = pp.offsets[r]; k < pp.offsets[r + 1]; ++k)
                           (*dl)(k, 0) += Y(k, 0) * (g(k, 0) - dot);
                       }
                     });
}

// ---- elementwise ------------------------------------------------------------

/// a + b; b may also be a 1 x cols row broadcast over the rows of a.
template <class T>
Var<T> add(Var<T> a, Var<T> b) {
  auto& tape = detail::same_tape("add", a, b);
  const auto& A = a.value();
  const auto& B = b.value();
  if (A.rows() == B.rows() && A.cols() == B.cols()) {
    Tensor<T> out = A + B;
    return tape.record("add", std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(a, g);
      t.accumulate(b, g);
    });
  }
  if (B.rows() == 1 && B.cols() == A.cols()) {
    Tensor<T> out = A.rowwise() + B.row(0);
    return tape.record("add", std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(a, g);
      if (t.requires_grad(b)) t.accumulate(b, g.colwise().sum());
    });
  }
  detail::shape_mismatch("add", shape_of(A), shape_of(B));
}

template <class T>
Var<T> sub(Var<T> a, Var<T> b) {
  auto& tape = detail::same_tape("sub", a, b);
  const auto& A = a.value();
  const auto& B = b.value();
  if (A.rows() != B.rows() || A.cols() != B.cols()) detail::shape_mismatch("sub", shape_of(A), shape_of(B));
  Tensor<T> out = A - B;
  return tape.record("sub", std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    t.accumulate(a, g);
    if (t.requires_grad(b)) t.accumulate(b, -g);
  });
}

template <class T>
Var<T> hadamard(Var<T> a, Var<T> b) {
  auto& tape = detail::same_tape("hadamard", a, b);
  const auto& A = a.value();
  const auto& B = b.value();
  if (A.rows() != B.rows() || A.cols() != B.cols())
    detail::shape_mismatch("hadamard", shape_of(A), shape_of(B));
  Tensor<T> out = A.cwiseProduct(B);
  return tape.record("hadamard", std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    if (t.requires_grad(a)) t.accumulate(a, g.cwiseProduct(b.value()));
    if (t.requires_grad(b)) t.accumulate(b, g.cwiseProduct(a.value()));
  });
}

/// s * a + c
template <class T>
Var<T> affine(Var<T> a, T s, T c = T(0)) {
  auto& tape = *a.tape();
  Tensor<T> out = (a.value() * s).array() + c;
  return tape.record("affine", std::move(out), {a},
                     [a, s](Tape<T>& t, const Tensor<T>& g) { t.accumulate(a, g * s); });
}

template <class T>
Var<T> scale(Var<T> a, T s) {
  return affine(a, s);
}

/// Row i of a (m x k) multiplied by c(i, 0) (c is m x 1).
template <class T>
Var<T> scale_rows(Var<T> a, Var<T> c) {
  auto& tape = detail::same_tape("scale_rows", a, c);
  const auto& A = a.value();
  const auto& C = c.value();
  if (C.cols() != 1 || C.rows() != A.rows()) detail::shape_mismatch("scale_rows", shape_of(A), shape_of(C));
  Tensor<T> out = A.array().colwise() * C.col(0).array();
  return tape.record("scale_rows", std::move(out), {a, c}, [a, c](Tape<T>& t, const Tensor<T>& g) {
    if (t.requires_grad(a)) t.accumulate(a, (g.array().colwise() * c.value().col(0).array()).matrix());
    if (t.requires_grad(c)) t.accumulate(c, g.cwiseProduct(a.value()).rowwise().sum());
  });
}

namespace detail {

template <class T, class F, class D>
Var<T> unary(const char* op, Var<T> a, F f, D dfdx_from_xy) {
  auto& tape = *a.tape();
  Tensor<T> out = a.value().unaryExpr(f);
  auto y = tape.next_var();
  return tape.record(op, std::move(out), {a}, [a, y, dfdx_from_xy](Tape<T>& t, const Tensor<T>& g) {
    const auto& X = a.value();
    const auto& Y = y.value();
    Tensor<T> d(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.size(); ++i) d.data()[i] = g.data()[i] * dfdx_from_xy(X.data()[i], Y.data()[i]);
    t.accumulate(a, d);
  });
}

}  // namespace detail

template <class T>
Var<T> sigmoid(Var<T> a) {
  return detail::unary(
      "sigmoid", a,
      [](T x) { return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x)); },
      [](T, T y) { return y * (T(1) - y); });
}

template <class T>
Var<T> tanh(Var<T> a) {
  return detail::unary("tanh", a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

inline constexpr double kLeakySlope = 0.2;

template <class T>
Var<T> leaky_relu(Var<T> a, T slope = T(kLeakySlope)) {
  return detail::unary(
      "leaky_relu", a, [slope](T x) { return x > 0 ? x : slope * x; },
      [slope](T x, T) { return x > 0 ? T(1) : slope; });
}

template <class T>
Var<T> elu(Var<T> a, T alpha = T(1)) {
  return detail::unary(
      "elu", a, [alpha](T x) { return x > 0 ? x : alpha * (std::exp(x) - T(1)); },
      [alpha](T x, T y) { return x > 0 ? T(1) : y + alpha; });
}

/// log(max(x, floor)); entries below floor get zero gradient.
template <class T>
Var<T> log(Var<T> a, T floor = T(1e-12)) {
  return detail::unary(
      "log", a, [floor](T x) { return std::log(std::max(x, floor)); },
      [floor](T x, T) { return x > floor ? T(1) / x : T(0); });
}

template <class T>
Var<T> clamp(Var<T> a, T lo, T hi) {
  return detail::unary(
      "clamp", a, [lo, hi](T x) { return std::clamp(x, lo, hi); },
      [lo, hi](T x, T) { return (x > lo && x < hi) ? T(1) : T(0); });
}

/// Bound on |x| for log_sigmoid: sigmoid(+-bound) = 1 - 1e-12 / 1e-12.
inline const double kLogSigmoidBound = std::log((1.0 - 1e-12) / 1e-12);

/// log(sigmoid(x)) with x clamped to [-bound, bound], i.e. the log of a
/// probability clamped to [1e-12, 1 - 1e-12].
template <class T>
Var<T> log_sigmoid(Var<T> a, T bound = T(kLogSigmoidBound)) {
  return detail::unary(
      "log_sigmoid", a,
      [bound](T x) {
        x = std::clamp(x, -bound, bound);
        return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
      },
      [bound](T x, T) {
        if (x <= -bound || x >= bound) return T(0);
        return x >= 0 ? std::exp(-x) / (T(1) + std::exp(-x)) : T(1) / (T(1) + std::exp(x));
      });
}

/// Inverted dropout; identity (same variable) when not training or rate == 0.
template <class T, class Rng>
Var<T> dropout(Var<T> a, double rate, bool train, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must be in [0, 1)");
  if (!train || rate == 0.0) return a;
  auto& tape = *a.tape();
  const auto& A = a.value();
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale_kept = T(1) / T(1.0 - rate);
  Tensor<T> mask(A.rows(), A.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(rng) ? scale_kept : T(0);
  Tensor<T> out = A.cwiseProduct(mask);
  return tape.record("dropout", std::move(out), {a}, [a, mask = std::move(mask)](Tape<T>& t, const Tensor<T>& g) {
    t.accumulate(a, g.cwiseProduct(mask));
  });
}

// ---- softmax and reductions -------------------------------------------------

template <class T>
Var<T> row_softmax(Var<T> a) {
  auto& tape = *a.tape();
  const auto& A = a.value();
  Tensor<T> out(A.rows(), A.cols());
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    const T mx = A.row(r).maxCoeff();
    out.row(r) = (A.row(r).array() - mx).exp();
    out.row(r) /= out.row(r).sum();
  }
  auto y = tape.next_var();
  return tape.record("row_softmax", std::move(out), {a}, [a, y](Tape<T>& t, const Tensor<T>& g) {
    const auto& Y = y.value();
    Tensor<T> dots = g.cwiseProduct(Y).rowwise().sum();
    Tensor<T> d = Y.cwiseProduct((g.colwise() - dots.col(0)));
    t.accumulate(a, d);
  });
}

template <class T>
Var<T> reduce_sum(Var<T> a) {
  Tensor<T> out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape()->record("reduce_sum", std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    t.accumulate(a, Tensor<T>::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

template <class T>
Var<T> reduce_mean(Var<T> a) {
  if (a.value().size() == 0) throw ShapeError("reduce_mean: empty tensor");
  const T inv = T(1) / static_cast<T>(a.value().size());
  Tensor<T> out(1, 1);
  out(0, 0) = a.value().sum() * inv;
  return a.tape()->record("reduce_mean", std::move(out), {a}, [a, inv](Tape<T>& t, const Tensor<T>& g) {
    t.accumulate(a, Tensor<T>::Constant(a.rows(), a.cols(), g(0, 0) * inv));
  });
}

/// m x k -> m x 1
template <class T>
Var<T> row_sum(Var<T> a) {
  Tensor<T> out = a.value().rowwise().sum();
  return a.tape()->record("row_sum", std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    Tensor<T> d = g.col(0).replicate(1, a.cols());
    t.accumulate(a, d);
  });
}

/// Row-wise dot products of equally shaped a and b (m x 1).
template <class T>
Var<T> row_dot(Var<T> a, Var<T> b) {
  auto& tape = detail::same_tape("row_dot", a, b);
  const auto& A = a.value();
  const auto& B = b.value();
  if (A.rows() != B.rows() || A.cols() != B.cols()) detail::shape_mismatch("row_dot", shape_of(A), shape_of(B));
  Tensor<T> out = A.cwiseProduct(B).rowwise().sum();
  return tape.record("row_dot", std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    if (t.requires_grad(a)) t.accumulate(a, (b.value().array().colwise() * g.col(0).array()).matrix());
    if (t.requires_grad(b)) t.accumulate(b, (a.value().array().colwise() * g.col(0).array()).matrix());
  });
}

// ---- structural ---------------------------------------------------------------

template <class T>
Var<T> gather_rows(Var<T> a, std::span<const std::uint32_t> index) {
  const auto& A = a.value();
  Tensor<T> out(static_cast<Eigen::Index>(index.size()), A.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= A.rows())
      throw ShapeError("gather_rows: row " + std::to_string(index[i]) + " outside " + shape_of(A));
    out.row(static_cast<Eigen::Index>(i)) = A.row(index[i]);
  }
  std::vector<std::uint32_t> idx(index.begin(), index.end());
  return a.tape()->record("gather_rows", std::move(out), {a},
                          [a, idx = std::move(idx)](Tape<T>& t, const Tensor<T>& g) {
                            auto* d = t.grad_buffer(a);
                            for (std::size_t i = 0; i < idx.size(); ++i)
                              d->row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
                          });
}

/// Entry (i, cols[i]) of every row (m x 1).
template <class T>
Var<T> pick_per_row(Var<T> a, std::span<const std::int32_t> cols) {
  const auto& A = a.value();
  if (static_cast<Eigen::Index>(cols.size()) != A.rows())
    detail::shape_mismatch("pick_per_row", shape_of(A), std::to_string(cols.size()) + " indices");
  Tensor<T> out(A.rows(), 1);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (cols[i] < 0 || cols[i] >= A.cols()) throw ShapeError("pick_per_row: column out of range");
    out(i, 0) = A(i, cols[i]);
  }
  std::vector<std::int32_t> c(cols.begin(), cols.end());
  return a.tape()->record("pick_per_row", std::move(out), {a}, [a, c = std::move(c)](Tape<T>& t, const Tensor<T>& g) {
    auto* d = t.grad_buffer(a);
    for (std::size_t i = 0; i < c.size(); ++i) (*d)(static_cast<Eigen::Index>(i), c[i]) += g(i, 0);
  });
}

template <class T>
Var<T> concat_cols(std::span<const Var<T>> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  auto& tape = *parts[0].tape();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.tape() != &tape) throw StateError("concat_cols: operands on different tapes");
    if (p.rows() != parts[0].rows())
      detail::shape_mismatch("concat_cols", shape_of(parts[0].value()), shape_of(p.value()));
    cols += p.cols();
  }
  Tensor<T> out(parts[0].rows(), cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var<T>> in(parts.begin(), parts.end());
  return tape.record("concat_cols", std::move(out), parts, [in](Tape<T>& t, const Tensor<T>& g) {
    Eigen::Index off = 0;
    for (const auto& p : in) {
      t.accumulate(p, g.middleCols(off, p.cols()));
      off += p.cols();
    }
  });
}

template <class T>
Var<T> concat_rows(std::span<const Var<T>> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  auto& tape = *parts[0].tape();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != parts[0].cols())
      detail::shape_mismatch("concat_rows", shape_of(parts[0].value()), shape_of(p.value()));
    rows += p.rows();
  }
  Tensor<T> out(rows, parts[0].cols());
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  std::vector<Var<T>> in(parts.begin(), parts.end());
  return tape.record("concat_rows", std::move(out), parts, [in](Tape<T>& t, const Tensor<T>& g) {
    Eigen::Index off = 0;
    for (const auto& p : in) {
      t.accumulate(p, g.middleRows(off, p.rows()));
      off += p.rows();
    }
  });
}

/// Columns [start, start + count) of a.
template <class T>
Var<T> slice_cols(Var<T> a, Eigen::Index start, Eigen::Index count) {
  const auto& A = a.value();
  if (start < 0 || count < 0 || start + count > A.cols())
    throw ShapeError("slice_cols: columns [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") outside " + shape_of(A));
  Tensor<T> out = A.middleCols(start, count);
  return a.tape()->record("slice_cols", std::move(out), {a}, [a, start, count](Tape<T>& t, const Tensor<T>& g) {
    if (auto* d = t.grad_buffer(a)) d->middleCols(start, count) += g;
  });
}

/// Rows [start, start + count) of a.
template <class T>
Var<T> slice_rows(Var<T> a, Eigen::Index start, Eigen::Index count) {
  const auto& A = a.value();
  if (start < 0 || count < 0 || start + count > A.rows())
    throw ShapeError("slice_rows: rows [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") outside " + shape_of(A));
  Tensor<T> out = A.middleRows(start, count);
  return a.tape()->record("slice_rows", std::move(out), {a}, [a, start, count](Tape<T>& t, const Tensor<T>& g) {
    if (auto* d = t.grad_buffer(a)) d->middleRows(start, count) += g;
  });
}

}  // namespace infomotif
