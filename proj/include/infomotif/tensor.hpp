#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "infomotif/errors.hpp"

namespace infomotif {

/// Dense 2-D tensor; vectors are n x 1, scalars 1 x 1.
template <class T>
using Tensor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
std::string shape_of(const Tensor<T>& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

/// Sparsity structure in compressed-row form. Immutable once built.
struct CsrPattern {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> offsets;  ///< rows + 1
  std::vector<std::uint32_t> indices;  ///< column per entry, sorted within a row
  std::vector<std::uint32_t> entry_row;

  std::size_t nnz() const noexcept { return indices.size(); }

  /// Entries given as (row, col) pairs, already grouped by row in order.
  static std::shared_ptr<const CsrPattern> from_rows(std::size_t rows, std::size_t cols,
                                                     std::vector<std::uint32_t> offsets,
                                                     std::vector<std::uint32_t> indices) {
    if (offsets.size() != rows + 1 || offsets.back() != indices.size())
      throw ShapeError("csr: offsets do not match entries");
    auto p = std::make_shared<CsrPattern>();
    p->rows = rows;
    p->cols = cols;
    p->offsets = std::move(offsets);
    p->indices = std::move(indices);
    p->entry_row.resize(p->indices.size());
    for (std::size_t r = 0; r < rows; ++r)
      for (auto k = p->offsets[r]; k < p->offsets[r + 1]; ++k) {
        if (p->indices[k] >= cols) throw ShapeError("csr: column index out of range");
        p->entry_row[k] = static_cast<std::uint32_t>(r);
      }
    return p;
  }
};

/// Constant sparse operator: shared pattern plus values. Copies are cheap.
template <class T>
class Csr {
 public:
  Csr() = default;
  Csr(std::shared_ptr<const CsrPattern> pattern, std::vector<T> values)
      : pattern_(std::move(pattern)),
        values_(std::make_shared<const std::vector<T>>(std::move(values))) {
    if (!pattern_ || values_->size() != pattern_->nnz())
      throw ShapeError("csr: value count does not match pattern");
  }

  std::size_t rows() const noexcept { return pattern_ ? pattern_->rows : 0; }
  std::size_t cols() const noexcept { return pattern_ ? pattern_->cols : 0; }
  std::size_t nnz() const noexcept { return pattern_ ? pattern_->nnz() : 0; }
  const CsrPattern& pattern() const { return *pattern_; }
  const std::shared_ptr<const CsrPattern>& pattern_ptr() const noexcept { return pattern_; }
  std::span<const T> values() const { return *values_; }

  Tensor<T> dense() const {
    Tensor<T> d = Tensor<T>::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
    const auto& p = *pattern_;
    for (std::size_t k = 0; k < p.nnz(); ++k) d(p.entry_row[k], p.indices[k]) = (*values_)[k];
    return d;
  }

  template <class U>
  Csr<U> cast() const {
    return Csr<U>(pattern_, std::vector<U>(values_->begin(), values_->end()));
  }

 private:
  std::shared_ptr<const CsrPattern> pattern_;
  std::shared_ptr<const std::vector<T>> values_;
};

}  // namespace infomotif
