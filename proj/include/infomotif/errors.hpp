#pragma once

#include <stdexcept>
#include <string>

namespace infomotif {

/// Malformed input file; the message carries path and 1-based line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node id (or other index) outside the admissible range.
class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Invalid configuration value or combination.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tensor shapes incompatible for an op.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf produced by an op, or training divergence.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API used out of order (e.g. backward twice on one tape).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace infomotif
