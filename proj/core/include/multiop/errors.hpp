#pragma once

#include <stdexcept>
#include <string>

namespace multiop {

/// Operand shapes are incompatible (matrix/vector sizes, subspace ambient
/// dimensions, operator/signal mismatches).
class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric routine could not produce a trustworthy result (SVD failure,
/// non-finite values, step-size bound violated).
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterates grew without bound or turned non-finite during an iterative solve.
class DivergenceError : public NumericalFailure {
public:
  using NumericalFailure::NumericalFailure;
};

/// Training produced a non-finite loss or otherwise went off the rails.
class TrainingFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Noise characteristic function has a (near-)zero, so deconvolution by
/// division is ill-posed.
class NoiseNotInvertible : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input: config files, IDX streams, checkpoints.
/// Messages carry enough position info (byte offset / line) to locate the
/// problem.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Config parsed but describes an unusable experiment (missing keys,
/// out-of-range values, unknown enum tags).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace multiop
