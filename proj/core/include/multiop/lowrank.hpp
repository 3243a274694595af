#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "multiop/numerics.hpp"
#include "multiop/operators.hpp"
#include "multiop/rng.hpp"
#include "multiop/signals.hpp"

namespace multiop {

/// Knobs for the singular-value-thresholding recovery. tau/delta <= 0 mean
/// "pick the default at solve time from the bank and data": tau = 5 times the
/// Frobenius norm of the back-projected data (equivalently 5 sqrt(n N) times
/// its RMS entry), delta = 0.9 / max_g sigma_max(A_g)^2. The step bound
/// delta <= 1 / max_g sigma_max(A_g)^2 is enforced against the bank before
/// iterating.
struct SvtConfig {
  double tau = 0.0;
  double delta = 0.0;
  int max_iters = 5000;
  double residual_tol = 1e-4;
  /// When true, a run that is provably not going to reach residual_tol within
  /// max_iters (predicted from the trailing convergence rate, with a 3x
  /// safety margin) stops early and reports converged = false. Saves large
  /// amounts of time on hopeless grid cells; never fires on runs that are on
  /// track to converge.
  bool predict_abort = true;
};

/// Concrete tau/delta for this bank + data, with the step bound checked.
SvtConfig resolve_svt_config(SvtConfig cfg, const OperatorBank& bank,
                             const Dataset& dataset);

struct RecoveryResult {
  Matrix x_hat; // n x N, columns in dataset order
  std::optional<double> relative_error;
  int iterations_used = 0;
  bool converged = false;
  /// Relative measurement residual after each iteration.
  std::vector<double> residual_trace;
};

/// Joint recovery of all signals as the columns of a low-nuclear-norm matrix
/// consistent with the per-sample measurements. Uzawa-style iteration:
/// Z = 0; repeat { X = singular-value shrink of Z by tau; Z_i += delta *
/// A_{g_i}^T (y_i - A_{g_i} X_i) } until the relative measurement residual
/// falls below residual_tol or max_iters is hit.
RecoveryResult svt_recover(const Dataset& dataset, const OperatorBank& bank,
                           const SvtConfig& cfg);

/// Success rule: sum_i ||x_hat_i - x_i||^2 / sum_i ||x_i||^2 < 0.1.
/// Throws if the ground truth is identically zero (undefined ratio).
std::pair<bool, double> recovery_success(const Matrix& x_hat, const Matrix& x_true);

/// Fraction of `trials` independent draws (fresh subspace, Gaussian bank and
/// data per trial, seeded from `seed`) in which svt_recover succeeds.
double phase_cell(int n, int k, int group_count, int m, int sample_count,
                  int trials, const SvtConfig& cfg, std::uint64_t seed);

} // namespace multiop
