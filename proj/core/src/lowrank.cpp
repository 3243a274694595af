#include "multiop/lowrank.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "multiop/errors.hpp"

namespace multiop {

namespace {

/// Singular-value soft threshold of Z, n <= N, via the eigendecomposition of
/// Z Z^T: if Z = U S V^T then X = U shrink(S) V^T = U diag(f) U^T Z with
/// f_i = max(1 - tau/s_i, 0). Costs O(n^2 N) instead of a full SVD and is
/// exact up to the squared-spectrum conditioning, which is harmless here
/// because shrink zeroes everything near and below tau anyway.
Matrix shrink_gram(const Matrix& z, double tau) {
  const auto n = z.rows();
  Matrix gram = Matrix::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(z);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success)
    throw NumericalFailure("svt_recover: eigendecomposition failed");

  const Vector& lambda = eig.eigenvalues(); // ascending
  int kept = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (lambda(i) > tau * tau) ++kept;
  if (kept == 0) return Matrix::Zero(z.rows(), z.cols());

  // Only the trailing `kept` eigenpairs carry through the shrink.
  Matrix q = eig.eigenvectors().rightCols(kept);
  Vector factor(kept);
  for (int i = 0; i < kept; ++i) {
    double s = std::sqrt(lambda(n - kept + i));
    factor(i) = 1.0 - tau / s;
  }
  Matrix projected = q.transpose() * z; // kept x N
  projected.array().colwise() *= factor.array();
  return q * projected;
}

struct Group {
  const LinearOperator* op = nullptr;
  std::vector<int> columns; // dataset indices, ascending
  Matrix y;                 // m_g x |columns|
};

} // namespace

SvtConfig resolve_svt_config(SvtConfig cfg, const OperatorBank& bank,
                             const Dataset& dataset) {
  if (cfg.max_iters < 1)
    throw std::invalid_argument("svt config: max_iters must be >= 1");
  if (!(cfg.residual_tol > 0.0))
    throw std::invalid_argument("svt config: residual_tol must be positive");

  double sigma2 = 0.0;
  for (const LinearOperator& op : bank.operators)
    sigma2 = std::max(sigma2, op.sigma_max() * op.sigma_max());
  if (!(sigma2 > 0.0))
    throw NumericalFailure("svt config: bank has zero operators");

  if (cfg.delta <= 0.0) cfg.delta = 0.9 / sigma2;
  if (cfg.delta > 1.0 / sigma2 * (1.0 + 1e-12))
    throw std::invalid_argument("svt config: delta exceeds 1 / max sigma_max^2");

  if (cfg.tau <= 0.0) {
    double backprojected2 = 0.0;
    for (int i = 0; i < dataset.size(); ++i) {
      const auto idx = static_cast<std::size_t>(i);
      backprojected2 +=
          bank.operator_of(i).pinv_apply(dataset.measurements[idx]).squaredNorm();
    }
    cfg.tau = 5.0 * std::sqrt(backprojected2);
    if (!(cfg.tau > 0.0)) cfg.tau = 1.0; // all-zero data; any tau keeps X = 0
  }

  // Noisy measurements cannot be fit below the noise floor; loosen the target
  // accordingly.
  if (dataset.noise_sigma > 0.0) {
    double energy = 0.0;
    std::size_t entries = 0;
    for (const Vector& y : dataset.measurements) {
      energy += y.squaredNorm();
      entries += static_cast<std::size_t>(y.size());
    }
    if (energy > 0.0) {
      double floor =
          dataset.noise_sigma * std::sqrt(static_cast<double>(entries) / energy);
      cfg.residual_tol = std::max(cfg.residual_tol, floor);
    }
  }
  return cfg;
}

RecoveryResult svt_recover(const Dataset& dataset, const OperatorBank& bank,
                           const SvtConfig& raw_cfg) {
  if (dataset.size() != static_cast<int>(bank.assignment.size()))
    throw DimensionMismatch("svt_recover: dataset/bank sample count mismatch");
  const int n = bank.n;
  const int total = dataset.size();
  if (total == 0) throw std::invalid_argument("svt_recover: empty dataset");

  SvtConfig cfg = resolve_svt_config(raw_cfg, bank, dataset);

  // Pack measurements per operator so the inner loop is a handful of GEMMs
  // over contiguous column blocks.
  std::vector<Group> groups(static_cast<std::size_t>(bank.group_count()));
  for (int g = 0; g < bank.group_count(); ++g) {
    Group& grp = groups[static_cast<std::size_t>(g)];
    grp.op = &bank.operators[static_cast<std::size_t>(g)];
    grp.columns = bank.samples_of(g);
    grp.y.resize(grp.op->rows(), static_cast<Eigen::Index>(grp.columns.size()));
    for (std::size_t c = 0; c < grp.columns.size(); ++c) {
      const Vector& y = dataset.measurements[static_cast<std::size_t>(grp.columns[c])];
      if (y.size() != grp.op->rows())
        throw DimensionMismatch("svt_recover: measurement length mismatch");
      grp.y.col(static_cast<Eigen::Index>(c)) = y;
    }
  }

  double y_energy = 0.0;
  for (const Group& grp : groups) y_energy += grp.y.squaredNorm();

  // Column-permuted layout: group blocks are contiguous in Z and X. Singular
  // values are invariant under column permutation, so the shrink is
  // unaffected; columns are scattered back at the end.
  std::vector<Eigen::Index> block_start(groups.size());
  Eigen::Index at = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    block_start[g] = at;
    at += static_cast<Eigen::Index>(groups[g].columns.size());
  }

  Matrix z = Matrix::Zero(n, total);
  Matrix x = Matrix::Zero(n, total);
  RecoveryResult result;
  result.residual_trace.reserve(static_cast<std::size_t>(cfg.max_iters));

  bool converged = false;
  int iters = 0;
  double log_residual_at_check = 0.0;
  int check_iter = 0;
  constexpr int kPredictWindow = 100;
  constexpr int kPredictWarmup = 300;

  while (iters < cfg.max_iters) {
    ++iters;
    x = shrink_gram(z, cfg.tau);

    double residual2 = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const Group& grp = groups[g];
      const auto cols = static_cast<Eigen::Index>(grp.columns.size());
      if (cols == 0) continue;
      auto xg = x.middleCols(block_start[g], cols);
      Matrix r = grp.y - grp.op->apply(Matrix(xg));
      residual2 += r.squaredNorm();
      z.middleCols(block_start[g], cols) += cfg.delta * grp.op->adjoint(r);
    }

    if (!std::isfinite(residual2))
      throw DivergenceError("svt_recover: non-finite residual (delta too large?)");
    double rel = y_energy > 0.0 ? std::sqrt(residual2 / y_energy) : 0.0;
    result.residual_trace.push_back(rel);
    if (rel > 1e6)
      throw DivergenceError("svt_recover: residual diverged");

    if (rel < cfg.residual_tol) {
      converged = true;
      break;
    }

    // Rate-based hopelessness check: extrapolate the trailing per-iteration
    // log decrease; if even 3x the remaining budget cannot reach the target,
    // stop burning time. Runs that are on track are never cut.
    if (cfg.predict_abort && iters >= kPredictWarmup &&
        iters - check_iter >= kPredictWindow) {
      double log_rel = std::log(std::max(rel, 1e-300));
      if (check_iter > 0) {
        double rate = (log_residual_at_check - log_rel) /
                      static_cast<double>(iters - check_iter);
        double needed = log_rel - std::log(cfg.residual_tol);
        if (rate <= 0.0 ||
            needed / rate > 3.0 * static_cast<double>(cfg.max_iters - iters))
          break;
      }
      log_residual_at_check = log_rel;
      check_iter = iters;
    }
  }

  if (!x.allFinite())
    throw DivergenceError("svt_recover: non-finite iterate");

  result.converged = converged;
  result.iterations_used = iters;
  result.x_hat.resize(n, total);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t c = 0; c < groups[g].columns.size(); ++c)
      result.x_hat.col(groups[g].columns[c]) =
          x.col(block_start[g] + static_cast<Eigen::Index>(c));

  if (!dataset.truth.empty()) {
    double err2 = 0.0, ref2 = 0.0;
    for (int i = 0; i < total; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      err2 += (result.x_hat.col(i) - dataset.truth[idx]).squaredNorm();
      ref2 += dataset.truth[idx].squaredNorm();
    }
    if (ref2 > 0.0) result.relative_error = err2 / ref2;
  }
  return result;
}

std::pair<bool, double> recovery_success(const Matrix& x_hat, const Matrix& x_true) {
  if (x_hat.rows() != x_true.rows() || x_hat.cols() != x_true.cols())
    throw DimensionMismatch("recovery_success: shape mismatch");
  double ref2 = x_true.squaredNorm();
  if (ref2 == 0.0)
    throw std::invalid_argument("recovery_success: zero ground truth, ratio undefined");
  double ratio = (x_hat - x_true).squaredNorm() / ref2;
  return {ratio < 0.1, ratio};
}

double phase_cell(int n, int k, int group_count, int m, int sample_count,
                  int trials, const SvtConfig& cfg, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("phase_cell: trials must be >= 1");
  Rng cell_rng(seed);
  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = cell_rng.derive(static_cast<std::uint64_t>(t));
    SubspaceModel model = random_subspace(n, k, rng);
    std::vector<Vector> signals = sample_signals(model, sample_count, rng);
    OperatorBank bank = build_bank(
        group_count, [&](Rng& r) { return gaussian_operator(m, n, r); },
        sample_count, rng);
    Dataset ds = make_dataset(signals, bank, 0.0, rng);
    RecoveryResult rec = svt_recover(ds, bank, cfg);
    auto [ok, err] = recovery_success(rec.x_hat, signal_matrix(signals));
    (void)err;
    if (ok) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(trials);
}

} // namespace multiop
