#include "multiop/identifiability.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>

#include "multiop/errors.hpp"
#include "multiop/result_table.hpp"

namespace multiop {

namespace {

/// Orthonormal basis of null(A). Masks get theirs for free (the unobserved
/// coordinates); dense operators via full SVD.
Matrix nullspace_basis(const LinearOperator& a, double tol) {
  const int n = a.cols();
  if (a.form() == LinearOperator::Form::mask) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int i : a.mask_indices()) seen[static_cast<std::size_t>(i)] = true;
    Matrix basis = Matrix::Zero(n, n - a.rows());
    int col = 0;
    for (int i = 0; i < n; ++i)
      if (!seen[static_cast<std::size_t>(i)]) basis(i, col++) = 1.0;
    return basis;
  }
  Eigen::BDCSVD<Matrix> dec(a.to_dense(), Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success)
    throw NumericalFailure("nullspace_basis: SVD did not converge");
  const Vector& sv = dec.singularValues();
  const double cutoff = sv.size() > 0 ? tol * sv(0) : 0.0;
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return dec.matrixV().rightCols(n - rank);
}

} // namespace

std::pair<bool, int> necessary_rank_condition(const OperatorBank& bank, double tol) {
  if (bank.operators.empty())
    throw std::invalid_argument("necessary_rank_condition: empty bank");
  int rank = numerical_rank(stack(bank), tol);
  return {rank == bank.n, rank};
}

BoundReport bound_report(const OperatorBank& bank, int k, double tol) {
  if (k < 0) throw std::invalid_argument("bound_report: k must be >= 0");
  BoundReport r;
  r.n = bank.n;
  r.k = k;
  r.group_count = bank.group_count();
  for (const LinearOperator& op : bank.operators) r.m_g.push_back(op.rows());
  auto [ok, rank] = necessary_rank_condition(bank, tol);
  r.necessary_ok = ok;
  r.stacked_rank = rank;
  double mean_m = 0.0;
  for (int m : r.m_g) mean_m += m;
  mean_m /= static_cast<double>(r.m_g.size());
  r.sufficient_ok =
      mean_m > static_cast<double>(k) +
                   static_cast<double>(r.n) / static_cast<double>(r.group_count);
  return r;
}

bool recovery_injective(const SubspaceModel& model, const LinearOperator& a,
                        double tol) {
  if (a.cols() != model.n())
    throw DimensionMismatch("recovery_injective: operator/model dimension mismatch");
  // Rank of A U, measured against the operator's own scale (U is orthonormal,
  // so ||A U|| <= sigma_max(A)). A rank decision relative to sigma_max(A U)
  // itself would read a numerically-zero product as full rank.
  const Matrix au = a.apply(model.basis());
  Eigen::BDCSVD<Matrix> dec(au);
  const Vector& sv = dec.singularValues();
  const double cutoff = tol * a.sigma_max();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return rank == model.k();
}

Matrix inferred_set(const SubspaceModel& model, const OperatorBank& bank,
                    double tol) {
  if (bank.n != model.n())
    throw DimensionMismatch("inferred_set: bank/model dimension mismatch");
  std::vector<Matrix> plausible;
  plausible.reserve(bank.operators.size());
  for (const LinearOperator& op : bank.operators) {
    Matrix null = nullspace_basis(op, tol);
    Matrix sum(model.n(), model.k() + null.cols());
    sum.leftCols(model.k()) = model.basis();
    sum.rightCols(null.cols()) = null;
    plausible.push_back(orthonormal_basis(sum, tol));
  }
  return subspace_intersection(plausible, tol);
}

bool model_identified(const SubspaceModel& model, const OperatorBank& bank,
                      double proj_tol, double rank_tol) {
  Matrix inferred = inferred_set(model, bank, rank_tol);
  if (inferred.cols() != model.k()) return false;
  double diff = (inferred * inferred.transpose() - model.projector()).norm();
  return diff <= proj_tol;
}

std::pair<std::complex<double>, std::complex<double>> char_identity_check(
    const std::vector<Vector>& samples, const LinearOperator& a, const Vector& w) {
  if (samples.empty())
    throw std::invalid_argument("char_identity_check: no samples");
  if (w.size() != a.cols())
    throw DimensionMismatch("char_identity_check: frequency length mismatch");
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  C lhs(0.0, 0.0), rhs(0.0, 0.0);
  Vector projected_w = a.pinv_apply(a.apply(w));
  for (const Vector& x : samples) {
    Vector y = a.apply(x);
    lhs += std::exp(i * w.dot(a.pinv_apply(y)));
    rhs += std::exp(i * projected_w.dot(x));
  }
  const auto count = static_cast<double>(samples.size());
  return {lhs / count, rhs / count};
}

std::pair<std::complex<double>, std::complex<double>> char_identity_check(
    const std::vector<Vector>& samples, const LinearOperator& a, Rng& rng) {
  Vector w(a.cols());
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = rng.normal();
  return char_identity_check(samples, a, w);
}

GridDistribution::GridDistribution(Vector probabilities) : p_(std::move(probabilities)) {
  if (p_.size() == 0)
    throw std::invalid_argument("GridDistribution: empty grid");
  if (p_.minCoeff() < 0.0)
    throw std::invalid_argument("GridDistribution: negative probability");
  if (std::abs(p_.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("GridDistribution: probabilities must sum to 1");
}

GridDistribution delta_distribution(int size, int at) {
  if (at < 0 || at >= size)
    throw std::invalid_argument("delta_distribution: position out of range");
  Vector p = Vector::Zero(size);
  p(at) = 1.0;
  return GridDistribution(std::move(p));
}

GridDistribution gaussian_kernel(int size, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  Vector p(size);
  for (int l = 0; l < size; ++l) {
    double d = std::min(l, size - l);
    p(l) = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  p /= p.sum();
  return GridDistribution(std::move(p));
}

GridDistribution random_simplex(int size, Rng& rng) {
  Vector p(size);
  for (int l = 0; l < size; ++l) p(l) = -std::log(1.0 - rng.uniform());
  p /= p.sum();
  return GridDistribution(std::move(p));
}

GridDistribution circular_convolve(const GridDistribution& a,
                                   const GridDistribution& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("circular_convolve: grid sizes differ");
  const int size = a.size();
  Vector out = Vector::Zero(size);
  for (int l = 0; l < size; ++l) {
    double acc = 0.0;
    for (int j = 0; j < size; ++j) acc += a[j] * b[((l - j) % size + size) % size];
    out(l) = acc;
  }
  // Convolution preserves mass exactly in theory; retire rounding fuzz so the
  // result satisfies the distribution invariant.
  out = out.cwiseMax(0.0);
  out /= out.sum();
  return GridDistribution(std::move(out));
}

double tv_distance(const GridDistribution& a, const GridDistribution& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("tv_distance: grid sizes differ");
  return 0.5 * (a.probabilities() - b.probabilities()).cwiseAbs().sum();
}

namespace {

using ComplexVector = Eigen::VectorXcd;

ComplexVector dft(const Vector& p) {
  const auto size = p.size();
  ComplexVector out(size);
  const double step = -2.0 * std::numbers::pi / static_cast<double>(size);
  for (Eigen::Index f = 0; f < size; ++f) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index l = 0; l < size; ++l)
      acc += p(l) * std::polar(1.0, step * static_cast<double>(f * l));
    out(f) = acc;
  }
  return out;
}

Vector inverse_dft_real(const ComplexVector& spectrum) {
  const auto size = spectrum.size();
  Vector out(size);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(size);
  for (Eigen::Index l = 0; l < size; ++l) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index f = 0; f < size; ++f)
      acc += spectrum(f) * std::polar(1.0, step * static_cast<double>(f * l));
    out(l) = acc.real() / static_cast<double>(size);
  }
  return out;
}

} // namespace

DeconvolutionResult deconvolve_distribution(const GridDistribution& p_noisy,
                                            const GridDistribution& p_noise,
                                            double tol) {
  if (p_noisy.size() != p_noise.size())
    throw DimensionMismatch("deconvolve_distribution: grid sizes differ");
  ComplexVector noisy_hat = dft(p_noisy.probabilities());
  ComplexVector noise_hat = dft(p_noise.probabilities());
  for (Eigen::Index f = 0; f < noise_hat.size(); ++f) {
    double mag = std::abs(noise_hat(f));
    if (mag <= tol)
      throw NoiseNotInvertible(
          "deconvolve_distribution: noise transform magnitude " + format_double(mag) +
          " at frequency " + std::to_string(f) + " is not above tol " + format_double(tol));
  }
  ComplexVector quotient = noisy_hat.cwiseQuotient(noise_hat);
  Vector raw = inverse_dft_real(quotient);

  double negativity = std::max(0.0, -raw.cwiseMin(0.0).sum());
  Vector clipped = raw.cwiseMax(0.0);
  double mass = clipped.sum();
  if (!(mass > 0.0))
    throw NumericalFailure("deconvolve_distribution: deconvolved mass vanished");
  clipped /= mass;
  return {GridDistribution(std::move(clipped)), negativity};
}

} // namespace multiop
