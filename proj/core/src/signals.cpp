#include "multiop/signals.hpp"

#include <cmath>

#include "multiop/errors.hpp"

namespace multiop {

SubspaceModel::SubspaceModel(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.rows() == 0 || basis_.cols() == 0 || basis_.cols() > basis_.rows())
    throw DimensionMismatch("SubspaceModel: need n x k basis with 1 <= k <= n");
  Matrix gram = basis_.transpose() * basis_;
  double err = (gram - Matrix::Identity(basis_.cols(), basis_.cols())).norm();
  if (!(err <= 1e-10))
    throw std::invalid_argument("SubspaceModel: basis is not orthonormal");
}

SubspaceModel random_subspace(int n, int k, Rng& rng) {
  if (k <= 0 || k > n)
    throw DimensionMismatch("random_subspace: need 1 <= k <= n");
  Matrix g(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  Matrix basis = orthonormal_basis(g);
  if (basis.cols() != k)
    throw NumericalFailure("random_subspace: degenerate Gaussian draw");
  return SubspaceModel(std::move(basis));
}

UnionModel random_union(int n, int k, int component_count, Rng& rng) {
  if (component_count <= 0)
    throw std::invalid_argument("random_union: component_count must be positive");
  UnionModel model;
  model.components.reserve(static_cast<std::size_t>(component_count));
  for (int c = 0; c < component_count; ++c)
    model.components.push_back(random_subspace(n, k, rng));
  return model;
}

std::vector<Vector> sample_signals(const SubspaceModel& model, int count, Rng& rng) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector c(model.k());
    for (int j = 0; j < model.k(); ++j) c(j) = rng.normal();
    out.push_back(model.basis() * c);
  }
  return out;
}

std::vector<Vector> sample_signals(const UnionModel& model, int count, Rng& rng) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const auto last = static_cast<std::int64_t>(model.components.size()) - 1;
  for (int i = 0; i < count; ++i) {
    const SubspaceModel& comp =
        model.components[static_cast<std::size_t>(rng.uniform_int(0, last))];
    Vector c(comp.k());
    for (int j = 0; j < comp.k(); ++j) c(j) = rng.normal();
    out.push_back(comp.basis() * c);
  }
  return out;
}

Dataset make_dataset(const std::vector<Vector>& signals, const OperatorBank& bank,
                     double noise_sigma, Rng& rng) {
  if (signals.size() != bank.assignment.size())
    throw DimensionMismatch("make_dataset: signal count != bank assignment size");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("make_dataset: negative noise_sigma");
  Dataset ds;
  ds.noise_sigma = noise_sigma;
  ds.measurements.reserve(signals.size());
  ds.operator_index = bank.assignment;
  ds.truth = signals;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const LinearOperator& op = bank.operator_of(static_cast<int>(i));
    Vector y = op.apply(signals[i]);
    if (noise_sigma > 0.0)
      for (Eigen::Index j = 0; j < y.size(); ++j) y(j) += noise_sigma * rng.normal();
    ds.measurements.push_back(std::move(y));
  }
  return ds;
}

double psnr(const Vector& x_hat, const Vector& x, double peak) {
  if (x_hat.size() != x.size()) throw DimensionMismatch("psnr: size mismatch");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  double err2 = (x_hat - x).squaredNorm();
  if (err2 == 0.0) return 99.0;
  double value = 10.0 * std::log10(peak * peak * static_cast<double>(x.size()) / err2);
  return std::min(value, 99.0);
}

Matrix signal_matrix(const std::vector<Vector>& signals) {
  if (signals.empty()) throw std::invalid_argument("signal_matrix: empty list");
  Matrix m(signals.front().size(), static_cast<Eigen::Index>(signals.size()));
  for (std::size_t i = 0; i < signals.size(); ++i) {
    if (signals[i].size() != m.rows())
      throw DimensionMismatch("signal_matrix: ragged signal lengths");
    m.col(static_cast<Eigen::Index>(i)) = signals[i];
  }
  return m;
}

} // namespace multiop
