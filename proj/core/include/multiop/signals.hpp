#pragma once

#include <vector>

#include "multiop/numerics.hpp"
#include "multiop/operators.hpp"
#include "multiop/rng.hpp"

namespace multiop {

/// k-dimensional subspace of R^n, held as an orthonormal basis (n x k).
/// Orthonormality is checked at construction (columns within 1e-10 of
/// U^T U = I).
class SubspaceModel {
public:
  explicit SubspaceModel(Matrix basis);

  int n() const { return static_cast<int>(basis_.rows()); }
  int k() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }
  Matrix projector() const { return basis_ * basis_.transpose(); }

private:
  Matrix basis_;
};

/// Union of equal-dimension subspaces of a common ambient space.
struct UnionModel {
  std::vector<SubspaceModel> components;

  int n() const { return components.front().n(); }
  int k() const { return components.front().k(); }
};

/// Uniformly random k-dim subspace: orthonormalized Gaussian draw.
SubspaceModel random_subspace(int n, int k, Rng& rng);

UnionModel random_union(int n, int k, int component_count, Rng& rng);

/// N signals x = U c with c ~ N(0, I_k); union models pick a component
/// uniformly per sample.
std::vector<Vector> sample_signals(const SubspaceModel& model, int count, Rng& rng);
std::vector<Vector> sample_signals(const UnionModel& model, int count, Rng& rng);

/// Measurements y_i = A_{g_i} x_i + sigma * eps, eps ~ N(0, I). Ground truth
/// is kept alongside for evaluation; learning code must not touch it.
struct Dataset {
  std::vector<Vector> measurements;
  std::vector<int> operator_index;
  std::vector<Vector> truth;
  double noise_sigma = 0.0;

  int size() const { return static_cast<int>(measurements.size()); }
};

Dataset make_dataset(const std::vector<Vector>& signals, const OperatorBank& bank,
                     double noise_sigma, Rng& rng);

/// 10 log10(peak^2 * n / ||x_hat - x||^2); exact reconstruction caps at 99 dB.
double psnr(const Vector& x_hat, const Vector& x, double peak);

/// Signals packed as columns of an n x N matrix.
Matrix signal_matrix(const std::vector<Vector>& signals);

} // namespace multiop
