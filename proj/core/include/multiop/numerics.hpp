#pragma once

#include <Eigen/Dense>
#include <vector>

namespace multiop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative cutoff used everywhere a numerical rank decision is made:
/// singular values <= tol * sigma_max are treated as zero.
inline constexpr double kRankTol = 1e-10;

struct SvdResult {
  Matrix u;               // left singular vectors, thin
  Vector singular_values; // descending, nonnegative
  Matrix v;               // right singular vectors, thin
};

/// Thin SVD. Throws NumericalFailure if the decomposition does not converge
/// or the input has non-finite entries.
SvdResult svd(const Matrix& m);

/// Moore-Penrose pseudo-inverse; singular values <= tol * sigma_max are
/// dropped.
Matrix pseudo_inverse(const Matrix& m, double tol = kRankTol);

/// Number of singular values above tol * sigma_max. Zero matrix has rank 0.
/// tol must lie in (0, 1).
int numerical_rank(const Matrix& m, double tol = kRankTol);

/// Singular value soft-thresholding: U shrink(S, tau) V^T with
/// shrink(s, tau) = max(s - tau, 0). tau = 0 reproduces the input (up to
/// SVD round-trip error); tau >= sigma_max yields the zero matrix.
Matrix soft_threshold_singular(const Matrix& m, double tau);

/// Orthonormal basis of the column space (left singular vectors with
/// sigma > tol * sigma_max). Zero matrix yields an n x 0 result.
Matrix orthonormal_basis(const Matrix& m, double tol = kRankTol);

/// Orthonormal basis of the intersection of subspaces, each given by an
/// orthonormal basis of common ambient dimension n. Computed via the
/// nullspace of the stacked orthogonal-complement projectors
/// [I - U_1 U_1^T; ...; I - U_G U_G^T]. All-full subspaces yield the
/// identity; an empty list has no ambient dimension and throws.
Matrix subspace_intersection(const std::vector<Matrix>& bases,
                             double tol = kRankTol);

} // namespace multiop
