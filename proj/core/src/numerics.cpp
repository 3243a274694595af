#include "multiop/numerics.hpp"

#include <Eigen/SVD>
#include <algorithm>

#include "multiop/errors.hpp"

namespace multiop {

namespace {

void require_finite(const Matrix& m, const char* who) {
  if (!m.allFinite())
    throw NumericalFailure(std::string(who) + ": input has non-finite entries");
}

} // namespace

SvdResult svd(const Matrix& m) {
  require_finite(m, "svd");
  // BDCSVD falls back to Jacobi internally for small inputs; thin factors are
  // all the library ever needs.
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw NumericalFailure("svd: decomposition did not converge");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Matrix pseudo_inverse(const Matrix& m, double tol) {
  SvdResult s = svd(m);
  const double cutoff = tol * (s.singular_values.size() > 0 ? s.singular_values(0) : 0.0);
  Vector inv = Vector::Zero(s.singular_values.size());
  for (Eigen::Index i = 0; i < s.singular_values.size(); ++i)
    if (s.singular_values(i) > cutoff) inv(i) = 1.0 / s.singular_values(i);
  return s.v * inv.asDiagonal() * s.u.transpose();
}

int numerical_rank(const Matrix& m, double tol) {
  if (!(tol > 0.0 && tol < 1.0))
    throw std::invalid_argument("numerical_rank: tol must lie in (0, 1)");
  if (m.size() == 0) return 0;
  SvdResult s = svd(m);
  const double cutoff = tol * s.singular_values(0);
  int r = 0;
  for (Eigen::Index i = 0; i < s.singular_values.size(); ++i)
    if (s.singular_values(i) > cutoff) ++r;
  return r;
}

Matrix soft_threshold_singular(const Matrix& m, double tau) {
  if (tau < 0.0)
    throw std::invalid_argument("soft_threshold_singular: tau must be >= 0");
  SvdResult s = svd(m);
  Vector shrunk = (s.singular_values.array() - tau).max(0.0);
  return s.u * shrunk.asDiagonal() * s.v.transpose();
}

Matrix orthonormal_basis(const Matrix& m, double tol) {
  SvdResult s = svd(m);
  if (s.singular_values.size() == 0 || s.singular_values(0) <= 0.0)
    return Matrix(m.rows(), 0);
  const double cutoff = tol * s.singular_values(0);
  int r = 0;
  while (r < s.singular_values.size() && s.singular_values(r) > cutoff) ++r;
  return s.u.leftCols(r);
}

Matrix subspace_intersection(const std::vector<Matrix>& bases, double tol) {
  if (bases.empty()) throw std::invalid_argument("subspace_intersection: no subspaces");
  const Eigen::Index n = bases.front().rows();
  for (const Matrix& u : bases)
    if (u.rows() != n)
      throw DimensionMismatch("subspace_intersection: mixed ambient dimensions");

  // Stack the complement projectors; their common nullspace is the
  // intersection. If every subspace is the full space the stack is zero and
  // the intersection is everything.
  Matrix stack(static_cast<Eigen::Index>(bases.size()) * n, n);
  for (std::size_t g = 0; g < bases.size(); ++g) {
    const Matrix& u = bases[g];
    stack.middleRows(static_cast<Eigen::Index>(g) * n, n) =
        Matrix::Identity(n, n) - u * u.transpose();
  }
  if (stack.norm() == 0.0) return Matrix::Identity(n, n);

  Eigen::BDCSVD<Matrix> dec(stack, Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success)
    throw NumericalFailure("subspace_intersection: SVD did not converge");
  const Vector& sv = dec.singularValues();
  // The stack is built from projectors, so its singular values live on a unit
  // scale. Flooring the reference at 1 keeps a numerically-zero stack (every
  // subspace is the full space, entries are pure rounding) from being read as
  // having no nullspace at all.
  const double cutoff = tol * std::max(sv(0), 1.0);
  // Right singular vectors whose singular value vanishes span the nullspace.
  int null_dim = 0;
  for (Eigen::Index i = sv.size(); i-- > 0;) {
    if (sv(i) <= cutoff)
      ++null_dim;
    else
      break;
  }
  return dec.matrixV().rightCols(null_dim);
}

} // namespace multiop
