#include "multiop/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "multiop/errors.hpp"

namespace multiop {

LinearOperator LinearOperator::dense(Matrix a) {
  if (a.rows() == 0 || a.cols() == 0)
    throw DimensionMismatch("LinearOperator::dense: empty matrix");
  if (a.rows() > a.cols())
    throw DimensionMismatch("LinearOperator::dense: more rows than columns");
  if (!a.allFinite())
    throw NumericalFailure("LinearOperator::dense: non-finite entries");
  LinearOperator op;
  op.form_ = Form::dense;
  op.m_ = static_cast<int>(a.rows());
  op.n_ = static_cast<int>(a.cols());
  SvdResult s = svd(a);
  op.sigma_max_ = s.singular_values.size() > 0 ? s.singular_values(0) : 0.0;
  op.a_ = std::move(a);
  op.pinv_ = pseudo_inverse(op.a_);
  return op;
}

LinearOperator LinearOperator::mask(std::vector<int> indices, int n) {
  if (indices.empty() || n <= 0)
    throw DimensionMismatch("LinearOperator::mask: empty mask");
  if (static_cast<int>(indices.size()) > n)
    throw DimensionMismatch("LinearOperator::mask: more indices than coordinates");
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("LinearOperator::mask: duplicate index");
  if (sorted.front() < 0 || sorted.back() >= n)
    throw std::invalid_argument("LinearOperator::mask: index out of range");
  LinearOperator op;
  op.form_ = Form::mask;
  op.m_ = static_cast<int>(indices.size());
  op.n_ = n;
  op.idx_ = std::move(indices);
  op.sigma_max_ = 1.0; // rows are distinct unit coordinate vectors
  return op;
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != n_) throw DimensionMismatch("LinearOperator::apply: size mismatch");
  if (form_ == Form::dense) return a_ * x;
  Vector y(m_);
  for (int i = 0; i < m_; ++i) y(i) = x(idx_[static_cast<std::size_t>(i)]);
  return y;
}

Vector LinearOperator::adjoint(const Vector& y) const {
  if (y.size() != m_) throw DimensionMismatch("LinearOperator::adjoint: size mismatch");
  if (form_ == Form::dense) return a_.transpose() * y;
  Vector x = Vector::Zero(n_);
  for (int i = 0; i < m_; ++i) x(idx_[static_cast<std::size_t>(i)]) = y(i);
  return x;
}

Vector LinearOperator::pinv_apply(const Vector& y) const {
  if (y.size() != m_) throw DimensionMismatch("LinearOperator::pinv_apply: size mismatch");
  if (form_ == Form::dense) return pinv_ * y;
  return adjoint(y); // mask rows are orthonormal
}

Vector LinearOperator::pinv_adjoint(const Vector& u) const {
  if (u.size() != n_) throw DimensionMismatch("LinearOperator::pinv_adjoint: size mismatch");
  if (form_ == Form::dense) return pinv_.transpose() * u;
  return apply(u);
}

Matrix LinearOperator::apply(const Matrix& x) const {
  if (x.rows() != n_) throw DimensionMismatch("LinearOperator::apply: size mismatch");
  if (form_ == Form::dense) return a_ * x;
  Matrix y(m_, x.cols());
  for (int i = 0; i < m_; ++i) y.row(i) = x.row(idx_[static_cast<std::size_t>(i)]);
  return y;
}

Matrix LinearOperator::adjoint(const Matrix& y) const {
  if (y.rows() != m_) throw DimensionMismatch("LinearOperator::adjoint: size mismatch");
  if (form_ == Form::dense) return a_.transpose() * y;
  Matrix x = Matrix::Zero(n_, y.cols());
  for (int i = 0; i < m_; ++i) x.row(idx_[static_cast<std::size_t>(i)]) = y.row(i);
  return x;
}

Matrix LinearOperator::pinv_apply(const Matrix& y) const {
  if (y.rows() != m_) throw DimensionMismatch("LinearOperator::pinv_apply: size mismatch");
  if (form_ == Form::dense) return pinv_ * y;
  return adjoint(y);
}

Matrix LinearOperator::pinv_adjoint(const Matrix& u) const {
  if (u.rows() != n_) throw DimensionMismatch("LinearOperator::pinv_adjoint: size mismatch");
  if (form_ == Form::dense) return pinv_.transpose() * u;
  return apply(u);
}

Matrix LinearOperator::to_dense() const {
  if (form_ == Form::dense) return a_;
  Matrix a = Matrix::Zero(m_, n_);
  for (int i = 0; i < m_; ++i) a(i, idx_[static_cast<std::size_t>(i)]) = 1.0;
  return a;
}

const std::vector<int>& LinearOperator::mask_indices() const {
  if (form_ != Form::mask)
    throw std::logic_error("LinearOperator::mask_indices: not a mask operator");
  return idx_;
}

LinearOperator gaussian_operator(int m, int n, Rng& rng) {
  if (m <= 0 || n <= 0 || m > n)
    throw DimensionMismatch("gaussian_operator: need 0 < m <= n");
  Matrix a(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = scale * rng.normal();
  return LinearOperator::dense(std::move(a));
}

LinearOperator inpainting_operator(int m, int n, Rng& rng) {
  if (m <= 0 || n <= 0 || m > n)
    throw DimensionMismatch("inpainting_operator: need 0 < m <= n");
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  // Partial Fisher-Yates: first m entries are a uniform sample without
  // replacement.
  for (int i = 0; i < m; ++i) {
    auto j = static_cast<std::size_t>(rng.uniform_int(i, n - 1));
    std::swap(all[static_cast<std::size_t>(i)], all[j]);
  }
  std::vector<int> idx(all.begin(), all.begin() + m);
  std::sort(idx.begin(), idx.end());
  return LinearOperator::mask(std::move(idx), n);
}

std::vector<int> OperatorBank::samples_of(int g) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == g) out.push_back(static_cast<int>(i));
  return out;
}

OperatorBank build_bank(int group_count, const OperatorFactory& factory,
                        int sample_count, Rng& rng) {
  if (group_count <= 0) throw std::invalid_argument("build_bank: group_count must be positive");
  if (sample_count < 0) throw std::invalid_argument("build_bank: negative sample_count");
  OperatorBank bank;
  bank.operators.reserve(static_cast<std::size_t>(group_count));
  for (int g = 0; g < group_count; ++g) bank.operators.push_back(factory(rng));
  bank.n = bank.operators.front().cols();
  for (const LinearOperator& op : bank.operators)
    if (op.cols() != bank.n)
      throw DimensionMismatch("build_bank: operators disagree on domain dimension");

  // Shares differ by at most one; which samples land where is decided by a
  // seeded permutation so reruns reproduce the assignment exactly.
  std::vector<int> perm(static_cast<std::size_t>(sample_count));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  bank.assignment.assign(static_cast<std::size_t>(sample_count), 0);
  for (int i = 0; i < sample_count; ++i)
    bank.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i % group_count;
  return bank;
}

OperatorBank reassign(const OperatorBank& bank, int sample_count, Rng& rng) {
  if (sample_count < 0) throw std::invalid_argument("reassign: negative sample_count");
  OperatorBank out;
  out.operators = bank.operators;
  out.n = bank.n;
  std::vector<int> perm(static_cast<std::size_t>(sample_count));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  out.assignment.assign(static_cast<std::size_t>(sample_count), 0);
  for (int i = 0; i < sample_count; ++i)
    out.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
        i % bank.group_count();
  return out;
}

Matrix stack(const OperatorBank& bank) {
  Eigen::Index total = 0;
  for (const LinearOperator& op : bank.operators) total += op.rows();
  Matrix s(total, bank.n);
  Eigen::Index at = 0;
  for (const LinearOperator& op : bank.operators) {
    s.middleRows(at, op.rows()) = op.to_dense();
    at += op.rows();
  }
  return s;
}

SplitOperator split_operator(const LinearOperator& a, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("split_operator: fraction must lie in (0, 1)");
  const int m = a.rows();
  if (m < 2)
    throw DimensionMismatch("split_operator: need at least two rows to split");
  int first_count = static_cast<int>(std::lround(fraction * m));
  first_count = std::clamp(first_count, 1, m - 1); // both parts nonempty

  std::vector<int> rows(static_cast<std::size_t>(m));
  std::iota(rows.begin(), rows.end(), 0);
  rng.shuffle(rows);

  std::vector<int> first_rows(rows.begin(), rows.begin() + first_count);
  std::vector<int> second_rows(rows.begin() + first_count, rows.end());
  std::sort(first_rows.begin(), first_rows.end());
  std::sort(second_rows.begin(), second_rows.end());

  if (a.form() == LinearOperator::Form::mask) {
    const std::vector<int>& idx = a.mask_indices();
    std::vector<int> i1, i2;
    for (int r : first_rows) i1.push_back(idx[static_cast<std::size_t>(r)]);
    for (int r : second_rows) i2.push_back(idx[static_cast<std::size_t>(r)]);
    return {LinearOperator::mask(std::move(i1), a.cols()),
            LinearOperator::mask(std::move(i2), a.cols()),
            std::move(first_rows), std::move(second_rows)};
  }
  Matrix d = a.to_dense();
  Matrix m1(first_count, a.cols()), m2(m - first_count, a.cols());
  for (int i = 0; i < first_count; ++i) m1.row(i) = d.row(first_rows[static_cast<std::size_t>(i)]);
  for (int i = 0; i < m - first_count; ++i) m2.row(i) = d.row(second_rows[static_cast<std::size_t>(i)]);
  return {LinearOperator::dense(std::move(m1)), LinearOperator::dense(std::move(m2)),
          std::move(first_rows), std::move(second_rows)};
}

} // namespace multiop
