#pragma once

#include <functional>
#include <vector>

#include "multiop/numerics.hpp"
#include "multiop/rng.hpp"

namespace multiop {

/// A linear measurement map R^n -> R^m, m <= n. Two concrete forms:
/// dense (arbitrary matrix) and mask (coordinate subsampling, stored as
/// index lists so apply/pinv_apply stay O(m)).
class LinearOperator {
public:
  enum class Form { dense, mask };

  static LinearOperator dense(Matrix a);
  /// Mask selecting `indices` (distinct, in [0, n)) out of n coordinates.
  static LinearOperator mask(std::vector<int> indices, int n);

  Form form() const { return form_; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  Vector apply(const Vector& x) const;
  Vector adjoint(const Vector& y) const;
  Vector pinv_apply(const Vector& y) const;
  /// Adjoint of the pseudo-inverse, (A^+)^T u; the gradient counterpart of
  /// pinv_apply.
  Vector pinv_adjoint(const Vector& u) const;

  // Column-wise batch variants; one GEMM instead of m loops for dense form.
  Matrix apply(const Matrix& x) const;
  Matrix adjoint(const Matrix& y) const;
  Matrix pinv_apply(const Matrix& y) const;
  Matrix pinv_adjoint(const Matrix& u) const;

  /// Largest singular value (cached at construction).
  double sigma_max() const { return sigma_max_; }

  /// Explicit m x n matrix of this operator (masks expand to 0/1 rows).
  Matrix to_dense() const;

  const std::vector<int>& mask_indices() const;

private:
  LinearOperator() = default;

  Form form_ = Form::dense;
  int m_ = 0, n_ = 0;
  Matrix a_, pinv_;        // dense form
  std::vector<int> idx_;   // mask form
  double sigma_max_ = 0.0;
};

/// Dense operator with i.i.d. N(0, 1/m) entries.
LinearOperator gaussian_operator(int m, int n, Rng& rng);

/// Mask of m distinct coordinates drawn uniformly; indices are kept sorted,
/// so m = n gives the identity.
LinearOperator inpainting_operator(int m, int n, Rng& rng);

/// A collection of operators on a common domain plus the assignment of N
/// samples to operators (equal-as-possible shares, seeded permutation).
struct OperatorBank {
  std::vector<LinearOperator> operators;
  std::vector<int> assignment; // sample i -> operator index
  int n = 0;

  int group_count() const { return static_cast<int>(operators.size()); }
  const LinearOperator& operator_of(int sample) const {
    return operators[static_cast<std::size_t>(assignment[static_cast<std::size_t>(sample)])];
  }
  /// Sample indices assigned to operator g, ascending.
  std::vector<int> samples_of(int g) const;
};

using OperatorFactory = std::function<LinearOperator(Rng&)>;

OperatorBank build_bank(int group_count, const OperatorFactory& factory,
                        int sample_count, Rng& rng);

/// Same operators, fresh balanced assignment of `sample_count` samples
/// (e.g. a held-out split measured through the training bank's operators).
OperatorBank reassign(const OperatorBank& bank, int sample_count, Rng& rng);

/// All operators stacked vertically into a (sum m_g) x n matrix.
Matrix stack(const OperatorBank& bank);

/// Row split of an operator into complementary parts (first gets
/// round(fraction * m) rows, both nonempty). Parts keep the parent's form;
/// first_rows/second_rows record which parent rows went where (ascending).
struct SplitOperator {
  LinearOperator first, second;
  std::vector<int> first_rows, second_rows;
};

SplitOperator split_operator(const LinearOperator& a, double fraction, Rng& rng);

} // namespace multiop
