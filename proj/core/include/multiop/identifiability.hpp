#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "multiop/numerics.hpp"
#include "multiop/operators.hpp"
#include "multiop/rng.hpp"
#include "multiop/signals.hpp"

namespace multiop {

/// Verdicts on whether a bank of operators can pin down a k-dimensional
/// model: the rank (necessary) condition and the counting (sufficient)
/// condition mean(m_g) > k + n/G.
struct BoundReport {
  int n = 0;
  int k = 0;
  int group_count = 0;
  std::vector<int> m_g;
  bool necessary_ok = false;
  bool sufficient_ok = false;
  int stacked_rank = 0;
};

/// True iff the stacked bank has full column rank n (with the achieved rank).
std::pair<bool, int> necessary_rank_condition(const OperatorBank& bank,
                                              double tol = kRankTol);

BoundReport bound_report(const OperatorBank& bank, int k, double tol = kRankTol);

/// A is injective on the subspace iff A restricted to span(U) has trivial
/// nullspace, i.e. rank(A U) = k. Singular values of A U are measured against
/// sigma_max(A), so an operator that annihilates the subspace is never
/// misread as injective.
bool recovery_injective(const SubspaceModel& model, const LinearOperator& a,
                        double tol = kRankTol);

/// Basis of the set every operator leaves plausible: the intersection over g
/// of span(U) + null(A_g). Contains the model; equals it exactly when the
/// bank identifies the model.
Matrix inferred_set(const SubspaceModel& model, const OperatorBank& bank,
                    double tol = kRankTol);

/// True iff the inferred set has dimension k and its projector matches the
/// model's within proj_tol (Frobenius).
bool model_identified(const SubspaceModel& model, const OperatorBank& bank,
                      double proj_tol = 1e-8, double rank_tol = kRankTol);

/// Both sides of the projection identity E{exp(i w^T A^+ y)} = phi(A^+ A w):
/// lhs goes through the measurements y = A x, rhs evaluates the empirical
/// characteristic function at the projected frequency. Equal up to summation
/// order.
std::pair<std::complex<double>, std::complex<double>> char_identity_check(
    const std::vector<Vector>& samples, const LinearOperator& a, const Vector& w);

/// Same check at a random Gaussian frequency drawn from rng.
std::pair<std::complex<double>, std::complex<double>> char_identity_check(
    const std::vector<Vector>& samples, const LinearOperator& a, Rng& rng);

/// Probability mass function on a circular 1-D grid. Entries nonnegative,
/// summing to 1 within 1e-12.
class GridDistribution {
public:
  explicit GridDistribution(Vector probabilities);

  int size() const { return static_cast<int>(p_.size()); }
  const Vector& probabilities() const { return p_; }
  double operator[](int i) const { return p_(i); }

private:
  Vector p_;
};

/// Point mass at grid position `at`.
GridDistribution delta_distribution(int size, int at = 0);

/// Discretized centered Gaussian on the circle (density at circular distance
/// d proportional to exp(-d^2 / 2 sigma^2)).
GridDistribution gaussian_kernel(int size, double sigma);

/// Uniform random point on the simplex (normalized exponential spacings).
GridDistribution random_simplex(int size, Rng& rng);

GridDistribution circular_convolve(const GridDistribution& a,
                                   const GridDistribution& b);

double tv_distance(const GridDistribution& a, const GridDistribution& b);

struct DeconvolutionResult {
  GridDistribution distribution;
  /// Probability mass clipped away because floating-point division produced
  /// small negatives; worth a look when above 1e-6.
  double negativity_mass = 0.0;
};

/// Removes known additive noise from a distribution by dividing discrete
/// Fourier transforms. Requires the noise transform to be bounded away from
/// zero: any |DFT(p_noise)| <= tol throws NoiseNotInvertible.
DeconvolutionResult deconvolve_distribution(const GridDistribution& p_noisy,
                                            const GridDistribution& p_noise,
                                            double tol);

} // namespace multiop
