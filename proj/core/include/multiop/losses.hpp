#pragma once

#include "multiop/mlp.hpp"
#include "multiop/operators.hpp"
#include "multiop/rng.hpp"

namespace multiop {

/// Loss value and its exact parameter gradients; `value` is the per-sample
/// sum of squared norms averaged over the batch.
struct LossResult {
  double value = 0.0;
  MlpGradients gradients;
};

/// ||x - net(A^+ y)||^2, mean over batch columns.
LossResult loss_supervised(const Mlp& net, const Matrix& y, const LinearOperator& a,
                           const Matrix& x);

/// Unsupervised multi-operator loss: with x_hat = net(A_g^+ y),
///   ||y - A_g x_hat||^2 + cross_weight * ||x_hat - net(A_s^+ A_s x_hat)||^2,
/// mean over the batch. Gradients flow through every appearance of the
/// network, including x_hat inside the second term — no stop-gradient
/// anywhere.
LossResult loss_moi(const Mlp& net, const Matrix& y, const LinearOperator& a_g,
                    const LinearOperator& a_s, double cross_weight = 1.0);

/// Measurement-splitting loss: the operator's rows are split per call into
/// (A1, A2); the network reconstructs from the A1 share and is scored on
/// predicting the held-out A2 share: ||y_2 - A2 net(A1^+ y_1)||^2.
LossResult loss_splitting(const Mlp& net, const Matrix& y, const LinearOperator& a,
                          double split_fraction, Rng& rng);

// Single-sample conveniences.
LossResult loss_supervised(const Mlp& net, const Vector& y, const LinearOperator& a,
                           const Vector& x);
LossResult loss_moi(const Mlp& net, const Vector& y, const LinearOperator& a_g,
                    const LinearOperator& a_s, double cross_weight = 1.0);
LossResult loss_splitting(const Mlp& net, const Vector& y, const LinearOperator& a,
                          double split_fraction, Rng& rng);

} // namespace multiop
