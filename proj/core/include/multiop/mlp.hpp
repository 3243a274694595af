#pragma once

#include <vector>

#include "multiop/numerics.hpp"
#include "multiop/operators.hpp"
#include "multiop/rng.hpp"

namespace multiop {

/// Parameter-shaped gradient container for an Mlp.
struct MlpGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  void set_zero();
};

/// Fully-connected network: affine layers with a rectifier between them
/// (none after the last), optionally adding the input to the output
/// (requires matching input/output sizes). Batches are column-stacked, so
/// forward/backward are a handful of GEMMs.
class Mlp {
public:
  /// Zero-initialized network with the given layer sizes
  /// (input, hidden..., output).
  Mlp(std::vector<int> layer_sizes, bool residual);

  /// He-style init: W ~ N(0, 2 / fan_in), biases zero. zero_last_layer
  /// leaves the final affine layer at zero, which together with the residual
  /// connection makes the initial network the identity.
  static Mlp random(std::vector<int> layer_sizes, bool residual, Rng& rng,
                    bool zero_last_layer = false);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int layer_count() const { return static_cast<int>(weights_.size()); }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  bool residual() const { return residual_; }

  Matrix& weight(int layer) { return weights_[static_cast<std::size_t>(layer)]; }
  const Matrix& weight(int layer) const { return weights_[static_cast<std::size_t>(layer)]; }
  Vector& bias(int layer) { return biases_[static_cast<std::size_t>(layer)]; }
  const Vector& bias(int layer) const { return biases_[static_cast<std::size_t>(layer)]; }

  Vector forward(const Vector& v) const;
  Matrix forward(const Matrix& v) const;

  /// Forward pass that keeps what backward needs.
  struct Trace {
    Matrix input;
    std::vector<Matrix> pre_activations; // one per layer, before the rectifier
  };
  Matrix forward(const Matrix& v, Trace& trace) const;

  /// Reverse-mode pass: contracts the upstream gradient (d loss / d output)
  /// with the network Jacobian. Parameter gradients are accumulated into
  /// `grads`; the return value is the gradient w.r.t. the input. The
  /// rectifier's subgradient at exactly 0 is taken as 0.
  Matrix backward(const Trace& trace, const Matrix& upstream, MlpGradients& grads) const;

  /// Convenience single-input form returning (parameter gradients, input
  /// gradient).
  std::pair<MlpGradients, Vector> backward(const Vector& v, const Vector& upstream) const;

  MlpGradients zero_gradients() const;

  /// Total number of scalar parameters.
  Eigen::Index parameter_count() const;

private:
  std::vector<int> sizes_;
  std::vector<Matrix> weights_; // layer l: sizes_[l+1] x sizes_[l]
  std::vector<Vector> biases_;
  bool residual_ = false;
};

/// x_hat = net(A^+ y): reconstruction through the pseudo-inverse lift.
Vector reconstruct(const Mlp& net, const Vector& y, const LinearOperator& a);
Matrix reconstruct(const Mlp& net, const Matrix& y, const LinearOperator& a);

/// Flat parameter/gradient views in a fixed order (per layer: weight
/// column-major, then bias). The optimizer works on these.
Vector pack_parameters(const Mlp& net);
void unpack_parameters(Mlp& net, const Vector& flat);
Vector pack_gradients(const Mlp& net, const MlpGradients& grads);

} // namespace multiop
