#pragma once

#include <vector>

#include "multiop/mlp.hpp"
#include "multiop/operators.hpp"

namespace multiop {

/// Unrolled proximal-gradient reconstruction: starting from x0 = A^+ y,
/// each step takes a gradient step on the data term and denoises,
///   x_{t+1} = f_t(x_t - eta_t A^T (A x_t - y)),
/// with an independent denoiser per step (no weight sharing) and learnable
/// per-step step sizes.
class UnrolledNet {
public:
  /// `steps` identical-architecture denoisers (all sizes n...n) with step
  /// sizes initialized to eta_init.
  UnrolledNet(int steps, std::vector<int> denoiser_sizes, bool residual,
              double eta_init = 0.4);

  static UnrolledNet random(int steps, std::vector<int> denoiser_sizes,
                            bool residual, Rng& rng, double eta_init = 0.4,
                            bool zero_last_layer = false);

  int steps() const { return static_cast<int>(denoisers_.size()); }
  int signal_size() const { return denoisers_.front().input_size(); }
  Mlp& denoiser(int t) { return denoisers_[static_cast<std::size_t>(t)]; }
  const Mlp& denoiser(int t) const { return denoisers_[static_cast<std::size_t>(t)]; }
  Vector& step_sizes() { return eta_; }
  const Vector& step_sizes() const { return eta_; }

  Matrix forward(const Matrix& y, const LinearOperator& a) const;
  Vector forward(const Vector& y, const LinearOperator& a) const;

  struct Trace {
    std::vector<Matrix> data_gradients; // s_t = A^T (A x_t - y) per step
    std::vector<Mlp::Trace> denoiser_traces;
  };
  Matrix forward(const Matrix& y, const LinearOperator& a, Trace& trace) const;

  struct Gradients {
    std::vector<MlpGradients> denoisers;
    Vector eta;

    void set_zero();
  };
  Gradients zero_gradients() const;

  /// Accumulates gradients for all denoiser parameters and all step sizes.
  void backward(const Trace& trace, const LinearOperator& a, const Matrix& upstream,
                Gradients& grads) const;

  Eigen::Index parameter_count() const;

private:
  std::vector<Mlp> denoisers_;
  Vector eta_;
};

Vector pack_parameters(const UnrolledNet& net);
void unpack_parameters(UnrolledNet& net, const Vector& flat);
Vector pack_gradients(const UnrolledNet& net, const UnrolledNet::Gradients& grads);

} // namespace multiop
