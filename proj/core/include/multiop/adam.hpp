#pragma once

#include <cstdint>

#include "multiop/numerics.hpp"

namespace multiop {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Decoupled (applied directly to the parameters, not through the moments).
  double weight_decay = 1e-8;
};

/// Adam with bias-corrected moments over one flat parameter vector.
class AdamState {
public:
  AdamState(AdamConfig cfg, Eigen::Index parameter_count);

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return step_; }
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }

  /// One update, in place. Throws TrainingFailure on non-finite gradients.
  void step(Vector& params, const Vector& grads);

private:
  AdamConfig cfg_;
  Vector m_, v_;
  std::int64_t step_ = 0;
};

} // namespace multiop
