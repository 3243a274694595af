#include "multiop/adam.hpp"

#include <cmath>

#include "multiop/errors.hpp"

namespace multiop {

AdamState::AdamState(AdamConfig cfg, Eigen::Index parameter_count)
    : cfg_(cfg), m_(Vector::Zero(parameter_count)), v_(Vector::Zero(parameter_count)) {
  if (!(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0 && cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0))
    throw std::invalid_argument("AdamState: betas must lie in [0, 1)");
  if (!(cfg_.epsilon > 0.0))
    throw std::invalid_argument("AdamState: epsilon must be positive");
  if (cfg_.weight_decay < 0.0)
    throw std::invalid_argument("AdamState: negative weight decay");
}

void AdamState::step(Vector& params, const Vector& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw DimensionMismatch("AdamState::step: parameter count mismatch");
  if (!grads.allFinite())
    throw TrainingFailure("AdamState::step: non-finite gradients");

  ++step_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grads;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grads.cwiseProduct(grads);
  const double correction1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  params.array() -= cfg_.learning_rate *
                    ((m_.array() / correction1) /
                     ((v_.array() / correction2).sqrt() + cfg_.epsilon));
  if (cfg_.weight_decay > 0.0)
    params.array() -= cfg_.learning_rate * cfg_.weight_decay * params.array();
}

} // namespace multiop
