#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multiop/adam.hpp"
#include "multiop/losses.hpp"
#include "multiop/mlp.hpp"
#include "multiop/operators.hpp"
#include "multiop/signals.hpp"

namespace multiop {

enum class LossKind { supervised, moi, splitting };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

/// Constant learning rate `initial` until `drop_epoch` (0-based), times
/// `drop_factor` from then on; drop_epoch == epochs means no drop.
struct LrSchedule {
  double initial = 1e-3;
  int drop_epoch = 0;
  double drop_factor = 1.0; // 1.0: no drop unless a schedule is chosen
};

struct TrainConfig {
  LossKind loss_kind = LossKind::moi;
  int epochs = 100;
  int batch_size = 128;
  LrSchedule lr;
  double split_fraction = 0.6;   // splitting only
  double moi_cross_weight = 1.0; // weight of the cross-operator term
  std::uint64_t seed = 0;
  AdamConfig adam; // learning_rate is driven by the schedule
};

struct TrainResult {
  std::vector<double> epoch_losses; // sample-weighted mean training loss
};

/// Minibatch training of `net` in place. Batches are drawn within one
/// operator's sample share (measurement lengths differ across operators);
/// for MOI the cross operator s is drawn uniformly from the other operators
/// per batch — with a single operator s = g is forced and a warning is
/// printed once. Shuffling, batch order and cross-operator draws are all
/// derived from cfg.seed, so runs replay bit-identically.
TrainResult train(const Dataset& dataset, const OperatorBank& bank, Mlp& net,
                  const TrainConfig& cfg);

struct EvalResult {
  double mean_psnr = 0.0;
  double mean_improvement_db = 0.0; // over the pseudo-inverse baseline
};

/// Mean test PSNR and mean per-sample PSNR improvement over the
/// pseudo-inverse x = A^+ y, each sample measured with its own operator.
/// PSNR peak is the largest |entry| of the test ground truth.
EvalResult evaluate(const Mlp& net, const Dataset& test, const OperatorBank& bank);

/// Splitting-trained networks test best on a reduced operator; this variant
/// reconstructs from a fresh split's first share per sample, against the
/// same full-operator pseudo-inverse baseline.
EvalResult evaluate_on_split(const Mlp& net, const Dataset& test,
                             const OperatorBank& bank, double split_fraction,
                             Rng& rng);

} // namespace multiop
