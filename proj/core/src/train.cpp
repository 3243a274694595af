#include "multiop/train.hpp"

#include <cmath>
#include <iostream>

#include "multiop/errors.hpp"

namespace multiop {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::supervised: return "supervised";
    case LossKind::moi: return "moi";
    case LossKind::splitting: return "splitting";
  }
  throw std::invalid_argument("to_string: unknown loss kind");
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "supervised") return LossKind::supervised;
  if (name == "moi") return LossKind::moi;
  if (name == "splitting") return LossKind::splitting;
  throw std::invalid_argument("loss kind must be supervised|moi|splitting, got '" + name + "'");
}

namespace {

struct Batch {
  int group = 0;
  std::vector<int> samples;
};

Matrix gather_measurements(const Dataset& ds, const std::vector<int>& samples) {
  const Vector& first = ds.measurements[static_cast<std::size_t>(samples.front())];
  Matrix y(first.size(), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i)
    y.col(static_cast<Eigen::Index>(i)) =
        ds.measurements[static_cast<std::size_t>(samples[i])];
  return y;
}

Matrix gather_truth(const Dataset& ds, const std::vector<int>& samples) {
  const Vector& first = ds.truth[static_cast<std::size_t>(samples.front())];
  Matrix x(first.size(), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i)
    x.col(static_cast<Eigen::Index>(i)) = ds.truth[static_cast<std::size_t>(samples[i])];
  return x;
}

} // namespace

TrainResult train(const Dataset& dataset, const OperatorBank& bank, Mlp& net,
                  const TrainConfig& cfg) {
  if (dataset.size() != static_cast<int>(bank.assignment.size()))
    throw DimensionMismatch("train: dataset/bank sample count mismatch");
  if (cfg.epochs < 0) throw std::invalid_argument("train: negative epochs");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(cfg.lr.drop_epoch >= 0 && cfg.lr.drop_epoch <= cfg.epochs))
    throw std::invalid_argument("train: drop_epoch must lie in [0, epochs]");
  if (cfg.loss_kind == LossKind::supervised && dataset.truth.empty())
    throw std::invalid_argument("train: supervised loss needs ground truth");
  if (cfg.loss_kind == LossKind::splitting &&
      !(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0))
    throw std::invalid_argument("train: split_fraction must lie in (0, 1)");

  const int groups = bank.group_count();
  std::vector<std::vector<int>> shares(static_cast<std::size_t>(groups));
  for (int g = 0; g < groups; ++g) shares[static_cast<std::size_t>(g)] = bank.samples_of(g);

  if (cfg.loss_kind == LossKind::moi && groups == 1)
    std::cerr << "train: single operator, MOI cross term degenerates to s = g "
                 "(no nullspace information)\n";

  Rng rng(cfg.seed);
  Vector params = pack_parameters(net);
  AdamState adam(cfg.adam, params.size());

  TrainResult result;
  result.epoch_losses.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double lr = cfg.lr.initial;
    if (epoch >= cfg.lr.drop_epoch && cfg.lr.drop_epoch < cfg.epochs)
      lr *= cfg.lr.drop_factor;
    adam.set_learning_rate(lr);

    // One shuffle per share, then chunk; batch order is shuffled across
    // groups so operators interleave.
    std::vector<Batch> batches;
    for (int g = 0; g < groups; ++g) {
      std::vector<int> order = shares[static_cast<std::size_t>(g)];
      if (order.empty()) continue;
      rng.shuffle(order);
      for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
        Batch b;
        b.group = g;
        auto end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
        b.samples.assign(order.begin() + static_cast<std::ptrdiff_t>(at),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
        batches.push_back(std::move(b));
      }
    }
    rng.shuffle(batches);

    double loss_sum = 0.0;
    std::size_t sample_count = 0;
    for (const Batch& batch : batches) {
      const LinearOperator& a_g = bank.operators[static_cast<std::size_t>(batch.group)];
      Matrix y = gather_measurements(dataset, batch.samples);

      LossResult loss;
      switch (cfg.loss_kind) {
        case LossKind::supervised:
          loss = loss_supervised(net, y, a_g, gather_truth(dataset, batch.samples));
          break;
        case LossKind::moi: {
          int s = batch.group;
          if (groups > 1) {
            auto draw = static_cast<int>(rng.uniform_int(0, groups - 2));
            s = draw >= batch.group ? draw + 1 : draw;
          }
          loss = loss_moi(net, y, a_g, bank.operators[static_cast<std::size_t>(s)],
                          cfg.moi_cross_weight);
          break;
        }
        case LossKind::splitting:
          loss = loss_splitting(net, y, a_g, cfg.split_fraction, rng);
          break;
      }

      if (!std::isfinite(loss.value))
        throw TrainingFailure("train: non-finite loss at epoch " + std::to_string(epoch));
      loss_sum += loss.value * static_cast<double>(batch.samples.size());
      sample_count += batch.samples.size();

      adam.step(params, pack_gradients(net, loss.gradients));
      unpack_parameters(net, params);
    }
    result.epoch_losses.push_back(
        sample_count > 0 ? loss_sum / static_cast<double>(sample_count) : 0.0);
  }
  return result;
}

namespace {

double truth_peak(const Dataset& test) {
  if (test.truth.empty())
    throw std::invalid_argument("evaluate: test set carries no ground truth");
  double peak = 0.0;
  for (const Vector& x : test.truth) peak = std::max(peak, x.cwiseAbs().maxCoeff());
  if (!(peak > 0.0))
    throw std::invalid_argument("evaluate: ground truth is identically zero");
  return peak;
}

} // namespace

EvalResult evaluate(const Mlp& net, const Dataset& test, const OperatorBank& bank) {
  if (test.size() != static_cast<int>(bank.assignment.size()))
    throw DimensionMismatch("evaluate: dataset/bank sample count mismatch");
  const double peak = truth_peak(test);
  EvalResult out;
  for (int i = 0; i < test.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const LinearOperator& a = bank.operator_of(i);
    const Vector& y = test.measurements[idx];
    const Vector& x = test.truth[idx];
    double net_psnr = psnr(reconstruct(net, y, a), x, peak);
    double base_psnr = psnr(a.pinv_apply(y), x, peak);
    out.mean_psnr += net_psnr;
    out.mean_improvement_db += net_psnr - base_psnr;
  }
  out.mean_psnr /= static_cast<double>(test.size());
  out.mean_improvement_db /= static_cast<double>(test.size());
  return out;
}

EvalResult evaluate_on_split(const Mlp& net, const Dataset& test,
                             const OperatorBank& bank, double split_fraction,
                             Rng& rng) {
  if (test.size() != static_cast<int>(bank.assignment.size()))
    throw DimensionMismatch("evaluate_on_split: dataset/bank sample count mismatch");
  const double peak = truth_peak(test);
  EvalResult out;
  for (int i = 0; i < test.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const LinearOperator& a = bank.operator_of(i);
    const Vector& y = test.measurements[idx];
    const Vector& x = test.truth[idx];

    SplitOperator split = split_operator(a, split_fraction, rng);
    Vector y1(split.first.rows());
    for (std::size_t r = 0; r < split.first_rows.size(); ++r)
      y1(static_cast<Eigen::Index>(r)) = y(split.first_rows[r]);

    double net_psnr = psnr(reconstruct(net, y1, split.first), x, peak);
    double base_psnr = psnr(a.pinv_apply(y), x, peak);
    out.mean_psnr += net_psnr;
    out.mean_improvement_db += net_psnr - base_psnr;
  }
  out.mean_psnr /= static_cast<double>(test.size());
  out.mean_improvement_db /= static_cast<double>(test.size());
  return out;
}

} // namespace multiop
