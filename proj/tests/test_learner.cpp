#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "multiop/adam.hpp"
#include "multiop/checkpoint.hpp"
#include "multiop/errors.hpp"
#include "multiop/losses.hpp"
#include "multiop/mlp.hpp"
#include "multiop/train.hpp"
#include "multiop/unrolled.hpp"
#include "support.hpp"

using namespace multiop;

namespace {

// Central-difference derivative of `f` w.r.t. flat parameter `index`.
template <typename Net, typename F>
double fd_parameter(Net& net, F&& f, Eigen::Index index, double h = 1e-6) {
  Vector theta = pack_parameters(net);
  Vector bumped = theta;
  bumped[index] = theta[index] + h;
  unpack_parameters(net, bumped);
  double up = f();
  bumped[index] = theta[index] - h;
  unpack_parameters(net, bumped);
  double down = f();
  unpack_parameters(net, theta);
  return (up - down) / (2.0 * h);
}

double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

} // namespace

TEST_CASE("network construction and shape checks") {
  CHECK_THROWS_AS(Mlp({5}, false), std::invalid_argument);
  CHECK_THROWS_AS(Mlp({4, 0, 4}, false), std::invalid_argument);
  CHECK_THROWS_AS(Mlp({3, 8, 4}, true), DimensionMismatch);

  Mlp net({3, 8, 3}, true);
  CHECK(net.layer_count() == 2);
  CHECK(net.parameter_count() == 3 * 8 + 8 + 8 * 3 + 3);
  CHECK_THROWS_AS(net.forward(Vector(Vector::Zero(4))), DimensionMismatch);
}

TEST_CASE("zero network is the zero map, residual zero network the identity") {
  Rng rng(1);
  Vector v = test::random_vector(6, rng);

  Mlp zero({6, 10, 6}, false);
  CHECK(zero.forward(v).norm() == 0.0);

  Mlp id({6, 10, 6}, true);
  CHECK((id.forward(v) - v).norm() == 0.0);

  // Random init with a zeroed last layer plus the skip is the identity too.
  Mlp warm = Mlp::random({6, 10, 6}, true, rng, true);
  CHECK((warm.forward(v) - v).norm() == 0.0);
}

TEST_CASE("single affine layer evaluates exactly") {
  Mlp net({3, 2}, false);
  net.weight(0) << 1, 2, 3, 4, 5, 6;
  net.bias(0) << -1, 1;
  Vector v(3);
  v << 1, -1, 2;
  Vector out = net.forward(v);
  CHECK(out[0] == doctest::Approx(1 - 2 + 6 - 1));
  CHECK(out[1] == doctest::Approx(4 - 5 + 12 + 1));
}

TEST_CASE("hand-traced two layer network with the rectifier") {
  Mlp net({2, 2, 2}, false);
  net.weight(0) << 1, 0, 0, -1;
  net.weight(1) << 1, 0, 0, 1;
  net.bias(1) << 0.5, -0.25;

  Vector v(2);
  v << 3, 5; // hidden pre-activations (3, -5), rectified (3, 0)
  Vector out = net.forward(v);
  CHECK(out[0] == doctest::Approx(3.5));
  CHECK(out[1] == doctest::Approx(-0.25));
}

TEST_CASE("batched forward equals per-column forward") {
  Rng rng(7);
  Mlp net = Mlp::random({5, 9, 5}, true, rng);
  Matrix batch = test::random_matrix(5, 6, rng);
  Matrix out = net.forward(batch);
  for (int c = 0; c < 6; ++c)
    CHECK((out.col(c) - net.forward(Vector(batch.col(c)))).norm() < 1e-14);
}

TEST_CASE("affine layer backward has closed-form gradients") {
  Rng rng(9);
  Mlp net({4, 3}, false);
  net.weight(0) = test::random_matrix(3, 4, rng);
  net.bias(0) = test::random_vector(3, rng);
  Vector v = test::random_vector(4, rng);
  Vector upstream = test::random_vector(3, rng);

  auto [grads, input_grad] = net.backward(v, upstream);
  CHECK((input_grad - net.weight(0).transpose() * upstream).norm() < 1e-14);
  CHECK((grads.weights[0] - upstream * v.transpose()).norm() < 1e-14);
  CHECK((grads.biases[0] - upstream).norm() < 1e-14);
}

TEST_CASE("residual skip adds the upstream to the input gradient") {
  Rng rng(10);
  Mlp net({4, 4}, true);
  net.weight(0) = test::random_matrix(4, 4, rng);
  Vector v = test::random_vector(4, rng);
  Vector upstream = test::random_vector(4, rng);
  auto [grads, input_grad] = net.backward(v, upstream);
  CHECK((input_grad - (net.weight(0).transpose() * upstream + upstream)).norm() < 1e-14);
}

TEST_CASE("zero upstream produces zero gradients") {
  Rng rng(11);
  Mlp net = Mlp::random({4, 7, 4}, true, rng);
  auto [grads, input_grad] = net.backward(test::random_vector(4, rng), Vector::Zero(4));
  CHECK(input_grad.norm() == 0.0);
  CHECK(pack_gradients(net, grads).norm() == 0.0);
}

TEST_CASE("backward sums contributions over batch columns") {
  Rng rng(12);
  Mlp net = Mlp::random({3, 6, 3}, false, rng);
  Matrix batch = test::random_matrix(3, 2, rng);
  Matrix upstream = test::random_matrix(3, 2, rng);

  Mlp::Trace trace;
  MlpGradients both = net.zero_gradients();
  net.forward(batch, trace);
  net.backward(trace, upstream, both);

  MlpGradients sum = net.zero_gradients();
  for (int c = 0; c < 2; ++c) {
    Mlp::Trace t;
    net.forward(Matrix(batch.col(c)), t);
    net.backward(t, Matrix(upstream.col(c)), sum);
  }
  CHECK((pack_gradients(net, both) - pack_gradients(net, sum)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("network gradients match central differences") {
  Rng rng(13);
  Mlp net = Mlp::random({4, 6, 4}, true, rng);
  Matrix batch = test::random_matrix(4, 3, rng);
  Matrix weighting = test::random_matrix(4, 3, rng);

  Mlp::Trace trace;
  MlpGradients grads = net.zero_gradients();
  net.forward(batch, trace);
  net.backward(trace, weighting, grads);
  Vector flat = pack_gradients(net, grads);

  auto functional = [&] { return (net.forward(batch).array() * weighting.array()).sum(); };
  Rng pick(14);
  for (int probe = 0; probe < 12; ++probe) {
    auto index = static_cast<Eigen::Index>(
        pick.uniform_int(0, static_cast<int>(net.parameter_count()) - 1));
    CHECK(rel_gap(flat[index], fd_parameter(net, functional, index)) < 1e-5);
  }
}

TEST_CASE("pack and unpack round trip") {
  Rng rng(15);
  Mlp net = Mlp::random({3, 5, 3}, true, rng);
  Vector flat = pack_parameters(net);
  CHECK(flat.size() == net.parameter_count());

  Mlp copy({3, 5, 3}, true);
  unpack_parameters(copy, flat);
  CHECK((pack_parameters(copy) - flat).cwiseAbs().maxCoeff() == 0.0);
  Vector v = test::random_vector(3, rng);
  CHECK((copy.forward(v) - net.forward(v)).norm() == 0.0);

  CHECK_THROWS_AS(unpack_parameters(copy, Vector::Zero(flat.size() + 1)), DimensionMismatch);
}

TEST_CASE("reconstruct lifts through the pseudo-inverse") {
  Rng rng(16);
  LinearOperator a = LinearOperator::mask({0, 2}, 4);
  Mlp id({4, 4}, true); // zero weights + skip: identity
  Vector x = test::random_vector(4, rng);
  Vector y = a.apply(x);
  CHECK((reconstruct(id, y, a) - a.pinv_apply(y)).norm() == 0.0);

  Matrix ys = a.apply(test::random_matrix(4, 5, rng));
  Matrix xs = reconstruct(id, ys, a);
  for (int c = 0; c < 5; ++c)
    CHECK((xs.col(c) - a.pinv_apply(Vector(ys.col(c)))).norm() == 0.0);
}

TEST_CASE("supervised loss at a perfect reconstruction is zero with zero gradients") {
  Rng rng(17);
  LinearOperator a = LinearOperator::mask({0, 1, 2, 3}, 4);
  Mlp id({4, 4}, true);
  Matrix x = test::random_matrix(4, 6, rng);
  LossResult res = loss_supervised(id, a.apply(x), a, x);
  CHECK(res.value == doctest::Approx(0.0));
  CHECK(pack_gradients(id, res.gradients).norm() == 0.0);
}

TEST_CASE("supervised loss of the zero network is the mean signal energy") {
  Rng rng(18);
  LinearOperator a = LinearOperator::mask({0, 1, 2}, 3);
  Mlp zero({3, 3}, false);
  Matrix x = test::random_matrix(3, 5, rng);
  LossResult res = loss_supervised(zero, a.apply(x), a, x);
  CHECK(res.value == doctest::Approx(x.squaredNorm() / 5.0));
}

TEST_CASE("batch loss is the mean of single-sample losses") {
  Rng rng(19);
  LinearOperator a = gaussian_operator(3, 5, rng);
  Mlp net = Mlp::random({5, 8, 5}, true, rng);
  Matrix x = test::random_matrix(5, 4, rng);
  Matrix y = a.apply(x);

  double mean = 0.0;
  for (int c = 0; c < 4; ++c)
    mean += loss_supervised(net, Vector(y.col(c)), a, Vector(x.col(c))).value;
  mean /= 4.0;
  CHECK(loss_supervised(net, y, a, x).value == doctest::Approx(mean));
}

TEST_CASE("supervised gradients match central differences") {
  Rng rng(20);
  LinearOperator a = gaussian_operator(3, 4, rng);
  Mlp net = Mlp::random({4, 6, 4}, true, rng);
  Matrix x = test::random_matrix(4, 3, rng);
  Matrix y = a.apply(x);

  Vector flat = pack_gradients(net, loss_supervised(net, y, a, x).gradients);
  auto functional = [&] { return loss_supervised(net, y, a, x).value; };
  Rng pick(21);
  for (int probe = 0; probe < 10; ++probe) {
    auto index = static_cast<Eigen::Index>(
        pick.uniform_int(0, static_cast<int>(net.parameter_count()) - 1));
    CHECK(rel_gap(flat[index], fd_parameter(net, functional, index)) < 1e-5);
  }
}

TEST_CASE("multi-operator loss vanishes at a consistent inverter") {
  // Signals on the line spanned by (1,1,1); two masks observing coordinates
  // {0,1} and {1,2}. The linear map copying coordinate 1 to every output
  // inverts both lifted observations on that line, so both loss terms are
  // exactly zero and so are the gradients.
  LinearOperator a_g = LinearOperator::mask({0, 1}, 3);
  LinearOperator a_s = LinearOperator::mask({1, 2}, 3);
  Mlp net({3, 3}, false);
  net.weight(0) << 0, 1, 0, 0, 1, 0, 0, 1, 0;

  Matrix x(3, 4);
  for (int c = 0; c < 4; ++c) x.col(c).setConstant(0.5 * (c + 1));
  LossResult res = loss_moi(net, a_g.apply(x), a_g, a_s, 1.0);
  CHECK(res.value == doctest::Approx(0.0));
  CHECK(pack_gradients(net, res.gradients).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("multi-operator loss on a zero-weight network computes by hand") {
  // Scalar observation y = x_0 = 1; with W = 0 the network output is its
  // bias, so the data term is (1 - b_0)^2 and the consistency term compares
  // the bias with itself (exactly zero, along with its gradient). The data
  // term backpropagates upstream u = -2 (1 - b_0, 0) onto the bias and
  // u v^T onto the weights, where v = lifted input (1, 0).
  LinearOperator a_g = LinearOperator::mask({0}, 2);
  LinearOperator a_s = LinearOperator::mask({1}, 2);
  Mlp net({2, 2}, false);
  net.bias(0) << 0.25, -0.75;

  Vector y(1);
  y << 1.0;
  LossResult res = loss_moi(net, y, a_g, a_s, 3.0);
  CHECK(res.value == doctest::Approx(0.5625));
  CHECK(res.gradients.biases[0][0] == doctest::Approx(-1.5));
  CHECK(res.gradients.biases[0][1] == doctest::Approx(0.0));
  Matrix expected_w(2, 2);
  expected_w << -1.5, 0, 0, 0;
  CHECK((res.gradients.weights[0] - expected_w).norm() == doctest::Approx(0.0));
}

TEST_CASE("multi-operator loss value matches its forward formula") {
  Rng rng(22);
  LinearOperator a_g = gaussian_operator(2, 4, rng);
  LinearOperator a_s = gaussian_operator(3, 4, rng);
  Mlp net = Mlp::random({4, 7, 4}, true, rng);
  Matrix x = test::random_matrix(4, 5, rng);
  Matrix y = a_g.apply(x);
  double w = 2.5;

  Matrix x_hat = net.forward(a_g.pinv_apply(y));
  Matrix cycled = net.forward(a_s.pinv_apply(a_s.apply(x_hat)));
  double expected =
      ((y - a_g.apply(x_hat)).squaredNorm() + w * (x_hat - cycled).squaredNorm()) / 5.0;
  CHECK(loss_moi(net, y, a_g, a_s, w).value == doctest::Approx(expected));
}

TEST_CASE("multi-operator gradients match central differences") {
  Rng rng(23);
  LinearOperator a_g = gaussian_operator(2, 3, rng);
  LinearOperator a_s = gaussian_operator(2, 3, rng);
  Mlp net = Mlp::random({3, 5, 3}, true, rng);
  Matrix y = a_g.apply(test::random_matrix(3, 4, rng));

  Vector flat = pack_gradients(net, loss_moi(net, y, a_g, a_s, 1.5).gradients);
  auto functional = [&] { return loss_moi(net, y, a_g, a_s, 1.5).value; };
  Rng pick(24);
  for (int probe = 0; probe < 10; ++probe) {
    auto index = static_cast<Eigen::Index>(
        pick.uniform_int(0, static_cast<int>(net.parameter_count()) - 1));
    CHECK(rel_gap(flat[index], fd_parameter(net, functional, index)) < 1e-5);
  }
}

TEST_CASE("degenerate single-operator form still evaluates") {
  Rng rng(25);
  LinearOperator a = gaussian_operator(2, 3, rng);
  Mlp net = Mlp::random({3, 5, 3}, true, rng);
  Matrix y = a.apply(test::random_matrix(3, 4, rng));

  Matrix x_hat = net.forward(a.pinv_apply(y));
  Matrix cycled = net.forward(a.pinv_apply(a.apply(x_hat)));
  double expected =
      ((y - a.apply(x_hat)).squaredNorm() + (x_hat - cycled).squaredNorm()) / 4.0;
  CHECK(loss_moi(net, y, a, a, 1.0).value == doctest::Approx(expected));
}

TEST_CASE("splitting loss value matches a replayed split") {
  Rng rng(26);
  LinearOperator a = gaussian_operator(5, 6, rng);
  Mlp net = Mlp::random({6, 9, 6}, true, rng);
  Matrix y = a.apply(test::random_matrix(6, 3, rng));

  Rng loss_rng(99);
  Rng replay = loss_rng; // copy: same split draw
  LossResult res = loss_splitting(net, y, a, 0.6, loss_rng);

  SplitOperator split = split_operator(a, 0.6, replay);
  Matrix y1(split.first.rows(), y.cols());
  Matrix y2(split.second.rows(), y.cols());
  for (Eigen::Index i = 0; i < split.first.rows(); ++i)
    y1.row(i) = y.row(split.first_rows[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < split.second.rows(); ++i)
    y2.row(i) = y.row(split.second_rows[static_cast<std::size_t>(i)]);
  Matrix x_hat = net.forward(split.first.pinv_apply(y1));
  double expected = (y2 - split.second.apply(x_hat)).squaredNorm() / 3.0;
  CHECK(res.value == doctest::Approx(expected));
}

TEST_CASE("splitting loss is zero for an exact inverter on the model line") {
  // Signals proportional to the all-ones vector, fully observed; summing the
  // retained coordinates and broadcasting reproduces the signal for every
  // half split, so the held-out share is always predicted exactly.
  LinearOperator a = LinearOperator::mask({0, 1, 2, 3}, 4);
  Mlp net({4, 4}, false);
  net.weight(0).setConstant(0.5);

  Matrix x(4, 3);
  for (int c = 0; c < 3; ++c) x.col(c).setConstant(0.5 * (c + 1));
  Rng rng(27);
  for (int draw = 0; draw < 5; ++draw)
    CHECK(loss_splitting(net, a.apply(x), a, 0.5, rng).value < 1e-20);
}

TEST_CASE("splitting loss replays under a copied generator") {
  Rng rng(28);
  LinearOperator a = gaussian_operator(6, 8, rng);
  Mlp net = Mlp::random({8, 10, 8}, true, rng);
  Matrix y = a.apply(test::random_matrix(8, 4, rng));

  Rng r1(5);
  Rng r2(5);
  LossResult a_res = loss_splitting(net, y, a, 0.5, r1);
  LossResult b_res = loss_splitting(net, y, a, 0.5, r2);
  CHECK(a_res.value == b_res.value);
  CHECK((pack_gradients(net, a_res.gradients) - pack_gradients(net, b_res.gradients))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("splitting gradients match central differences under a frozen split") {
  Rng rng(29);
  LinearOperator a = gaussian_operator(5, 6, rng);
  Mlp net = Mlp::random({6, 8, 6}, true, rng);
  Matrix y = a.apply(test::random_matrix(6, 3, rng));

  Rng base(31);
  Rng grad_rng = base;
  Vector flat =
      pack_gradients(net, loss_splitting(net, y, a, 0.6, grad_rng).gradients);
  auto functional = [&] {
    Rng eval_rng = base; // identical split for every perturbed evaluation
    return loss_splitting(net, y, a, 0.6, eval_rng).value;
  };
  Rng pick(32);
  for (int probe = 0; probe < 10; ++probe) {
    auto index = static_cast<Eigen::Index>(
        pick.uniform_int(0, static_cast<int>(net.parameter_count()) - 1));
    CHECK(rel_gap(flat[index], fd_parameter(net, functional, index)) < 1e-5);
  }
}

TEST_CASE("optimizer configuration is validated") {
  AdamConfig bad;
  bad.beta1 = 1.0;
  CHECK_THROWS_AS(AdamState(bad, 4), std::invalid_argument);
  bad = AdamConfig{};
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(AdamState(bad, 4), std::invalid_argument);
  bad = AdamConfig{};
  bad.weight_decay = -0.1;
  CHECK_THROWS_AS(AdamState(bad, 4), std::invalid_argument);
}

TEST_CASE("optimizer leaves parameters alone on zero gradients") {
  AdamConfig cfg;
  cfg.weight_decay = 0.0;
  AdamState state(cfg, 3);
  Vector params(3);
  params << 1.0, -2.0, 0.5;
  Vector before = params;
  state.step(params, Vector::Zero(3));
  CHECK((params - before).cwiseAbs().maxCoeff() == 0.0);
  CHECK(state.step_count() == 1);
}

TEST_CASE("first optimizer step moves by the learning rate against the gradient sign") {
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.weight_decay = 0.0;
  AdamState state(cfg, 2);
  Vector params = Vector::Zero(2);
  Vector grads(2);
  grads << 2.0, -3.0;
  state.step(params, grads);
  CHECK(params[0] == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(params[1] == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("weight decay is decoupled from the moments") {
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.weight_decay = 0.1;
  AdamState state(cfg, 1);
  Vector params(1);
  params << 5.0;
  state.step(params, Vector::Zero(1));
  CHECK(params[0] == doctest::Approx(5.0 * (1.0 - 0.01 * 0.1)));
}

TEST_CASE("optimizer rejects bad inputs") {
  AdamState state(AdamConfig{}, 3);
  Vector params = Vector::Zero(3);
  CHECK_THROWS_AS(state.step(params, Vector::Zero(4)), DimensionMismatch);
  Vector nan_grads = Vector::Zero(3);
  nan_grads[1] = std::nan("");
  CHECK_THROWS_AS(state.step(params, nan_grads), TrainingFailure);
}

namespace {

struct TrainFixture {
  OperatorBank bank;      // training assignment
  OperatorBank eval_bank; // same operators, fresh assignment for the test set
  Dataset train_data;
  Dataset test_data;

  explicit TrainFixture(std::uint64_t seed, int groups = 2) {
    Rng rng(seed);
    SubspaceModel model = random_subspace(6, 1, rng);
    auto xs = sample_signals(model, 64, rng);
    bank = build_bank(
        groups, [&](Rng& r) { return gaussian_operator(4, 6, r); }, 64, rng);
    train_data = make_dataset(xs, bank, 0.0, rng);
    auto test_xs = sample_signals(model, 32, rng);
    eval_bank = reassign(bank, 32, rng);
    test_data = make_dataset(test_xs, eval_bank, 0.0, rng);
  }
};

} // namespace

TEST_CASE("zero epochs leave the network untouched") {
  TrainFixture fix(33);
  Rng rng(34);
  Mlp net = Mlp::random({6, 12, 6}, true, rng, true);
  Vector before = pack_parameters(net);

  TrainConfig cfg;
  cfg.loss_kind = LossKind::supervised;
  cfg.epochs = 0;
  TrainResult res = train(fix.train_data, fix.bank, net, cfg);
  CHECK(res.epoch_losses.empty());
  CHECK((pack_parameters(net) - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("supervised training reduces the loss") {
  TrainFixture fix(35);
  Rng rng(36);
  Mlp net = Mlp::random({6, 16, 6}, true, rng, true);

  TrainConfig cfg;
  cfg.loss_kind = LossKind::supervised;
  cfg.epochs = 40;
  cfg.batch_size = 16;
  cfg.lr.initial = 2e-3;
  cfg.seed = 7;
  TrainResult res = train(fix.train_data, fix.bank, net, cfg);
  REQUIRE(res.epoch_losses.size() == 40);
  for (double l : res.epoch_losses) CHECK(std::isfinite(l));
  CHECK(res.epoch_losses.back() < 0.5 * res.epoch_losses.front());
}

TEST_CASE("training replays bit-identically from the seed") {
  TrainFixture fix(37);
  TrainConfig cfg;
  cfg.loss_kind = LossKind::moi;
  cfg.epochs = 5;
  cfg.batch_size = 16;
  cfg.seed = 11;

  Rng r1(38);
  Mlp net1 = Mlp::random({6, 12, 6}, true, r1, true);
  Rng r2(38);
  Mlp net2 = Mlp::random({6, 12, 6}, true, r2, true);
  TrainResult res1 = train(fix.train_data, fix.bank, net1, cfg);
  TrainResult res2 = train(fix.train_data, fix.bank, net2, cfg);

  CHECK((pack_parameters(net1) - pack_parameters(net2)).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(res1.epoch_losses.size() == res2.epoch_losses.size());
  for (std::size_t i = 0; i < res1.epoch_losses.size(); ++i)
    CHECK(res1.epoch_losses[i] == res2.epoch_losses[i]);
}

TEST_CASE("trainer validates its inputs") {
  TrainFixture fix(39);
  Rng rng(40);
  Mlp net = Mlp::random({6, 8, 6}, true, rng, true);

  TrainConfig cfg;
  cfg.epochs = -1;
  CHECK_THROWS_AS(train(fix.train_data, fix.bank, net, cfg), std::invalid_argument);

  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(train(fix.train_data, fix.bank, net, cfg), std::invalid_argument);

  cfg = TrainConfig{};
  cfg.lr.drop_epoch = cfg.epochs + 1;
  CHECK_THROWS_AS(train(fix.train_data, fix.bank, net, cfg), std::invalid_argument);

  cfg = TrainConfig{};
  cfg.loss_kind = LossKind::splitting;
  cfg.split_fraction = 1.0;
  CHECK_THROWS_AS(train(fix.train_data, fix.bank, net, cfg), std::invalid_argument);

  cfg = TrainConfig{};
  cfg.loss_kind = LossKind::supervised;
  Dataset no_truth = fix.train_data;
  no_truth.truth.clear();
  CHECK_THROWS_AS(train(no_truth, fix.bank, net, cfg), std::invalid_argument);

  cfg = TrainConfig{};
  Dataset short_data = fix.train_data;
  short_data.measurements.pop_back();
  CHECK_THROWS_AS(train(short_data, fix.bank, net, cfg), DimensionMismatch);
}

TEST_CASE("single-operator training runs with the degenerate cross term") {
  TrainFixture fix(41, 1);
  Rng rng(42);
  Mlp net = Mlp::random({6, 8, 6}, true, rng, true);
  TrainConfig cfg;
  cfg.loss_kind = LossKind::moi;
  cfg.epochs = 2;
  cfg.batch_size = 16;
  TrainResult res = train(fix.train_data, fix.bank, net, cfg);
  CHECK(res.epoch_losses.size() == 2);
}

TEST_CASE("loss kind names round trip") {
  for (LossKind kind : {LossKind::supervised, LossKind::moi, LossKind::splitting})
    CHECK(loss_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(loss_kind_from_string("contrastive"), std::invalid_argument);
}

TEST_CASE("evaluation of the identity network reports no improvement") {
  TrainFixture fix(43);
  Mlp id({6, 6}, true);
  EvalResult res = evaluate(id, fix.test_data, fix.eval_bank);
  CHECK(res.mean_improvement_db == doctest::Approx(0.0));
  CHECK(std::isfinite(res.mean_psnr));
  CHECK(res.mean_psnr < 99.0);
}

TEST_CASE("evaluation under full observation hits the cap") {
  Rng rng(44);
  SubspaceModel model = random_subspace(5, 2, rng);
  auto xs = sample_signals(model, 10, rng);
  OperatorBank bank = build_bank(
      2, [&](Rng& r) { return inpainting_operator(5, 5, r); }, 10, rng);
  Dataset ds = make_dataset(xs, bank, 0.0, rng);
  Mlp id({5, 5}, true);
  EvalResult res = evaluate(id, ds, bank);
  CHECK(res.mean_psnr == doctest::Approx(99.0));
}

TEST_CASE("evaluation validates ground truth") {
  TrainFixture fix(45);
  Mlp id({6, 6}, true);
  Dataset no_truth = fix.test_data;
  no_truth.truth.clear();
  CHECK_THROWS_AS(evaluate(id, no_truth, fix.eval_bank), std::invalid_argument);

  Dataset zero_truth = fix.test_data;
  for (Vector& t : zero_truth.truth) t.setZero();
  CHECK_THROWS_AS(evaluate(id, zero_truth, fix.eval_bank), std::invalid_argument);
}

TEST_CASE("split evaluation is deterministic in the generator seed") {
  TrainFixture fix(46);
  Rng rng(47);
  Mlp net = Mlp::random({6, 10, 6}, true, rng, true);
  Rng e1(9);
  Rng e2(9);
  EvalResult a = evaluate_on_split(net, fix.test_data, fix.eval_bank, 0.6, e1);
  EvalResult b = evaluate_on_split(net, fix.test_data, fix.eval_bank, 0.6, e2);
  CHECK(a.mean_psnr == b.mean_psnr);
  CHECK(a.mean_improvement_db == b.mean_improvement_db);
  CHECK(std::isfinite(a.mean_psnr));
}

TEST_CASE("unrolled reconstruction shape checks") {
  CHECK_THROWS_AS(UnrolledNet(0, {4, 4}, true), std::invalid_argument);
  CHECK_THROWS_AS(UnrolledNet(2, {4, 6, 5}, false), DimensionMismatch);
  UnrolledNet net(2, {4, 6, 4}, true);
  Rng rng(48);
  LinearOperator wrong = gaussian_operator(2, 5, rng);
  CHECK_THROWS_AS(net.forward(Matrix(Matrix::Zero(2, 1)), wrong), DimensionMismatch);
}

TEST_CASE("identity denoisers reduce unrolling to a gradient descent on the data term") {
  Rng rng(49);
  LinearOperator a = gaussian_operator(3, 5, rng);
  Matrix y = a.apply(test::random_matrix(5, 4, rng));

  UnrolledNet net = UnrolledNet::random(3, {5, 7, 5}, true, rng, 0.3, true);
  Matrix expected = a.pinv_apply(y);
  for (int t = 0; t < 3; ++t)
    expected -= 0.3 * a.adjoint(Matrix(a.apply(expected) - y));
  CHECK(test::max_abs_diff(net.forward(y, a), expected) < 1e-12);
}

TEST_CASE("orthonormal-row operators make identity unrolling a fixed point") {
  Rng rng(50);
  LinearOperator a = LinearOperator::mask({0, 2, 4}, 6);
  Matrix y = a.apply(test::random_matrix(6, 3, rng));
  UnrolledNet net(2, {6, 6}, true); // zero denoisers with skips: identities
  CHECK(test::max_abs_diff(net.forward(y, a), a.pinv_apply(y)) < 1e-14);
}

TEST_CASE("unrolled gradients including the step sizes match central differences") {
  Rng rng(51);
  LinearOperator a = gaussian_operator(3, 4, rng);
  UnrolledNet net = UnrolledNet::random(2, {4, 5, 4}, true, rng, 0.25);
  Matrix y = a.apply(test::random_matrix(4, 3, rng));
  Matrix weighting = test::random_matrix(4, 3, rng);

  UnrolledNet::Trace trace;
  UnrolledNet::Gradients grads = net.zero_gradients();
  net.forward(y, a, trace);
  net.backward(trace, a, weighting, grads);
  Vector flat = pack_gradients(net, grads);

  auto functional = [&] { return (net.forward(y, a).array() * weighting.array()).sum(); };
  Eigen::Index count = net.parameter_count();
  Rng pick(52);
  std::vector<Eigen::Index> probes;
  for (int i = 0; i < 10; ++i)
    probes.push_back(static_cast<Eigen::Index>(
        pick.uniform_int(0, static_cast<int>(count) - 1)));
  probes.push_back(count - 1); // the step sizes live at the tail
  probes.push_back(count - 2);
  for (Eigen::Index index : probes)
    CHECK(rel_gap(flat[index], fd_parameter(net, functional, index)) < 1e-5);
}

TEST_CASE("unrolled parameter packing round trips") {
  Rng rng(53);
  UnrolledNet net = UnrolledNet::random(2, {3, 4, 3}, true, rng, 0.4);
  Vector flat = pack_parameters(net);
  CHECK(flat.size() == net.parameter_count());
  CHECK(flat[flat.size() - 1] == doctest::Approx(0.4));

  UnrolledNet copy(2, {3, 4, 3}, true, 0.0);
  unpack_parameters(copy, flat);
  CHECK((pack_parameters(copy) - flat).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(unpack_parameters(copy, Vector::Zero(flat.size() - 1)), DimensionMismatch);
}

TEST_CASE("checkpoints round trip the network and training configuration") {
  test::TempDir dir;
  Rng rng(54);
  Mlp net = Mlp::random({5, 7, 5}, true, rng);

  TrainConfig cfg;
  cfg.loss_kind = LossKind::splitting;
  cfg.epochs = 7;
  cfg.batch_size = 3;
  cfg.lr = {5e-4, 3, 0.1};
  cfg.split_fraction = 0.4;
  cfg.moi_cross_weight = 0.7;
  cfg.seed = 99;

  std::string path = dir.file("net.ckpt");
  save_checkpoint(path, net, cfg);
  Checkpoint loaded = load_checkpoint(path);

  CHECK(loaded.net.layer_sizes() == net.layer_sizes());
  CHECK(loaded.net.residual() == net.residual());
  CHECK((pack_parameters(loaded.net) - pack_parameters(net)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.train.loss_kind == LossKind::splitting);
  CHECK(loaded.train.epochs == 7);
  CHECK(loaded.train.batch_size == 3);
  CHECK(loaded.train.lr.initial == doctest::Approx(5e-4));
  CHECK(loaded.train.lr.drop_epoch == 3);
  CHECK(loaded.train.lr.drop_factor == doctest::Approx(0.1));
  CHECK(loaded.train.split_fraction == doctest::Approx(0.4));
  CHECK(loaded.train.moi_cross_weight == doctest::Approx(0.7));
  CHECK(loaded.train.seed == 99);
}

TEST_CASE("malformed checkpoints fail with the byte offset") {
  test::TempDir dir;

  std::string bad_magic = dir.file("magic.ckpt");
  {
    std::ofstream out(bad_magic, std::ios::binary);
    out << "NOTMYFMT" << std::string(64, '\0');
  }
  CHECK_THROWS_AS(load_checkpoint(bad_magic), FormatError);
  try {
    load_checkpoint(bad_magic);
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }

  Rng rng(55);
  Mlp net = Mlp::random({4, 4}, true, rng);
  std::string truncated = dir.file("short.ckpt");
  save_checkpoint(truncated, net, TrainConfig{});
  {
    std::error_code ec;
    auto size = std::filesystem::file_size(truncated, ec);
    REQUIRE_FALSE(ec);
    std::filesystem::resize_file(truncated, size - 8, ec);
    REQUIRE_FALSE(ec);
  }
  CHECK_THROWS_AS(load_checkpoint(truncated), FormatError);

  CHECK_THROWS_AS(load_checkpoint(dir.file("missing.ckpt")), std::runtime_error);
}
