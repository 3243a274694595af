// Microbenchmarks for the hot paths: the per-iteration SVD shrink inside the
// convex solver, the solver end to end, network passes and the training
// losses. Run ./multiop_bench; google-benchmark picks iteration counts.

#include <benchmark/benchmark.h>

#include "multiop/losses.hpp"
#include "multiop/lowrank.hpp"
#include "multiop/mlp.hpp"
#include "multiop/numerics.hpp"
#include "multiop/operators.hpp"
#include "multiop/rng.hpp"
#include "multiop/signals.hpp"

using namespace multiop;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

void bm_svd_shrink(benchmark::State& state) {
  Rng rng(1);
  const Matrix m = random_matrix(50, static_cast<int>(state.range(0)), rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(soft_threshold_singular(m, 0.5));
}
BENCHMARK(bm_svd_shrink)->Arg(150)->Arg(1500);

void bm_svt_recover(benchmark::State& state) {
  Rng rng(2);
  const int n = 50, k = 1, groups = 10, m = 20, count = 150;
  const SubspaceModel model = random_subspace(n, k, rng);
  OperatorBank bank = build_bank(
      groups, [&](Rng& r) { return gaussian_operator(m, n, r); }, count, rng);
  const Dataset data = make_dataset(sample_signals(model, count, rng), bank, 0.0, rng);
  SvtConfig cfg;
  cfg.max_iters = static_cast<int>(state.range(0));
  cfg.residual_tol = 1e-12; // never reached: fixed iteration count
  cfg.predict_abort = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(svt_recover(data, bank, cfg));
}
BENCHMARK(bm_svt_recover)->Arg(25)->Unit(benchmark::kMillisecond);

void bm_mlp_forward(benchmark::State& state) {
  Rng rng(3);
  Mlp net = Mlp::random({64, 256, 32, 256, 64}, true, rng);
  const Matrix x = random_matrix(64, static_cast<int>(state.range(0)), rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(bm_mlp_forward)->Arg(1)->Arg(128);

void bm_mlp_backward(benchmark::State& state) {
  Rng rng(4);
  Mlp net = Mlp::random({64, 256, 32, 256, 64}, true, rng);
  const Matrix x = random_matrix(64, static_cast<int>(state.range(0)), rng);
  MlpGradients grads = net.zero_gradients();
  for (auto _ : state) {
    Mlp::Trace trace;
    const Matrix out = net.forward(x, trace);
    grads.set_zero();
    benchmark::DoNotOptimize(net.backward(trace, out, grads));
  }
}
BENCHMARK(bm_mlp_backward)->Arg(128);

void bm_loss_moi(benchmark::State& state) {
  Rng rng(5);
  const int n = 64, m = 16, batch = 128;
  Mlp net = Mlp::random({n, 256, 32, 256, n}, true, rng);
  const LinearOperator a_g = gaussian_operator(m, n, rng);
  const LinearOperator a_s = gaussian_operator(m, n, rng);
  const Matrix y = a_g.apply(random_matrix(n, batch, rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(loss_moi(net, y, a_g, a_s, 1.0));
}
BENCHMARK(bm_loss_moi)->Unit(benchmark::kMillisecond);

void bm_operator_apply(benchmark::State& state) {
  Rng rng(6);
  const int n = 256, m = 64;
  const bool mask = state.range(0) == 1;
  const LinearOperator a =
      mask ? inpainting_operator(m, n, rng) : gaussian_operator(m, n, rng);
  const Matrix x = random_matrix(n, 128, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(a.apply(x));
}
BENCHMARK(bm_operator_apply)->Arg(0)->Arg(1);

} // namespace

BENCHMARK_MAIN();
