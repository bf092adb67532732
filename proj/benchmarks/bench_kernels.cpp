// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "mocha/conv.hpp"
#include "mocha/cost_volume.hpp"
#include "mocha/motif_graph.hpp"
#include "mocha/random.hpp"
#include "mocha/update_op.hpp"
#include "mocha/wavelet.hpp"

using namespace mocha;

namespace {

Tensor3 input(std::uint64_t seed, std::size_t c, std::size_t h, std::size_t w) {
  SeededGenerator g(seed);
  return seeded_uniform(g, c, h, w, 1.0);
}

void BM_Dwt2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor2 x = input(1, 1, n, n).channel(0);
  for (auto _ : state) benchmark::DoNotOptimize(wavelet::idwt2(wavelet::dwt2(x, 2)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_Dwt2)->Arg(32)->Arg(64)->Arg(128);

void BM_GroupCorr(benchmark::State& state) {
  const Tensor3 l = input(2, 32, 24, 32), r = input(3, 32, 24, 32);
  cost::CorrOptions o;
  o.groups = 8;
  o.max_disparity = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cost::group_corr(l, r, o));
}
BENCHMARK(BM_GroupCorr)->Arg(24)->Arg(48);

void BM_McgaApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor3 f = input(4, 32, n, n);
  motif::McgaConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(motif::mcga_apply(f, cfg));
}
BENCHMARK(BM_McgaApply)->Arg(12)->Arg(24)->Arg(48);

void BM_Conv2d(benchmark::State& state) {
  SeededGenerator g(5);
  const auto conv = nn::Conv2d::seeded(g, 80, 256, 3, 1);
  const Tensor3 x = input(6, 80, 24, 32);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
}
BENCHMARK(BM_Conv2d);

void BM_LstmStep(benchmark::State& state) {
  const std::size_t hidden = 64, in = 25;
  SeededGenerator g(7);
  const update::StageWeights w{nn::Conv2d::seeded(g, hidden + in, 4 * hidden, 3, 1)};
  const update::LstmState prev{input(8, hidden, 24, 32), input(9, hidden, 24, 32)};
  const Tensor3 x = input(10, in, 24, 32);
  for (auto _ : state) benchmark::DoNotOptimize(update::lstm_step(prev, x, w, hidden));
}
BENCHMARK(BM_LstmStep);

}  // namespace

BENCHMARK_MAIN();
