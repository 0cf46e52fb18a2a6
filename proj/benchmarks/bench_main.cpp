// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <complex>

#include "imteval/channel.hpp"
#include "imteval/engine.hpp"
#include "imteval/geometry.hpp"
#include "imteval/profiles.hpp"
#include "imteval/random.hpp"
#include "imteval/scenario.hpp"

namespace {

using namespace imteval;

void BM_WrapDistance(benchmark::State& state) {
  const auto layout = geometry::build_layout(preset(Environment::UrbanMacro_mMTC, Variant::A));
  auto rng = derive_stream(1, 0, 0);
  const geometry::Vec2 a{rng.uniform(-1500, 1500), rng.uniform(-1500, 1500)};
  const geometry::Vec2 b{rng.uniform(-1500, 1500), rng.uniform(-1500, 1500)};
  for (auto _ : state) benchmark::DoNotOptimize(geometry::wrap_distance(layout, a, b));
}
BENCHMARK(BM_WrapDistance);

void BM_GenClusters(benchmark::State& state) {
  const auto& c = channel::ProfileLibrary::builtin().get("UMa_A").nlos;
  auto rng = derive_stream(2, 0, 0);
  const auto lsp = channel::gen_lsp(c, channel::Condition::NLOS, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel::gen_clusters(lsp, c, c.n_clusters, 20, {}, rng));
  }
}
BENCHMARK(BM_GenClusters);

void BM_CoefficientSample(benchmark::State& state) {
  const auto& c = channel::ProfileLibrary::builtin().get("UMa_A").nlos;
  auto rng = derive_stream(3, 0, 0);
  channel::ChannelRealization real;
  real.lsp = channel::gen_lsp(c, channel::Condition::NLOS, rng);
  real.clusters = channel::gen_clusters(real.lsp, c, c.n_clusters, 20, {}, rng);
  real.carrier = 700e6;
  const auto tx = channel::PortArray::single_isotropic();
  const auto rx = channel::PortArray::single_isotropic();
  const channel::CoefficientGenerator g(real, tx, rx);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.at(t));
    t += 1e-3;
  }
}
BENCHMARK(BM_CoefficientSample);

void BM_MmtcDrop(benchmark::State& state) {
  const engine::Simulator sim(preset(Environment::UrbanMacro_mMTC, Variant::A));
  std::uint64_t drop = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim.run_drop(drop++));
}
BENCHMARK(BM_MmtcDrop)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
