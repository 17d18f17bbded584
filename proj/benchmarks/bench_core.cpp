#include <benchmark/benchmark.h>

#include "corra/access.hpp"
#include "corra/estimation.hpp"
#include "corra/grouping.hpp"
#include "corra/rate.hpp"

namespace {

using namespace corra;

std::vector<CovarianceMatrix> population(int m, int k, int quad) {
  Rng rng(9);
  std::vector<CovarianceMatrix> covs;
  for (int d = 0; d < k; ++d)
    covs.push_back(covariance_exact({deg_to_rad(5.0), (2.0 * rng.uniform() - 1.0) * kPi / 3.0, 1.0}, {m, 0.5}, quad));
  return covs;
}

void BM_CovarianceExact(benchmark::State& state) {
  const DeviceProfile p{deg_to_rad(5.0), 0.3, 1.0};
  const ArrayConfig a{static_cast<int>(state.range(0)), 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(covariance_exact(p, a));
}
BENCHMARK(BM_CovarianceExact)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_CovarianceDftApprox(benchmark::State& state) {
  const DeviceProfile p{deg_to_rad(5.0), 0.3, 1.0};
  const ArrayConfig a{static_cast<int>(state.range(0)), 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(covariance_dft_approx(p, a));
}
BENCHMARK(BM_CovarianceDftApprox)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_MseCollision(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto covs = population(m, 3, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(mse_ce(covs[0], {&covs[1], &covs[2]}, 100.0, 20));
}
BENCHMARK(BM_MseCollision)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_ColliderPmf(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(collider_count_pmf(120, 6, 2, 40));
}
BENCHMARK(BM_ColliderPmf);

void BM_Dgpsa(benchmark::State& state) {
  const auto covs = population(64, static_cast<int>(state.range(0)), 1024);
  const auto pilots = split_pilots(20, 10);
  for (auto _ : state) benchmark::DoNotOptimize(dgpsa(covs, pilots));
}
BENCHMARK(BM_Dgpsa)->Arg(40)->Arg(120)->Unit(benchmark::kMillisecond);

SimConfig desk_config(long trials) {
  SimConfig c;
  c.trials = trials;
  c.seed = 3;
  return c;
}

void BM_MseMonteCarlo(benchmark::State& state) {
  const auto cfg = desk_config(256);
  const auto covs = population(cfg.antennas, cfg.devices, 1024);
  const auto pattern = dgpsa(covs, split_pilots(cfg.tau_p, cfg.groups));
  for (auto _ : state) benchmark::DoNotOptimize(expected_mse_monte_carlo(cfg, pattern, covs));
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_MseMonteCarlo)->Unit(benchmark::kMillisecond);

void BM_RateSlot(benchmark::State& state) {
  SimConfig cfg = desk_config(1);
  cfg.tau_p = 10;
  cfg.groups = 5;
  cfg.tau_u = 43;
  const auto covs = population(cfg.antennas, cfg.devices, 1024);
  const auto pattern = dgpsa(covs, split_pilots(cfg.tau_p, cfg.groups));
  const RateSimulator sim(cfg, pattern, covs);
  Rng rng(4);
  for (auto _ : state) {
    const IndexSet active = sample_active_set(cfg.devices, cfg.p_a, rng);
    benchmark::DoNotOptimize(sim.simulate(active, rng));
  }
}
BENCHMARK(BM_RateSlot)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
