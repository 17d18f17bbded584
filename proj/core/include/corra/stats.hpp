#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "corra/rng.hpp"

namespace corra {

// Welford accumulator with Chan's pairwise merge.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  long count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased sample variance
  double std_error() const;

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long trials = 0;
  // Trials in which at least one device was active.
  long active_trials = 0;
  // Set when no trial ever had an active device; mean is then 0.
  bool empty = true;
};

// Trials are cut into fixed-size blocks, each with a seed derived from
// (seed, block index). Blocks are merged in index order, so the result does
// not depend on the worker count.
inline constexpr long kTrialBlockSize = 256;

// Runs `trials` Monte Carlo trials. `make_state()` builds per-worker state
// (caches and the like); `trial(state, rng, active)` returns one sample and
// sets `active` when the trial had at least one active device.
template <class MakeState, class Trial>
MonteCarloEstimate run_trials(long trials, std::uint64_t seed, int workers,
                              MakeState make_state, Trial trial) {
  const long blocks = (trials + kTrialBlockSize - 1) / kTrialBlockSize;
  std::vector<RunningStats> block_stats(static_cast<std::size_t>(blocks));
  std::vector<long> block_active(static_cast<std::size_t>(blocks), 0);
  std::atomic<long> next{0};

  auto work = [&]() {
    auto state = make_state();
    for (long b = next++; b < blocks; b = next++) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
      const long begin = b * kTrialBlockSize;
      const long end = std::min(trials, begin + kTrialBlockSize);
      auto& stats = block_stats[static_cast<std::size_t>(b)];
      for (long t = begin; t < end; ++t) {
        bool active = false;
        stats.add(trial(state, rng, active));
        if (active) ++block_active[static_cast<std::size_t>(b)];
      }
    }
  };

  const int n = std::max(1, std::min<int>(workers, static_cast<int>(blocks)));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  RunningStats total;
  long active = 0;
  for (long b = 0; b < blocks; ++b) {
    total.merge(block_stats[static_cast<std::size_t>(b)]);
    active += block_active[static_cast<std::size_t>(b)];
  }
  MonteCarloEstimate out;
  out.trials = total.count();
  out.active_trials = active;
  out.empty = active == 0;
  out.mean = out.empty ? 0.0 : total.mean();
  out.std_error = out.empty ? 0.0 : total.std_error();
  return out;
}

}  // namespace corra
