#pragma once

#include <span>
#include <vector>

#include "corra/access.hpp"
#include "corra/channel_model.hpp"
#include "corra/grouping.hpp"
#include "corra/stats.hpp"

namespace corra {

struct RateSample {
  double per_device_se = 0.0;  // bits/s/Hz
  double sinr = 0.0;
  double prefactor = 0.0;  // (tau_u - tau_p) / tau_u
};

// Data-phase SE of active device `target` with MRC (v = h_hat_target).
// `estimates` and `error_covs` hold one entry per active device.
RateSample se_event(std::span<const CVector> estimates, std::span<const CMatrix> error_covs,
                    double rho_u, int tau_u, int tau_p, int target);

// SINR of combiner v against the event; exposed for invariance checks.
double mrc_sinr(const CVector& v, std::span<const CVector> estimates,
                std::span<const CMatrix> error_covs, double rho_u, int target);

struct SlotRates {
  IndexSet active;
  std::vector<RateSample> samples;  // aligned with `active`
  double sum_se = 0.0;
};

// Simulates one slot end to end: channels, received pilots, decorrelation,
// MMSE estimation and the per-device MRC rate.
class RateSimulator {
 public:
  RateSimulator(const SimConfig& config, const GroupingPattern& pattern,
                std::span<const CovarianceMatrix> covariances);

  SlotRates simulate(const IndexSet& active, Rng& rng) const;
  const SimConfig& config() const { return config_; }

 private:
  SimConfig config_;
  const GroupingPattern& pattern_;
  std::span<const CovarianceMatrix> covs_;
  std::vector<ChannelSampler> samplers_;
  PilotBook book_;
};

// Expected network sum SE, E[sum_{k active} SE_k], over activation, pilot
// draws, channels and noise.
MonteCarloEstimate expected_se_monte_carlo(const SimConfig& config, const GroupingPattern& pattern,
                                           std::span<const CovarianceMatrix> covariances);

// The same quantity assembled with explicit weights:
// sum_{K_a} K_a p(K_a|K) sum_c p(c|K_a) * (mean per-device SE given K_a),
// where each conditional mean is a Monte Carlo average over uniformly drawn
// active sets of size K_a. config.trials is split evenly across K_a values.
MonteCarloEstimate expected_se_weighted(const SimConfig& config, const GroupingPattern& pattern,
                                        std::span<const CovarianceMatrix> covariances);

}  // namespace corra
