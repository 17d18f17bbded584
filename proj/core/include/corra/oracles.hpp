#pragma once

// Independent reference computations used by the validation suite and the
// acceptance tests. None of these share code paths with the quantities they
// check beyond the public random-access primitives.

#include <cstdint>
#include <vector>

#include "corra/access.hpp"
#include "corra/channel_model.hpp"

namespace corra::oracle {

// P(c colliders | K_a active) by enumerating which other devices are active
// (all size K_a-1 subsets, equally likely) and every pilot choice of the
// in-group active devices.
std::vector<double> brute_force_collider_pmf(int devices, int group_devices, int group_pilots,
                                             int active_devices);

// Pattern with the reference group {0..U-1} owning pilots {0..W-1} and every
// other device in a second group on a pilot of its own.
GroupingPattern reference_group_pattern(int devices, int group_devices, int group_pilots);

struct PmfFrequencyCheck {
  std::vector<double> formula;
  std::vector<double> frequency;
  std::vector<double> z;  // |frequency - formula| / binomial standard error
  double max_z = 0.0;
  long trials = 0;
};

// Collider counts of device 0 under the literal process: K_a - 1 other
// devices drawn uniformly, pilots drawn by assign_pilots.
PmfFrequencyCheck collider_pmf_frequencies(int devices, int group_devices, int group_pilots,
                                           int active_devices, long trials, std::uint64_t seed);

struct MmseConsistencyCheck {
  double analytic_mse = 0.0;
  double empirical_mse = 0.0;
  double relative_error = 0.0;
  // max over entries of |mean(e y^H)| / standard error of that mean
  double max_cross_z = 0.0;
  long trials = 0;
};

// Device 0 with covariance `target` shares its pilot with one collider.
// Channels, received pilots and decorrelation follow the signal model.
MmseConsistencyCheck mmse_consistency(const CovarianceMatrix& target,
                                      const CovarianceMatrix& collider, double rho_p, int tau_p,
                                      long trials, std::uint64_t seed);

// |R_dft - R_exact|_F / |R_exact|_F.
double dft_relative_error(const DeviceProfile& profile, int antennas);

// n x n Hermitian PSD matrix G G^H / n with complex Gaussian G of rank `rank`.
CMatrix random_psd(int n, int rank, Rng& rng);

}  // namespace corra::oracle
