#include "corra/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "corra/estimation.hpp"

namespace corra::oracle {

std::vector<double> brute_force_collider_pmf(int devices, int group_devices, int group_pilots,
                                             int active_devices) {
  const int k = devices;
  const int u = group_devices;
  const int w = group_pilots;
  const int ka = active_devices;
  if (k > 20) throw std::invalid_argument("brute_force_collider_pmf: too many devices");

  std::vector<double> pmf(static_cast<std::size_t>(ka), 0.0);
  long subsets = 0;
  // Others are devices 1..K-1; in-group others are 1..U-1.
  for (unsigned mask = 0; mask < (1u << (k - 1)); ++mask) {
    if (std::popcount(mask) != ka - 1) continue;
    ++subsets;
    int in_group = 0;
    for (int d = 1; d < u; ++d)
      if (mask & (1u << (d - 1))) ++in_group;

    // Reference pilot plus one pilot per in-group active device.
    const int slots = in_group + 1;
    long assignments = 1;
    for (int i = 0; i < slots; ++i) assignments *= w;
    std::vector<double> counts(static_cast<std::size_t>(ka), 0.0);
    for (long a = 0; a < assignments; ++a) {
      long code = a;
      const int ref = static_cast<int>(code % w);
      code /= w;
      int c = 0;
      for (int i = 1; i < slots; ++i) {
        if (static_cast<int>(code % w) == ref) ++c;
        code /= w;
      }
      counts[static_cast<std::size_t>(c)] += 1.0;
    }
    for (int c = 0; c < ka; ++c) pmf[c] += counts[c] / static_cast<double>(assignments);
  }
  for (auto& p : pmf) p /= static_cast<double>(subsets);
  return pmf;
}

GroupingPattern reference_group_pattern(int devices, int group_devices, int group_pilots) {
  GroupingPattern p;
  p.groups.resize(devices > group_devices ? 2 : 1);
  p.pilot_sets.resize(p.groups.size());
  p.group_of.assign(static_cast<std::size_t>(devices), 0);
  for (int d = 0; d < group_devices; ++d) p.groups[0].push_back(d);
  for (int i = 0; i < group_pilots; ++i) p.pilot_sets[0].push_back(i);
  if (devices > group_devices) {
    for (int d = group_devices; d < devices; ++d) {
      p.groups[1].push_back(d);
      p.group_of[d] = 1;
    }
    p.pilot_sets[1].push_back(group_pilots);
  }
  return p;
}

PmfFrequencyCheck collider_pmf_frequencies(int devices, int group_devices, int group_pilots,
                                           int active_devices, long trials, std::uint64_t seed) {
  const auto pattern = reference_group_pattern(devices, group_devices, group_pilots);
  PmfFrequencyCheck out;
  out.formula = collider_count_pmf(devices, group_devices, group_pilots, active_devices);
  out.frequency.assign(out.formula.size(), 0.0);
  out.trials = trials;

  Rng rng(seed);
  std::vector<int> others(static_cast<std::size_t>(devices - 1));
  for (long t = 0; t < trials; ++t) {
    std::iota(others.begin(), others.end(), 1);
    IndexSet active{0};
    const int n = static_cast<int>(others.size());
    for (int i = 0; i < active_devices - 1; ++i) {
      std::swap(others[i], others[i + rng.uniform_index(n - i)]);
      active.push_back(others[i]);
    }
    std::sort(active.begin(), active.end());
    const auto ev = assign_pilots(active, pattern, rng);
    out.frequency[ev.collision_set(0).size() - 1] += 1.0;
  }
  for (std::size_t c = 0; c < out.frequency.size(); ++c) {
    out.frequency[c] /= static_cast<double>(trials);
    const double p = out.formula[c];
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(trials));
    const double diff = std::abs(out.frequency[c] - p);
    out.z.push_back(diff == 0.0 ? 0.0 : diff / se);
    out.max_z = std::max(out.max_z, out.z.back());
  }
  return out;
}

MmseConsistencyCheck mmse_consistency(const CovarianceMatrix& target, const CovarianceMatrix& collider,
                                      double rho_p, int tau_p, long trials, std::uint64_t seed) {
  const int m = target.dim();
  const ChannelSampler s0(target);
  const ChannelSampler s1(collider);
  const PilotBook book(tau_p);
  const CollisionEstimator est({&target, &collider}, rho_p, tau_p);
  const AccessEvent ev = make_access_event({0, 1}, {0, 0}, 2);
  const CVector pilot = book.sequence(0);

  MmseConsistencyCheck out;
  out.analytic_mse = est.mse(0);
  out.trials = trials;

  Rng rng(seed);
  double sq_err = 0.0;
  CMatrix cross_sum = CMatrix::Zero(m, m);
  Eigen::MatrixXd cross_sq = Eigen::MatrixXd::Zero(m, m);
  for (long t = 0; t < trials; ++t) {
    std::vector<CVector> h{s0.sample(rng), s1.sample(rng)};
    const CMatrix y_mat = received_pilot_signal(ev, h, book, rho_p, rng);
    const CVector y = decorrelate(y_mat, pilot);
    const CVector e = h[0] - est.estimate(0, y);
    sq_err += e.squaredNorm();
    const CMatrix outer = e * y.adjoint();
    cross_sum += outer;
    cross_sq += outer.cwiseAbs2();
  }
  const double n = static_cast<double>(trials);
  out.empirical_mse = sq_err / n;
  out.relative_error = std::abs(out.empirical_mse - out.analytic_mse) / out.analytic_mse;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Complex mean = cross_sum(i, j) / n;
      const double var = cross_sq(i, j) / n - std::norm(mean);
      const double se = std::sqrt(std::max(var, 0.0) / n);
      if (se > 0.0) out.max_cross_z = std::max(out.max_cross_z, std::abs(mean) / se);
    }
  }
  return out;
}

double dft_relative_error(const DeviceProfile& profile, int antennas) {
  const ArrayConfig cfg{antennas, 0.5};
  const auto exact = covariance_exact(profile, cfg);
  const auto approx = covariance_dft_approx(profile, cfg);
  return (approx.matrix() - exact.matrix()).norm() / exact.matrix().norm();
}

CMatrix random_psd(int n, int rank, Rng& rng) {
  CMatrix g(n, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.complex_normal();
  return g * g.adjoint() / static_cast<double>(n);
}

}  // namespace corra::oracle
