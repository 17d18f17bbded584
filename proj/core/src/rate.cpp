#include "corra/rate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "corra/estimation.hpp"

namespace corra {

namespace {

constexpr double kMinCombinerNorm = 1e-14;

double log_binomial_pmf(int n, int k, double p) {
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
         (n - k) * std::log1p(-p);
}

double prefactor(int tau_u, int tau_p) {
  if (tau_u < 1 || tau_p < 0 || tau_p > tau_u) throw std::invalid_argument("se: need 0 <= tau_p <= tau_u");
  return static_cast<double>(tau_u - tau_p) / tau_u;
}

}  // namespace

double mrc_sinr(const CVector& v, std::span<const CVector> estimates,
                std::span<const CMatrix> error_covs, double rho_u, int target) {
  if (estimates.size() != error_covs.size())
    throw std::invalid_argument("se_event: estimates and error covariances must align");
  if (target < 0 || target >= static_cast<int>(estimates.size()))
    throw std::invalid_argument("se_event: target is not an active device");
  if (v.norm() < kMinCombinerNorm) throw std::domain_error("se_event: degenerate combiner");

  const double signal = std::norm(v.dot(estimates[static_cast<std::size_t>(target)]));
  double interference = 0.0;
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    if (static_cast<int>(j) != target) interference += std::norm(v.dot(estimates[j]));
    interference += v.dot(error_covs[j] * v).real();
  }
  if (!std::isinf(rho_u)) interference += v.squaredNorm() / rho_u;
  return signal / interference;
}

RateSample se_event(std::span<const CVector> estimates, std::span<const CMatrix> error_covs,
                    double rho_u, int tau_u, int tau_p, int target) {
  if (target < 0 || target >= static_cast<int>(estimates.size()))
    throw std::invalid_argument("se_event: target is not an active device");
  RateSample out;
  out.prefactor = prefactor(tau_u, tau_p);
  out.sinr = mrc_sinr(estimates[static_cast<std::size_t>(target)], estimates, error_covs, rho_u, target);
  out.per_device_se = out.prefactor * std::log2(1.0 + out.sinr);
  return out;
}

RateSimulator::RateSimulator(const SimConfig& config, const GroupingPattern& pattern,
                             std::span<const CovarianceMatrix> covariances)
    : config_(config), pattern_(pattern), covs_(covariances), book_(config.tau_p) {
  config_.validate();
  if (static_cast<int>(covariances.size()) != config.devices || pattern.device_count() != config.devices)
    throw std::invalid_argument("RateSimulator: device count mismatch");
  validate_pattern(pattern, config.tau_p);
  samplers_.reserve(covariances.size());
  for (const auto& r : covariances) samplers_.emplace_back(r);
}

SlotRates RateSimulator::simulate(const IndexSet& active, Rng& rng) const {
  SlotRates out;
  out.active = active;
  if (active.empty()) return out;

  const AccessEvent ev = assign_pilots(active, pattern_, rng);
  const auto n = static_cast<int>(active.size());
  const int m = config_.antennas;

  std::vector<CVector> channels;
  channels.reserve(active.size());
  for (int d : active) channels.push_back(samplers_[static_cast<std::size_t>(d)].sample(rng));
  const CMatrix received = received_pilot_signal(ev, channels, book_, config_.rho_p, rng, m);

  // Position of each device inside `active`.
  std::vector<int> slot(static_cast<std::size_t>(config_.devices), -1);
  for (int i = 0; i < n; ++i) slot[static_cast<std::size_t>(active[i])] = i;

  CMatrix v(m, n);  // MRC combiners = MMSE estimates
  std::vector<CollisionEstimator> estimators;
  std::vector<IndexSet> sets = ev.distinct_collision_sets();
  estimators.reserve(sets.size());
  for (const auto& set : sets) {
    CovarianceRefs members;
    for (int d : set) members.push_back(&covs_[static_cast<std::size_t>(d)]);
    estimators.emplace_back(std::move(members), config_.rho_p, config_.tau_p);
    const CVector y = decorrelate(received, book_.sequence(ev.pilot_of[set.front()]));
    for (std::size_t i = 0; i < set.size(); ++i)
      v.col(slot[static_cast<std::size_t>(set[i])]) = estimators.back().estimate(static_cast<int>(i), y);
  }

  // gram(j, t) = v_t^H h_hat_j; the combiners are the estimates themselves.
  const CMatrix gram = v.adjoint() * v;

  // error(t) = sum_j v_t^H R_err_j v_t with
  // R_err_j = R_j - tau_p R_j A^{-1} R_j, evaluated without forming R_err_j.
  RVector error = RVector::Zero(n);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::size_t i = 0; i < sets[s].size(); ++i) {
      const CMatrix& rj = covs_[static_cast<std::size_t>(sets[s][i])].matrix();
      const CMatrix z = rj * v;
      const CMatrix w = estimators[s].whiten(z);
      for (int t = 0; t < n; ++t)
        error(t) += v.col(t).dot(z.col(t)).real() - config_.tau_p * w.col(t).squaredNorm();
    }
  }

  const double pre = prefactor(config_.tau_u, config_.tau_p);
  out.samples.resize(active.size());
  for (int t = 0; t < n; ++t) {
    const double signal = std::norm(gram(t, t));
    double denom = error(t);
    for (int j = 0; j < n; ++j)
      if (j != t) denom += std::norm(gram(j, t));
    if (!std::isinf(config_.rho_u)) denom += gram(t, t).real() / config_.rho_u;
    auto& s = out.samples[static_cast<std::size_t>(t)];
    s.prefactor = pre;
    s.sinr = gram(t, t).real() < kMinCombinerNorm * kMinCombinerNorm ? 0.0 : signal / denom;
    s.per_device_se = pre * std::log2(1.0 + s.sinr);
    out.sum_se += s.per_device_se;
  }
  return out;
}

MonteCarloEstimate expected_se_monte_carlo(const SimConfig& config, const GroupingPattern& pattern,
                                           std::span<const CovarianceMatrix> covariances) {
  const RateSimulator sim(config, pattern, covariances);
  return run_trials(
      config.trials, config.seed, config.workers, [] { return 0; },
      [&](int&, Rng& rng, bool& active) {
        const IndexSet act = sample_active_set(config.devices, config.p_a, rng);
        active = !act.empty();
        if (!active) return 0.0;
        return sim.simulate(act, rng).sum_se;
      });
}

MonteCarloEstimate expected_se_weighted(const SimConfig& config, const GroupingPattern& pattern,
                                        std::span<const CovarianceMatrix> covariances) {
  const RateSimulator sim(config, pattern, covariances);
  const int k = config.devices;

  // Active-set sizes that carry non-negligible probability.
  std::vector<int> sizes;
  for (int ka = 1; ka <= k; ++ka)
    if (std::exp(log_binomial_pmf(k, ka, config.p_a)) > 1e-12) sizes.push_back(ka);

  MonteCarloEstimate out;
  if (sizes.empty()) return out;
  const long per_size = std::max<long>(1, config.trials / static_cast<long>(sizes.size()));

  const int ref_group_devices = static_cast<int>(pattern.groups.front().size());
  const int ref_group_pilots = static_cast<int>(pattern.pilot_sets.front().size());

  double mean = 0.0;
  double var = 0.0;
  for (int ka : sizes) {
    const auto stats = run_trials(
        per_size, derive_seed(config.seed, static_cast<std::uint64_t>(ka)), config.workers,
        [] { return 0; },
        [&](int&, Rng& rng, bool& active) {
          std::vector<int> all(static_cast<std::size_t>(k));
          std::iota(all.begin(), all.end(), 0);
          for (int i = 0; i < ka; ++i) std::swap(all[i], all[i + rng.uniform_index(k - i)]);
          IndexSet act(all.begin(), all.begin() + ka);
          std::sort(act.begin(), act.end());
          active = true;
          return sim.simulate(act, rng).sum_se / ka;
        });
    const auto pmf = collider_count_pmf(k, ref_group_devices, ref_group_pilots, ka);
    const double collider_mass = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    const double weight = ka * std::exp(log_binomial_pmf(k, ka, config.p_a)) * collider_mass;
    mean += weight * stats.mean;
    var += weight * weight * stats.std_error * stats.std_error;
    out.trials += stats.trials;
    out.active_trials += stats.active_trials;
  }
  out.mean = mean;
  out.std_error = std::sqrt(var);
  out.empty = out.active_trials == 0;
  return out;
}

}  // namespace corra
