#include "corra/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace corra {

namespace {

constexpr long kMaxEnumerationTerms = 100'000'000;

Eigen::LLT<CMatrix> factorise(const CMatrix& a, const char* who) {
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(std::string(who) + ": regularised covariance is numerically singular");
  return llt;
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

void check_dims(const CovarianceMatrix& rk, const CovarianceRefs& others) {
  for (const auto* r : others)
    if (r->dim() != rk.dim()) throw std::invalid_argument("estimation: covariance dimensions differ");
}

// B = sum_{members} R + I/(rho_p tau_p), the matrix inverted in the MSE-CE trace.
CMatrix mse_kernel(const CovarianceMatrix& rk, const CovarianceRefs& colliders, double rho_p,
                   int tau_p) {
  CMatrix b = rk.matrix();
  for (const auto* r : colliders) b += r->matrix();
  b.diagonal().array() += 1.0 / (rho_p * tau_p);
  return b;
}

double trace_minus_quadratic(const CMatrix& rk, const Eigen::LLT<CMatrix>& llt) {
  const CMatrix x = llt.matrixL().solve(rk);
  return rk.trace().real() - x.squaredNorm();
}

}  // namespace

CollisionEstimator::CollisionEstimator(CovarianceRefs members, double rho_p, int tau_p)
    : members_(std::move(members)), tau_p_(tau_p) {
  if (members_.empty()) throw std::invalid_argument("CollisionEstimator: empty collision set");
  if (tau_p < 1 || !(rho_p > 0.0)) throw std::invalid_argument("CollisionEstimator: bad tau_p or rho_p");
  const int m = members_.front()->dim();
  CMatrix a = CMatrix::Zero(m, m);
  for (const auto* r : members_) {
    if (r->dim() != m) throw std::invalid_argument("CollisionEstimator: covariance dimensions differ");
    a += static_cast<double>(tau_p) * r->matrix();
  }
  a.diagonal().array() += 1.0 / rho_p;
  llt_ = factorise(a, "CollisionEstimator");
}

CMatrix CollisionEstimator::whiten(const CMatrix& rhs) const { return llt_.matrixL().solve(rhs); }

CVector CollisionEstimator::estimate(int member, const CVector& y) const {
  return members_[static_cast<std::size_t>(member)]->matrix() * llt_.solve(y);
}

CMatrix CollisionEstimator::error_covariance(int member) const {
  const CMatrix& rk = members_[static_cast<std::size_t>(member)]->matrix();
  const CMatrix x = whiten(rk);
  return hermitian_part(rk - static_cast<double>(tau_p_) * (x.adjoint() * x));
}

double CollisionEstimator::mse(int member) const {
  const CMatrix& rk = members_[static_cast<std::size_t>(member)]->matrix();
  return rk.trace().real() - tau_p_ * whiten(rk).squaredNorm();
}

EstimationResult CollisionEstimator::estimate_full(int member, const CVector& y) const {
  EstimationResult out;
  out.estimate = estimate(member, y);
  out.error_cov = error_covariance(member);
  out.mse = out.error_cov.trace().real();
  return out;
}

namespace {

CovarianceRefs with_target(const CovarianceMatrix& rk, const CovarianceRefs& colliders) {
  CovarianceRefs all{&rk};
  all.insert(all.end(), colliders.begin(), colliders.end());
  return all;
}

}  // namespace

CVector mmse_estimate(const CVector& y, const CovarianceMatrix& rk, const CovarianceRefs& colliders,
                      double rho_p, int tau_p) {
  check_dims(rk, colliders);
  if (y.size() != rk.dim()) throw std::invalid_argument("mmse_estimate: observation length mismatch");
  return CollisionEstimator(with_target(rk, colliders), rho_p, tau_p).estimate(0, y);
}

CMatrix error_covariance(const CovarianceMatrix& rk, const CovarianceRefs& colliders, double rho_p,
                         int tau_p) {
  check_dims(rk, colliders);
  return CollisionEstimator(with_target(rk, colliders), rho_p, tau_p).error_covariance(0);
}

double mse_ce(const CovarianceMatrix& rk, const CovarianceRefs& colliders, double rho_p, int tau_p) {
  check_dims(rk, colliders);
  if (tau_p < 1 || !(rho_p > 0.0)) throw std::invalid_argument("mse_ce: bad tau_p or rho_p");
  const auto llt = factorise(mse_kernel(rk, colliders, rho_p, tau_p), "mse_ce");
  return trace_minus_quadratic(rk.matrix(), llt);
}

double mse_lower_bound_device(const CovarianceMatrix& rk, double rho_p, int tau_p) {
  return mse_ce(rk, {}, rho_p, tau_p);
}

double mse_lower_bound_spectral(const RVector& angular_power, double rho_p, int tau_p) {
  const double noise = 1.0 / (rho_p * tau_p);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < angular_power.size(); ++i) {
    const double r = angular_power(i);
    acc += r - r * r / (r + noise);
  }
  return acc;
}

double mse_bound_global(std::span<const CovarianceMatrix> covariances, double p_a, double rho_p,
                        int tau_p) {
  if (covariances.empty()) throw std::invalid_argument("mse_bound_global: no devices");
  double acc = 0.0;
  for (const auto& r : covariances) acc += mse_lower_bound_device(r, rho_p, tau_p);
  return p_a * acc / static_cast<double>(covariances.size());
}

std::size_t CollisionMseCache::Hash::operator()(const IndexSet& s) const noexcept {
  std::size_t h = s.size();
  for (int v : s) h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

CollisionMseCache::CollisionMseCache(std::span<const CovarianceMatrix> covariances, double rho_p,
                                     int tau_p)
    : covs_(covariances), rho_p_(rho_p), tau_p_(tau_p) {
  bounds_.reserve(covariances.size());
  for (const auto& r : covariances) bounds_.push_back(mse_lower_bound_device(r, rho_p, tau_p));
}

const std::vector<double>& CollisionMseCache::lookup(const IndexSet& set) {
  auto it = cache_.find(set);
  if (it != cache_.end()) return it->second;

  // Every member sees the same kernel sum_{l in set} R_l + I/(rho_p tau_p).
  const auto& first = covs_[static_cast<std::size_t>(set.front())];
  CovarianceRefs rest;
  for (std::size_t i = 1; i < set.size(); ++i) rest.push_back(&covs_[static_cast<std::size_t>(set[i])]);
  const auto llt = factorise(mse_kernel(first, rest, rho_p_, tau_p_), "CollisionMseCache");

  std::vector<double> values;
  values.reserve(set.size());
  for (int d : set) values.push_back(trace_minus_quadratic(covs_[static_cast<std::size_t>(d)].matrix(), llt));
  return cache_.emplace(set, std::move(values)).first->second;
}

namespace {

void check_inputs(const SimConfig& config, const GroupingPattern& pattern,
                  std::span<const CovarianceMatrix> covariances) {
  config.validate();
  if (static_cast<int>(covariances.size()) != config.devices || pattern.device_count() != config.devices)
    throw std::invalid_argument("expected MSE: device count mismatch");
  validate_pattern(pattern, config.tau_p);
}

// (1/K) sum over active devices of their MSE in this event.
double event_mse(const AccessEvent& ev, CollisionMseCache& cache, int devices) {
  double acc = 0.0;
  for (int d : ev.active) {
    const auto& set = ev.collision_set(d);
    if (set.size() == 1) {
      acc += cache.bound(d);
      continue;
    }
    if (set.front() != d) continue;  // each set is summed once, by its first member
    for (double v : cache.lookup(set)) acc += v;
  }
  return acc / devices;
}

}  // namespace

MonteCarloEstimate expected_mse_monte_carlo(const SimConfig& config, const GroupingPattern& pattern,
                                            std::span<const CovarianceMatrix> covariances) {
  check_inputs(config, pattern, covariances);
  return run_trials(
      config.trials, config.seed, config.workers,
      [&] { return CollisionMseCache(covariances, config.rho_p, config.tau_p); },
      [&](CollisionMseCache& cache, Rng& rng, bool& active) {
        const IndexSet act = sample_active_set(config.devices, config.p_a, rng);
        active = !act.empty();
        if (!active) return 0.0;
        const AccessEvent ev = assign_pilots(act, pattern, rng);
        return event_mse(ev, cache, config.devices);
      });
}

double expected_mse_enumerate(const SimConfig& config, const GroupingPattern& pattern,
                              std::span<const CovarianceMatrix> covariances) {
  check_inputs(config, pattern, covariances);
  const int k = config.devices;
  if (k > 12) throw std::invalid_argument("expected_mse_enumerate: at most 12 devices");
  double terms = 1.0;
  for (int d = 0; d < k; ++d) {
    const auto w = pattern.pilots_of(d).size();
    if (w > 4) throw std::invalid_argument("expected_mse_enumerate: at most 4 pilots per group");
    terms *= static_cast<double>(1 + w);
  }
  if (terms > static_cast<double>(kMaxEnumerationTerms))
    throw std::length_error("expected_mse_enumerate: enumeration too large");

  CollisionMseCache cache(covariances, config.rho_p, config.tau_p);
  const double p = config.p_a;
  double total = 0.0;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    IndexSet active;
    for (int d = 0; d < k; ++d)
      if (mask & (1u << d)) active.push_back(d);
    const int n = static_cast<int>(active.size());
    const double p_set = std::pow(p, n) * std::pow(1.0 - p, k - n);
    if (p_set == 0.0) continue;

    // Mixed-radix counter over every active device's pilot choice.
    std::vector<std::size_t> digit(active.size(), 0);
    double assignments = 1.0;
    for (int d : active) assignments *= static_cast<double>(pattern.pilots_of(d).size());
    double sum = 0.0;
    for (;;) {
      std::vector<int> pilots(active.size());
      for (std::size_t i = 0; i < active.size(); ++i) pilots[i] = pattern.pilots_of(active[i])[digit[i]];
      sum += event_mse(make_access_event(active, pilots, k), cache, k);

      std::size_t i = 0;
      while (i < digit.size() && ++digit[i] == pattern.pilots_of(active[i]).size()) digit[i++] = 0;
      if (i == digit.size()) break;
    }
    total += p_set * sum / assignments;
  }
  return total;
}

}  // namespace corra
