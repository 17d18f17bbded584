#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "corra/access.hpp"
#include "corra/channel_model.hpp"
#include "corra/grouping.hpp"
#include "corra/stats.hpp"

namespace corra {

using CovarianceRefs = std::vector<const CovarianceMatrix*>;

struct EstimationResult {
  CVector estimate;
  CMatrix error_cov;
  double mse = 0.0;
};

// MMSE estimation for all devices sharing one pilot. Factorises
// A = tau_p sum_l R_l + I / rho_p once and reuses it for every member.
class CollisionEstimator {
 public:
  CollisionEstimator(CovarianceRefs members, double rho_p, int tau_p);

  int size() const { return static_cast<int>(members_.size()); }

  // h_hat = R_k A^{-1} y for member index `member` (position in `members`).
  CVector estimate(int member, const CVector& y) const;
  // R_k - tau_p R_k A^{-1} R_k.
  CMatrix error_covariance(int member) const;
  double mse(int member) const;
  EstimationResult estimate_full(int member, const CVector& y) const;

  // A^{-1} rhs.
  CMatrix solve(const CMatrix& rhs) const { return llt_.solve(rhs); }
  // L^{-1} rhs with A = L L^H.
  CMatrix whiten(const CMatrix& rhs) const;

 private:
  CovarianceRefs members_;
  int tau_p_;
  Eigen::LLT<CMatrix> llt_;
};

CVector mmse_estimate(const CVector& y, const CovarianceMatrix& rk, const CovarianceRefs& colliders,
                      double rho_p, int tau_p);
CMatrix error_covariance(const CovarianceMatrix& rk, const CovarianceRefs& colliders, double rho_p,
                         int tau_p);

// tr{R_k - R_k (R_k + sum_f R_f + I/(rho_p tau_p))^{-1} R_k}
double mse_ce(const CovarianceMatrix& rk, const CovarianceRefs& colliders, double rho_p, int tau_p);

// MSE with no colliders: the per-device lower bound.
double mse_lower_bound_device(const CovarianceMatrix& rk, double rho_p, int tau_p);
// Same bound from angular-domain eigenvalues: sum r - r^2 / (r + 1/(rho_p tau_p)).
double mse_lower_bound_spectral(const RVector& angular_power, double rho_p, int tau_p);

// p_a * mean_k mse_lower_bound_device(R_k).
double mse_bound_global(std::span<const CovarianceMatrix> covariances, double p_a, double rho_p,
                        int tau_p);

// Per-member MSE values for a collision set, memoised by the sorted set.
class CollisionMseCache {
 public:
  CollisionMseCache(std::span<const CovarianceMatrix> covariances, double rho_p, int tau_p);

  // MSE of every member of `set` (sorted device ids), in the same order.
  const std::vector<double>& lookup(const IndexSet& set);
  double bound(int device) const { return bounds_[static_cast<std::size_t>(device)]; }
  std::size_t size() const { return cache_.size(); }

 private:
  struct Hash {
    std::size_t operator()(const IndexSet& s) const noexcept;
  };

  std::span<const CovarianceMatrix> covs_;
  double rho_p_;
  int tau_p_;
  std::vector<double> bounds_;
  std::unordered_map<IndexSet, std::vector<double>, Hash> cache_;
};

// Network-averaged MSE-CE, E[(1/K) sum_{k active} eps_k], over the generative
// process (Bernoulli activation, uniform pilot draws inside each group).
MonteCarloEstimate expected_mse_monte_carlo(const SimConfig& config, const GroupingPattern& pattern,
                                            std::span<const CovarianceMatrix> covariances);

// The same expectation computed exactly by enumerating every activation set
// and every pilot assignment. Requires K <= 12 and at most 4 pilots per group.
double expected_mse_enumerate(const SimConfig& config, const GroupingPattern& pattern,
                              std::span<const CovarianceMatrix> covariances);

}  // namespace corra
