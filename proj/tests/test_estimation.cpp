#include <gtest/gtest.h>

#include <cmath>

#include "corra/access.hpp"
#include "corra/estimation.hpp"
#include "corra/oracles.hpp"
#include "test_support.hpp"

namespace corra {
namespace {

using test::diag_cov;

CovarianceMatrix identity(int m) { return CovarianceMatrix(CMatrix::Identity(m, m)); }

TEST(MmseEstimate, WhiteChannelNoColliders) {
  Rng rng(1);
  const CVector y = rng.complex_normal_vector(5);
  const double rho = 3.0;
  const int tau = 4;
  const CVector h = mmse_estimate(y, identity(5), {}, rho, tau);
  EXPECT_LE((h - y / (tau + 1.0 / rho)).norm(), 1e-13);
}

TEST(MmseEstimate, NoiselessRecoversChannel) {
  Rng rng(2);
  const auto r = test::random_cov(6, 6, rng);
  const CVector h = rng.complex_normal_vector(6);
  const int tau = 3;
  EXPECT_LE((mmse_estimate(tau * h, r, {}, 1e12, tau) - h).norm(), 1e-6);
}

TEST(MmseEstimate, TwoWhiteCollidersShareObservation) {
  Rng rng(3);
  const auto i4 = identity(4);
  const CVector y = rng.complex_normal_vector(4);
  const double rho = 5.0;
  const int tau = 2;
  EXPECT_LE((mmse_estimate(y, i4, {&i4}, rho, tau) - y / (2.0 * tau + 1.0 / rho)).norm(), 1e-13);
}

TEST(ErrorCovariance, NoInformationLimit) {
  Rng rng(4);
  const auto r = test::random_cov(5, 3, rng);
  EXPECT_LE(test::rel_frobenius(error_covariance(r, {}, 1e-12, 4), r.matrix()), 1e-9);
}

TEST(ErrorCovariance, WhiteChannelClosedForm) {
  const double rho = 7.0;
  const int tau = 3;
  const CMatrix e = error_covariance(identity(4), {}, rho, tau);
  EXPECT_LE((e - CMatrix::Identity(4, 4) / (1.0 + rho * tau)).norm(), 1e-14);
}

TEST(ErrorCovariance, MatchesMonteCarloScatter) {
  Rng rng(5);
  const int m = 8, tau = 4;
  const double rho = 2.0;
  const auto rk = covariance_exact({deg_to_rad(10.0), 0.2, 1.0}, {m, 0.5});
  const auto rf = covariance_exact({deg_to_rad(10.0), 0.5, 1.0}, {m, 0.5});
  const ChannelSampler sk(rk), sf(rf);
  const CollisionEstimator est({&rk, &rf}, rho, tau);
  CMatrix acc = CMatrix::Zero(m, m);
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const CVector h = sk.sample(rng);
    const CVector y = tau * (h + sf.sample(rng)) + rng.complex_normal_vector(m, tau / rho);
    const CVector e = h - est.estimate(0, y);
    acc += e * e.adjoint();
  }
  EXPECT_LE(test::rel_frobenius(acc / n, est.error_covariance(0)), 0.03);
}

TEST(MseCe, WhiteChannelClosedForm) {
  const double rho = 10.0;
  const int tau = 20;
  EXPECT_NEAR(mse_ce(identity(128), {}, rho, tau), 128.0 / (1.0 + rho * tau), 1e-9);
}

TEST(MseCe, OrthogonalColliderIsHarmless) {
  const auto rk = diag_cov({1, 2, 0, 0});
  const auto rf = diag_cov({0, 0, 3, 1});
  EXPECT_NEAR(mse_ce(rk, {&rf}, 4.0, 5), mse_ce(rk, {}, 4.0, 5), 1e-9);

  // Same in a rotated (DFT) basis with angular power on disjoint bins.
  const CMatrix f = angular_dft_basis(8);
  RVector a = RVector::Zero(8), b = RVector::Zero(8);
  a.head(4) << 1.0, 2.0, 0.5, 3.0;
  b.tail(4) << 2.0, 1.0, 1.0, 4.0;
  const CovarianceMatrix ra(f * a.cast<Complex>().asDiagonal() * f.adjoint());
  const CovarianceMatrix rb(f * b.cast<Complex>().asDiagonal() * f.adjoint());
  EXPECT_NEAR(mse_ce(ra, {&rb}, 10.0, 4), mse_ce(ra, {}, 10.0, 4), 1e-9);
}

TEST(MseCe, ScalarCollision) {
  const auto one = diag_cov({1});
  EXPECT_NEAR(mse_ce(one, {&one}, 1.0, 1), 2.0 / 3.0, 1e-15);
}

TEST(MseCe, AgreesWithErrorCovarianceTrace) {
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const auto rk = test::random_cov(10, 1 + i % 10, rng);
    const auto r1 = test::random_cov(10, 2, rng);
    const auto r2 = test::random_cov(10, 7, rng);
    const CovarianceRefs coll{&r1, &r2};
    const double rho = 0.1 + i;
    const double a = mse_ce(rk, coll, rho, 3);
    const double b = error_covariance(rk, coll, rho, 3).trace().real();
    EXPECT_NEAR(a, b, 1e-9 * std::abs(b));
    const CollisionEstimator est({&rk, &r1, &r2}, rho, 3);
    EXPECT_NEAR(est.mse(0), b, 1e-9 * std::abs(b));
  }
}

TEST(MseCe, MonotoneInInterferenceAndBoundedBelow) {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const int m = 4 + i % 8;
    const auto rk = test::random_cov(m, 1 + i % m, rng);
    const auto r1 = test::random_cov(m, 1 + (i * 7) % m, rng);
    const auto r2 = test::random_cov(m, 1, rng);
    const double rho = std::pow(10.0, (i % 5) - 1.0);
    const double e0 = mse_ce(rk, {}, rho, 2);
    const double e1 = mse_ce(rk, {&r1}, rho, 2);
    const double e2 = mse_ce(rk, {&r1, &r2}, rho, 2);
    EXPECT_GE(e1, e0 - 1e-10);
    EXPECT_GE(e2, e1 - 1e-10);
    EXPECT_GE(e0, mse_lower_bound_device(rk, rho, 2) - 1e-10);
    EXPECT_LE(e2, rk.trace() + 1e-9);
  }
}

TEST(EstimationResult, Invariants) {
  Rng rng(8);
  const auto rk = test::random_cov(6, 4, rng);
  const auto rf = test::random_cov(6, 6, rng);
  const CollisionEstimator est({&rk, &rf}, 3.0, 2);
  const auto res = est.estimate_full(0, rng.complex_normal_vector(6));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(res.error_cov, Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * res.error_cov.trace().real());
  EXPECT_NEAR(res.mse, res.error_cov.trace().real(), 1e-12);
  EXPECT_LE(res.mse, rk.trace() + 1e-9);
}

TEST(MseLowerBound, EqualsEmptyCollisionAndClosedForm) {
  Rng rng(9);
  const auto r = test::random_cov(7, 5, rng);
  EXPECT_NEAR(mse_lower_bound_device(r, 2.0, 3), mse_ce(r, {}, 2.0, 3), 1e-12);
  EXPECT_NEAR(mse_lower_bound_device(identity(64), 3.0, 3), 6.4, 1e-12);
}

TEST(MseLowerBound, SpectralFormMatchesMatrixForm) {
  for (double asd : {1.0, 4.0}) {
    const auto r = covariance_dft_approx({deg_to_rad(asd), -0.3, 1.0}, {32, 0.5});
    EXPECT_NEAR(mse_lower_bound_spectral(r.angular_power(), 10.0, 8),
                mse_lower_bound_device(r, 10.0, 8), 1e-9);
  }
}

TEST(MseBoundGlobal, Examples) {
  const std::vector<CovarianceMatrix> one{identity(16)};
  EXPECT_EQ(mse_bound_global(one, 0.0, 5.0, 2), 0.0);
  EXPECT_NEAR(mse_bound_global(one, 0.4, 5.0, 2), 0.4 * mse_lower_bound_device(one[0], 5.0, 2), 1e-15);
  const std::vector<CovarianceMatrix> many(5, identity(128));
  EXPECT_NEAR(mse_bound_global(many, 1.0 / 3.0, 399.0, 1), 128.0 / 3.0 / 400.0, 1e-12);
  EXPECT_NEAR(mse_bound_global(many, 1.0 / 3.0, 399.0, 1), 0.10667, 1e-5);
}

SimConfig small_config(int k, int tau_p, int groups, double p_a, long trials) {
  SimConfig c;
  c.antennas = 4;
  c.devices = k;
  c.tau_p = tau_p;
  c.tau_u = std::max(tau_p, 8);
  c.groups = groups;
  c.p_a = p_a;
  c.rho_p = c.rho_u = 10.0;
  c.trials = trials;
  c.seed = 42;
  return c;
}

std::vector<CovarianceMatrix> mixed_four() {
  return {diag_cov({2, 1, 1, 0}), diag_cov({0, 1, 1, 2}),
          CovarianceMatrix((CMatrix(4, 4) << 1, .5, 0, 0, .5, 1, 0, 0, 0, 0, 1, .5, 0, 0, .5, 1).finished()),
          identity(4)};
}

TEST(ExpectedMseMonteCarlo, DedicatedPilotsReachBound) {
  const auto covs = test::laplacian_covs(8, 6, 5.0, 3);
  auto cfg = small_config(6, 6, 6, 0.4, 20000);
  cfg.antennas = 8;
  const auto est = expected_mse_monte_carlo(cfg, dedicated_pattern(6, 6), covs);
  const double bound = mse_bound_global(covs, cfg.p_a, cfg.rho_p, cfg.tau_p);
  EXPECT_LE(std::abs(est.mean - bound), 3.0 * est.std_error);
  EXPECT_GE(est.mean, bound - 3.0 * est.std_error);
}

TEST(ExpectedMseMonteCarlo, CertainCollisionIsExact) {
  const auto r = diag_cov({1, 2, 0.5, 0});
  const std::vector<CovarianceMatrix> covs{r, r};
  auto cfg = small_config(2, 1, 1, 1.0, 300);
  const auto est = expected_mse_monte_carlo(cfg, traditional_pattern(2, 1), covs);
  EXPECT_DOUBLE_EQ(est.mean, mse_ce(r, {&r}, cfg.rho_p, cfg.tau_p));
  EXPECT_EQ(est.std_error, 0.0);
  EXPECT_FALSE(est.empty);
}

TEST(ExpectedMseMonteCarlo, FlagsEmptyResult) {
  const std::vector<CovarianceMatrix> covs{identity(4), identity(4)};
  const auto est = expected_mse_monte_carlo(small_config(2, 2, 1, 0.0, 100), traditional_pattern(2, 2), covs);
  EXPECT_TRUE(est.empty);
  EXPECT_EQ(est.mean, 0.0);
}

TEST(ExpectedMseMonteCarlo, NeverBelowGlobalBound) {
  const auto covs = test::laplacian_covs(8, 12, 3.0, 9);
  for (int groups : {1, 2, 3}) {
    auto cfg = small_config(12, 6, groups, 0.5, 20000);
    cfg.antennas = 8;
    const auto pattern = groups == 1 ? traditional_pattern(12, 6) : dgpsa(covs, split_pilots(6, groups));
    const auto est = expected_mse_monte_carlo(cfg, pattern, covs);
    EXPECT_GE(est.mean, mse_bound_global(covs, cfg.p_a, cfg.rho_p, cfg.tau_p) - 3.0 * est.std_error);
  }
}

TEST(ExpectedMseMonteCarlo, IndependentOfWorkerCount) {
  const auto covs = test::laplacian_covs(8, 10, 2.0, 4);
  auto cfg = small_config(10, 4, 2, 0.5, 3000);
  cfg.antennas = 8;
  const auto pattern = dgpsa(covs, split_pilots(4, 2));
  const auto a = expected_mse_monte_carlo(cfg, pattern, covs);
  cfg.workers = 3;
  const auto b = expected_mse_monte_carlo(cfg, pattern, covs);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(ExpectedMseEnumerate, SingleDevice) {
  const std::vector<CovarianceMatrix> covs{diag_cov({1, 3, 0, 2})};
  const auto cfg = small_config(1, 1, 1, 0.3, 1);
  EXPECT_NEAR(expected_mse_enumerate(cfg, traditional_pattern(1, 1), covs),
              0.3 * mse_lower_bound_device(covs[0], cfg.rho_p, cfg.tau_p), 1e-15);
}

TEST(ExpectedMseEnumerate, CertainPairCollision) {
  const auto covs = mixed_four();
  const std::vector<CovarianceMatrix> two{covs[0], covs[2]};
  const auto cfg = small_config(2, 1, 1, 1.0, 1);
  const double want = 0.5 * (mse_ce(two[0], {&two[1]}, cfg.rho_p, 1) + mse_ce(two[1], {&two[0]}, cfg.rho_p, 1));
  EXPECT_NEAR(expected_mse_enumerate(cfg, traditional_pattern(2, 1), two), want, 1e-14);
}

GroupingPattern two_by_two() { return {{{0, 1}, {2, 3}}, {{0, 1}, {2, 3}}, {0, 0, 1, 1}}; }

TEST(ExpectedMseEnumerate, FrozenMixedConfiguration) {
  const auto cfg = small_config(4, 4, 2, 0.5, 1);
  EXPECT_NEAR(expected_mse_enumerate(cfg, two_by_two(), mixed_four()), 0.215137016072087, 1e-13);
}

TEST(ExpectedMseEnumerate, AgreesWithMonteCarlo) {
  auto cfg = small_config(4, 4, 2, 0.5, 100000);
  const auto exact = expected_mse_enumerate(cfg, two_by_two(), mixed_four());
  const auto mc = expected_mse_monte_carlo(cfg, two_by_two(), mixed_four());
  EXPECT_LE(std::abs(mc.mean - exact), 3.0 * mc.std_error);
}

TEST(ExpectedMseEnumerate, Guards) {
  const std::vector<CovarianceMatrix> covs(13, identity(2));
  auto cfg = small_config(13, 13, 13, 0.5, 1);
  EXPECT_THROW(expected_mse_enumerate(cfg, dedicated_pattern(13, 13), covs), std::invalid_argument);
  const std::vector<CovarianceMatrix> five(5, identity(2));
  cfg = small_config(5, 5, 1, 0.5, 1);
  EXPECT_THROW(expected_mse_enumerate(cfg, traditional_pattern(5, 5), five), std::invalid_argument);
}

TEST(MmseConsistency, EmpiricalMatchesAnalytic) {
  const auto rk = covariance_exact({deg_to_rad(5.0), 0.1, 1.0}, {16, 0.5});
  const auto rf = covariance_exact({deg_to_rad(5.0), 0.3, 1.0}, {16, 0.5});
  const auto chk = oracle::mmse_consistency(rk, rf, 10.0, 4, 50000, 17);
  EXPECT_LE(chk.relative_error, 0.03);
  EXPECT_LE(chk.max_cross_z, 3.0);
}

TEST(CollisionMseCache, MemoisesAndMatchesDirect) {
  const auto covs = mixed_four();
  CollisionMseCache cache(covs, 10.0, 4);
  const auto& v = cache.lookup({0, 2, 3});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_NEAR(v[1], mse_ce(covs[2], {&covs[0], &covs[3]}, 10.0, 4), 1e-12);
  cache.lookup({0, 2, 3});
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_NEAR(cache.bound(1), mse_lower_bound_device(covs[1], 10.0, 4), 1e-15);
}

}  // namespace
}  // namespace corra
