#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "corra/estimation.hpp"
#include "corra/grouping.hpp"
#include "corra/harness.hpp"
#include "corra/oracles.hpp"
#include "corra/rate.hpp"

namespace corra {

namespace {

ValidationCheck at_most(std::string name, double measured, double tolerance, std::string detail = {}) {
  return {std::move(name), measured <= tolerance, measured, tolerance, std::move(detail)};
}

std::vector<CovarianceMatrix> disjoint_support_population(int m, int supports, int copies) {
  // `supports` disjoint diagonal blocks, each used by `copies` devices.
  std::vector<CovarianceMatrix> covs;
  const int width = m / supports;
  for (int s = 0; s < supports; ++s) {
    for (int c = 0; c < copies; ++c) {
      CMatrix r = CMatrix::Zero(m, m);
      for (int i = 0; i < width; ++i) r(s * width + i, s * width + i) = static_cast<double>(m) / width;
      covs.emplace_back(std::move(r));
    }
  }
  return covs;
}

std::vector<CovarianceMatrix> laplacian_population(int m, int k, double asd_deg, Rng& rng) {
  std::vector<CovarianceMatrix> covs;
  for (int d = 0; d < k; ++d) {
    const double aoa = (2.0 * rng.uniform() - 1.0) * kPi / 3.0;
    covs.push_back(covariance_exact({deg_to_rad(asd_deg), aoa, 1.0}, {m, 0.5}));
  }
  return covs;
}

}  // namespace

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ValidationReport run_validate(std::uint64_t seed, int workers) {
  ValidationReport rep;
  auto& out = rep.checks;
  Rng rng(derive_seed(seed, 0x7a11));

  {
    double worst = 0.0;
    for (int k = 1; k <= 8; ++k)
      for (int u = 1; u <= k; ++u)
        for (int w = 1; w <= 3; ++w)
          for (int ka = 1; ka <= k; ++ka) {
            const auto f = collider_count_pmf(k, u, w, ka);
            const auto b = oracle::brute_force_collider_pmf(k, u, w, ka);
            for (std::size_t c = 0; c < f.size(); ++c) worst = std::max(worst, std::abs(f[c] - b[c]));
          }
    out.push_back(at_most("collider_pmf_vs_brute_force", worst, 1e-12, "K<=8, W<=3"));
  }
  {
    double worst = 0.0;
    for (int k = 1; k <= 20; ++k)
      for (int u = 1; u <= k; ++u)
        for (int w = 1; w <= 4; ++w)
          for (int ka = 1; ka <= k; ++ka) {
            const auto f = collider_count_pmf(k, u, w, ka);
            double s = 0.0;
            for (double p : f) s += p;
            worst = std::max(worst, std::abs(s - 1.0));
          }
    out.push_back(at_most("collider_pmf_normalisation", worst, 1e-9, "K<=20"));
  }
  {
    const auto chk = oracle::collider_pmf_frequencies(120, 6, 2, 40, 200000, derive_seed(seed, 1));
    out.push_back(at_most("collider_pmf_vs_monte_carlo_K120", chk.max_z, 3.0, "max z over bins"));
  }
  {
    const ArrayConfig arr{32, 0.5};
    const auto rk = covariance_exact({deg_to_rad(10.0), 0.2, 1.0}, arr);
    const auto rf = covariance_exact({deg_to_rad(10.0), 0.35, 1.0}, arr);
    const auto chk = oracle::mmse_consistency(rk, rf, db_to_linear(10.0), 4, 20000, derive_seed(seed, 2));
    out.push_back(at_most("mmse_empirical_vs_analytic_mse", chk.relative_error, 0.03, "relative"));
    out.push_back(at_most("mmse_orthogonality_principle", chk.max_cross_z, 3.0,
                          "max |E[e y^H]| / se"));
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int m = 8;
      const CovarianceMatrix rk(oracle::random_psd(m, 1 + trial % m, rng));
      const CovarianceMatrix rf(oracle::random_psd(m, 1 + (trial * 3) % m, rng));
      const double rho = db_to_linear(-10.0 + trial * 2.0);
      const double a = mse_ce(rk, {&rf}, rho, 4);
      const double b = error_covariance(rk, {&rf}, rho, 4).trace().real();
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
    out.push_back(at_most("mse_two_parameterisations_agree", worst, 1e-9, "relative"));
  }
  {
    const int m = 128;
    const CovarianceMatrix eye(CMatrix::Identity(m, m));
    const double rho = db_to_linear(20.0);
    const double got = mse_ce(eye, {}, rho, 10);
    out.push_back(at_most("white_channel_closed_form", std::abs(got - m / (1.0 + rho * 10)), 1e-9));
  }
  {
    const int m = 16;
    const CMatrix f = angular_dft_basis(m);
    RVector r1 = RVector::Zero(m), r2 = RVector::Zero(m);
    r1.head(8).setConstant(2.0);
    r2.tail(8).setConstant(2.0);
    const CovarianceMatrix a(f * r1.cast<Complex>().asDiagonal() * f.adjoint());
    const CovarianceMatrix b(f * r2.cast<Complex>().asDiagonal() * f.adjoint());
    const double rho = db_to_linear(15.0);
    const double diff = std::abs(mse_ce(a, {&b}, rho, 8) - mse_ce(a, {}, rho, 8));
    out.push_back(at_most("orthogonal_collider_is_eliminated", diff, 1e-9));
  }
  {
    const CovarianceMatrix one(CMatrix::Identity(1, 1));
    out.push_back(at_most("scalar_collision_mse", std::abs(mse_ce(one, {&one}, 1.0, 1) - 2.0 / 3.0), 1e-12));
    const CovarianceMatrix eye(CMatrix::Identity(64, 64));
    out.push_back(at_most("scalar_lower_bound", std::abs(mse_lower_bound_device(eye, 9.0, 1) - 6.4), 1e-12));
  }
  {
    const auto covs = laplacian_population(32, 12, 3.0, rng);
    double worst_z = -1e300;
    for (double snr : {0.0, 20.0}) {
      SimConfig cfg;
      cfg.antennas = 32;
      cfg.devices = 12;
      cfg.tau_p = 4;
      cfg.groups = 2;
      cfg.p_a = 0.4;
      cfg.rho_p = cfg.rho_u = db_to_linear(snr);
      cfg.trials = 5000;
      cfg.seed = derive_seed(seed, 3);
      cfg.workers = workers;
      const double bound = mse_bound_global(covs, cfg.p_a, cfg.rho_p, cfg.tau_p);
      for (const auto& pattern : {dgpsa(covs, split_pilots(4, 2)), traditional_pattern(12, 4)}) {
        const auto est = expected_mse_monte_carlo(cfg, pattern, covs);
        worst_z = std::max(worst_z, (bound - est.mean) / std::max(est.std_error, 1e-300));
      }
    }
    out.push_back(at_most("monte_carlo_above_global_bound", worst_z, 3.0, "max (bound - mc)/se"));
  }
  {
    const auto covs = disjoint_support_population(32, 4, 2);
    SimConfig cfg;
    cfg.antennas = 32;
    cfg.devices = 8;
    cfg.tau_p = 4;
    cfg.groups = 2;
    cfg.p_a = 1.0 / 3.0;
    cfg.rho_p = cfg.rho_u = db_to_linear(10.0);
    cfg.trials = 20000;
    cfg.seed = derive_seed(seed, 4);
    cfg.workers = workers;
    const auto pattern = dgpsa(covs, split_pilots(4, 2));
    const auto est = expected_mse_monte_carlo(cfg, pattern, covs);
    const double bound = mse_bound_global(covs, cfg.p_a, cfg.rho_p, cfg.tau_p);
    out.push_back(at_most("global_bound_attained_by_orthogonal_groups", std::abs(est.mean - bound) / bound, 0.01,
                          "relative"));
  }
  {
    const auto covs = laplacian_population(16, 6, 5.0, rng);
    SimConfig cfg;
    cfg.antennas = 16;
    cfg.devices = 6;
    cfg.tau_p = 4;
    cfg.groups = 2;
    cfg.p_a = 0.5;
    cfg.rho_p = cfg.rho_u = db_to_linear(15.0);
    cfg.trials = 20000;
    cfg.seed = derive_seed(seed, 5);
    cfg.workers = workers;
    const auto pattern = dgpsa(covs, split_pilots(4, 2));
    const double exact = expected_mse_enumerate(cfg, pattern, covs);
    const auto mc = expected_mse_monte_carlo(cfg, pattern, covs);
    out.push_back(at_most("enumeration_vs_monte_carlo", std::abs(mc.mean - exact) / mc.std_error, 3.0, "z"));
  }
  {
    double worst_ratio = 0.0;
    for (double asd : {1.0, 5.0}) {
      const DeviceProfile p{deg_to_rad(asd), 0.0, 1.0};
      worst_ratio = std::max(worst_ratio, oracle::dft_relative_error(p, 128) / oracle::dft_relative_error(p, 32));
    }
    out.push_back({"dft_approximation_improves_with_M", worst_ratio < 1.0, worst_ratio, 1.0,
                   "err(M=128)/err(M=32), must be < 1"});
  }
  {
    double worst = 0.0;
    for (double asd : {1.0, 10.0}) {
      const DeviceProfile p{deg_to_rad(asd), 0.4, 2.0};
      for (const auto& r : {covariance_exact(p, {32, 0.5}), covariance_dft_approx(p, {32, 0.5})})
        worst = std::max(worst, std::abs(r.trace() - 64.0) / 64.0);
    }
    out.push_back(at_most("covariance_trace_normalisation", worst, 1e-9, "relative"));
  }
  {
    const PilotBook book(8);
    const CMatrix gram = book.sequences().adjoint() * book.sequences();
    const double err = (gram - 8.0 * CMatrix::Identity(8, 8)).cwiseAbs().maxCoeff();
    out.push_back(at_most("pilot_book_orthogonality", err, 1e-12));
  }
  {
    const CovarianceMatrix a(RVector((RVector(4) << 1, 1, 0, 0).finished()).cast<Complex>().asDiagonal().toDenseMatrix());
    const CovarianceMatrix b(RVector((RVector(4) << 0, 0, 1, 1).finished()).cast<Complex>().asDiagonal().toDenseMatrix());
    const std::vector<CovarianceMatrix> covs{a, a, b, b};
    const auto g = dgpsa(covs, split_pilots(4, 2));
    const bool mixed = g.group_of[0] != g.group_of[1] && g.group_of[2] != g.group_of[3];
    out.push_back({"dgpsa_separates_similar_devices", mixed, mixed ? 0.0 : 1.0, 0.0, "{A,A,B,B}"});
  }
  {
    const bool ok = pattern_capacity_check(4, 2, 2) && !pattern_capacity_check(5, 2, 2) &&
                    pattern_capacity_check(1, 1, 7);
    out.push_back({"hopping_pattern_capacity", ok, ok ? 0.0 : 1.0, 0.0, "(W)^L >= U"});
  }
  {
    // Literal K_a/c weighting against the generative sum-SE estimator.
    const auto covs = laplacian_population(16, 4, 5.0, rng);
    SimConfig cfg;
    cfg.antennas = 16;
    cfg.devices = 4;
    cfg.tau_p = 4;
    cfg.tau_u = 16;
    cfg.groups = 2;
    cfg.p_a = 0.5;
    cfg.rho_p = cfg.rho_u = db_to_linear(10.0);
    cfg.trials = 8000;
    cfg.seed = derive_seed(seed, 6);
    cfg.workers = workers;
    const auto pattern = dgpsa(covs, split_pilots(4, 2));
    const auto gen = expected_se_monte_carlo(cfg, pattern, covs);
    const auto lit = expected_se_weighted(cfg, pattern, covs);
    const double z = std::abs(gen.mean - lit.mean) /
                     std::hypot(gen.std_error, lit.std_error);
    out.push_back(at_most("se_weighting_routes_agree", z, 3.0, "z"));
  }
  return rep;
}

void print_report(std::ostream& os, const ValidationReport& report) {
  int passed = 0;
  for (const auto& c : report.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-44s measured=%-12.4g tolerance=%-10.4g %s\n",
                  c.passed ? "PASS" : "FAIL", c.name.c_str(), c.measured, c.tolerance, c.detail.c_str());
    os << line;
    if (c.passed) ++passed;
  }
  os << passed << '/' << report.checks.size() << " checks passed\n";
}

}  // namespace corra
