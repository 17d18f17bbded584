#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "corra/harness.hpp"

namespace corra {

const char* to_string(Metric m) { return m == Metric::mse_ce ? "mse_ce" : "sum_se"; }

const char* to_string(CovarianceModel m) {
  return m == CovarianceModel::exact ? "exact" : "dft_approx";
}

void Scenario::validate() const {
  auto fail = [this](const std::string& what) {
    throw std::invalid_argument("scenario " + name + ": " + what);
  };
  if (schemes.empty()) fail("no schemes");
  for (const auto& s : schemes) {
    if (s != "dgpsa" && s != "traditional" && s != "dedicated" && s != "lower_bound")
      fail("unknown scheme '" + s + "'");
    if (s == "lower_bound" && metric != Metric::mse_ce) fail("lower_bound is only defined for mse_ce");
  }
  if (sweep.values.empty()) fail("empty sweep");
  if (sweep.variable != "asd_deg" && sweep.variable != "snr_db" && sweep.variable != "p_a")
    fail("unknown sweep variable '" + sweep.variable + "'");
  for (std::size_t i = 1; i < sweep.values.size(); ++i)
    if (!(sweep.values[i] > sweep.values[i - 1])) fail("sweep values must be strictly increasing");
  if (!(asd_deg > 0.0)) fail("asd_deg must be > 0");
  if (!(aoa_limit_deg >= 0.0 && aoa_limit_deg <= 90.0)) fail("aoa_limit_deg must lie in [0, 90]");
  if (pilots_per_group < 1) fail("pilots_per_group must be >= 1");
  for (int t : tau_p_list)
    if (t < pilots_per_group || t % pilots_per_group != 0)
      fail("tau_p_list entries must be multiples of pilots_per_group");
  ArrayConfig{config.antennas, spacing}.validate();
  if (covariance_model == CovarianceModel::dft_approx && spacing != 0.5)
    fail("dft_approx covariances need half-wavelength spacing");
  if (tau_p_list.empty()) config.validate();
}

Scenario fig2_scenario(bool paper_scale) {
  Scenario s;
  s.name = "fig2";
  s.metric = Metric::mse_ce;
  s.config.rho_p = s.config.rho_u = db_to_linear(20.0);
  s.config.p_a = 1.0 / 3.0;
  s.config.trials = 20000;
  s.schemes = {"dgpsa", "traditional"};
  s.sweep.variable = "asd_deg";
  if (paper_scale) {
    s.config.antennas = 128;
    s.config.devices = 120;
    s.config.tau_p = 40;
    s.config.groups = 20;
    s.sweep.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  } else {
    s.config.antennas = 64;
    s.config.devices = 40;
    s.config.tau_p = 20;
    s.config.groups = 10;
    s.sweep.values = {1, 2, 4, 6, 8, 10};
  }
  return s;
}

Scenario fig3_scenario(bool paper_scale) {
  Scenario s;
  s.name = "fig3";
  s.metric = Metric::mse_ce;
  s.asd_deg = 1.0;
  s.config.p_a = 1.0 / 3.0;
  s.config.trials = 20000;
  s.schemes = {"dgpsa", "traditional", "lower_bound", "dedicated"};
  s.sweep.variable = "snr_db";
  s.sweep.values = {-10, 0, 10, 20, 30};
  s.pilots_per_group = 2;
  if (paper_scale) {
    s.config.antennas = 128;
    s.config.devices = 120;
    s.tau_p_list = {30, 40, 60};
  } else {
    s.config.antennas = 64;
    s.config.devices = 40;
    s.tau_p_list = {10, 20};
  }
  s.config.tau_p = s.tau_p_list.front();
  s.config.groups = s.tau_p_list.front() / s.pilots_per_group;
  s.config.tau_u = std::max(128, s.config.devices);
  return s;
}

Scenario fig4_scenario(bool paper_scale) {
  Scenario s;
  s.name = "fig4";
  s.metric = Metric::sum_se;
  s.asd_deg = 2.0;
  s.config.p_a = 0.5;
  s.config.trials = 20000;
  s.schemes = {"dgpsa", "traditional"};
  s.sweep.variable = "snr_db";
  s.sweep.values = {-10, 0, 10, 20, 30};
  if (paper_scale) {
    s.config.antennas = 128;
    s.config.devices = 120;
    s.config.tau_p = 30;
    s.config.groups = 15;
    s.config.tau_u = 128;
  } else {
    // Same pilots-per-device and slot-to-pilot ratios as the paper-scale run.
    s.config.antennas = 64;
    s.config.devices = 40;
    s.config.tau_p = 10;
    s.config.groups = 5;
    s.config.tau_u = 43;
  }
  return s;
}

}  // namespace corra
