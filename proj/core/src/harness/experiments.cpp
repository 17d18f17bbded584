#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "corra/estimation.hpp"
#include "corra/grouping.hpp"
#include "corra/harness.hpp"
#include "corra/rate.hpp"

namespace corra {

namespace {

constexpr std::uint64_t kAoaStream = 0xA0A0;

struct DevicePopulation {
  std::vector<CovarianceMatrix> covariances;
  Eigen::MatrixXd cosines;
};

MonteCarloEstimate evaluate(const Scenario& sc, const SimConfig& cfg, const GroupingPattern& pattern,
                            const std::vector<CovarianceMatrix>& covs) {
  return sc.metric == Metric::mse_ce ? expected_mse_monte_carlo(cfg, pattern, covs)
                                     : expected_se_monte_carlo(cfg, pattern, covs);
}

std::string group_sizes(const GroupingPattern& p) {
  std::ostringstream os;
  for (std::size_t g = 0; g < p.groups.size(); ++g) os << (g ? " " : "") << p.groups[g].size();
  return os.str();
}

}  // namespace

const ResultRow* ResultTable::find(const std::string& scheme, double sweep_value) const {
  for (const auto& r : rows)
    if (r.scheme == scheme && r.sweep_value == sweep_value) return &r;
  return nullptr;
}

std::vector<double> draw_mean_aoas(const Scenario& scenario) {
  Rng rng(derive_seed(scenario.config.seed, kAoaStream));
  const double lim = deg_to_rad(scenario.aoa_limit_deg);
  std::vector<double> aoas(static_cast<std::size_t>(scenario.config.devices));
  for (auto& a : aoas) a = -lim + 2.0 * lim * rng.uniform();
  return aoas;
}

std::vector<CovarianceMatrix> build_covariances(const Scenario& scenario,
                                                const std::vector<double>& mean_aoas,
                                                double asd_deg) {
  const ArrayConfig array{scenario.config.antennas, scenario.spacing};
  std::vector<CovarianceMatrix> covs;
  covs.reserve(mean_aoas.size());
  for (double aoa : mean_aoas) {
    const DeviceProfile profile{deg_to_rad(asd_deg), aoa, 1.0};
    covs.push_back(scenario.covariance_model == CovarianceModel::exact
                       ? covariance_exact(profile, array, scenario.quadrature_points)
                       : covariance_dft_approx(profile, array));
  }
  return covs;
}

ResultTable run_scenario(const Scenario& sc) {
  sc.validate();
  const auto aoas = draw_mean_aoas(sc);
  const int k = sc.config.devices;
  const bool per_tau = !sc.tau_p_list.empty();
  const std::vector<int> taus = per_tau ? sc.tau_p_list : std::vector<int>{sc.config.tau_p};

  std::map<double, DevicePopulation> populations;
  auto population = [&](double asd) -> const DevicePopulation& {
    auto it = populations.find(asd);
    if (it != populations.end()) return it->second;
    DevicePopulation pop;
    pop.covariances = build_covariances(sc, aoas, asd);
    pop.cosines = cosine_matrix(pop.covariances);
    return populations.emplace(asd, std::move(pop)).first->second;
  };

  ResultTable table;
  std::map<std::string, std::string> seen_notes;

  for (std::size_t i = 0; i < sc.sweep.values.size(); ++i) {
    const double x = sc.sweep.values[i];
    SimConfig base = sc.config;
    double asd = sc.asd_deg;
    if (sc.sweep.variable == "asd_deg") {
      asd = x;
    } else if (sc.sweep.variable == "snr_db") {
      base.rho_p = base.rho_u = db_to_linear(x);
    } else {
      base.p_a = x;
    }
    // Every scheme at this sweep point consumes the same trial stream.
    base.seed = derive_seed(sc.config.seed, 1 + i);
    const auto& pop = population(asd);

    auto add_row = [&](const std::string& label, const MonteCarloEstimate& est) {
      table.rows.push_back({label, sc.sweep.variable, x, to_string(sc.metric), est.mean,
                            est.std_error, est.trials});
    };

    for (const auto& scheme : sc.schemes) {
      if (scheme == "dedicated") {
        SimConfig cfg = base;
        cfg.tau_p = cfg.groups = k;
        if (sc.metric == Metric::mse_ce) cfg.tau_u = std::max(cfg.tau_u, k);
        const auto pattern = dedicated_pattern(k, k);
        add_row(per_tau ? "dedicated_tau" + std::to_string(k) : "dedicated",
                evaluate(sc, cfg, pattern, pop.covariances));
        continue;
      }
      for (int tau : taus) {
        SimConfig cfg = base;
        cfg.tau_p = tau;
        if (per_tau) cfg.groups = tau / sc.pilots_per_group;
        if (sc.metric == Metric::mse_ce) cfg.tau_u = std::max(cfg.tau_u, tau);
        const std::string label = per_tau ? scheme + "_tau" + std::to_string(tau) : scheme;

        if (scheme == "lower_bound") {
          MonteCarloEstimate est;
          est.mean = mse_bound_global(pop.covariances, cfg.p_a, cfg.rho_p, cfg.tau_p);
          est.trials = 0;
          add_row(label, est);
        } else if (scheme == "dgpsa") {
          const auto pattern = dgpsa_from_cosines(pop.cosines, split_pilots(cfg.tau_p, cfg.groups));
          std::ostringstream key;
          key << "dgpsa_group_sizes[asd_deg=" << format_number(asd) << ",tau_p=" << tau << "]";
          if (seen_notes.emplace(key.str(), "").second)
            table.notes.emplace_back(key.str(), group_sizes(pattern));
          add_row(label, evaluate(sc, cfg, pattern, pop.covariances));
        } else {
          add_row(label, evaluate(sc, cfg, traditional_pattern(k, cfg.tau_p), pop.covariances));
        }
      }
    }
  }
  return table;
}

}  // namespace corra
