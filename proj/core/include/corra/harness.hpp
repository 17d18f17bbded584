#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "corra/access.hpp"
#include "corra/channel_model.hpp"

namespace corra {

enum class Metric { mse_ce, sum_se };
enum class CovarianceModel { exact, dft_approx };

const char* to_string(Metric m);
const char* to_string(CovarianceModel m);

struct Sweep {
  std::string variable;  // asd_deg | snr_db | p_a
  std::vector<double> values;
};

struct Scenario {
  std::string name = "custom";
  SimConfig config;
  double asd_deg = 1.0;
  double aoa_limit_deg = 60.0;  // mean AoAs uniform in [-limit, limit]
  double spacing = 0.5;
  int quadrature_points = kDefaultQuadraturePoints;
  CovarianceModel covariance_model = CovarianceModel::exact;
  Metric metric = Metric::mse_ce;
  Sweep sweep;
  std::vector<std::string> schemes;  // dgpsa | traditional | dedicated | lower_bound
  // When non-empty, every scheme is evaluated at each pilot length with
  // tau_p / pilots_per_group groups; config.tau_p and config.groups are ignored.
  std::vector<int> tau_p_list;
  int pilots_per_group = 2;

  void validate() const;
};

struct ResultRow {
  std::string scheme;
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  // Informational name=value pairs recorded during the run (group sizes etc.).
  std::vector<std::pair<std::string, std::string>> notes;

  const ResultRow* find(const std::string& scheme, double sweep_value) const;
};

// Desk-scale defaults unless `paper_scale` is set.
Scenario fig2_scenario(bool paper_scale = false);
Scenario fig3_scenario(bool paper_scale = false);
Scenario fig4_scenario(bool paper_scale = false);

// Mean AoAs drawn once per scenario from the seed.
std::vector<double> draw_mean_aoas(const Scenario& scenario);

// Covariances for every device at the given angular spread (degrees).
std::vector<CovarianceMatrix> build_covariances(const Scenario& scenario,
                                                const std::vector<double>& mean_aoas,
                                                double asd_deg);

ResultTable run_scenario(const Scenario& scenario);

// Flat `key = value` text with `#` comments.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> read_key_value_file(const std::string& path);
// Applies recognised keys to the scenario; unknown keys throw.
void apply_config(Scenario& scenario, const std::map<std::string, std::string>& kv);

inline constexpr const char* kCsvHeader = "scheme,sweep_var,sweep_value,metric,value,stderr,trials";

// Config echo (comment lines) followed by the header and one row per result.
void write_csv(std::ostream& out, const Scenario& scenario, const ResultTable& table);
std::string format_number(double v);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
};

// Oracle suite: closed forms, brute-force and Monte Carlo cross-checks.
ValidationReport run_validate(std::uint64_t seed, int workers = 1);
void print_report(std::ostream& out, const ValidationReport& report);

}  // namespace corra
