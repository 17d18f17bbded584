#include <cstdio>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "corra/harness.hpp"
#include "corra/version.hpp"

namespace corra {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    if constexpr (std::is_same_v<T, std::string>)
      out += values[i];
    else
      out += format_number(static_cast<double>(values[i]));
  }
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const Scenario& sc, const ResultTable& table) {
  const auto& c = sc.config;
  auto echo = [&out](const std::string& key, const std::string& value) {
    out << "# " << key << '=' << value << '\n';
  };
  echo("tool", std::string("corra ") + library_version());
  echo("git_describe", git_describe());
  echo("scenario", sc.name);
  echo("seed", std::to_string(c.seed));
  echo("M", std::to_string(c.antennas));
  echo("K", std::to_string(c.devices));
  if (sc.tau_p_list.empty()) {
    echo("tau_p", std::to_string(c.tau_p));
    echo("Y", std::to_string(c.groups));
  } else {
    echo("tau_p_list", join(sc.tau_p_list));
    echo("pilots_per_group", std::to_string(sc.pilots_per_group));
  }
  echo("tau_u", std::to_string(c.tau_u));
  echo("p_a", format_number(c.p_a));
  echo("rho_p", format_number(c.rho_p));
  echo("rho_u", format_number(c.rho_u));
  echo("L", std::to_string(c.hopping_length));
  echo("trials", std::to_string(c.trials));
  echo("asd_deg", format_number(sc.asd_deg));
  echo("aoa_limit_deg", format_number(sc.aoa_limit_deg));
  echo("spacing", format_number(sc.spacing));
  echo("covariance", to_string(sc.covariance_model));
  echo("quadrature_points", std::to_string(sc.quadrature_points));
  echo("metric", to_string(sc.metric));
  if (sc.metric == Metric::sum_se && sc.tau_p_list.empty())
    echo("se_prefactor", format_number(static_cast<double>(c.tau_u - c.tau_p) / c.tau_u));
  echo("sweep_var", sc.sweep.variable);
  echo("sweep_values", join(sc.sweep.values));
  echo("schemes", join(sc.schemes));
  for (const auto& [k, v] : table.notes) echo(k, v);

  out << kCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.scheme << ',' << r.sweep_var << ',' << format_number(r.sweep_value) << ',' << r.metric
        << ',' << format_number(r.value) << ',' << format_number(r.std_error) << ',' << r.trials
        << '\n';
  }
}

}  // namespace corra
