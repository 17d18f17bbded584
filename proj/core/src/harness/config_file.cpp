#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>

#include "corra/harness.hpp"

namespace corra {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : s + ',') {
    if (ch == ',' || ch == ';') {
      if (const auto t = trim(item); !t.empty()) out.push_back(t);
      item.clear();
    } else {
      item += ch;
    }
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw std::invalid_argument("config: '" + key + "' expects an unsigned integer, got '" + v + "'");
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return kv;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

void apply_config(Scenario& sc, const std::map<std::string, std::string>& kv) {
  auto& c = sc.config;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"name", [&](auto&, auto& v) { sc.name = v; }},
      {"M", [&](auto& k, auto& v) { c.antennas = static_cast<int>(to_long(k, v)); }},
      {"K", [&](auto& k, auto& v) { c.devices = static_cast<int>(to_long(k, v)); }},
      {"tau_p", [&](auto& k, auto& v) { c.tau_p = static_cast<int>(to_long(k, v)); }},
      {"tau_u", [&](auto& k, auto& v) { c.tau_u = static_cast<int>(to_long(k, v)); }},
      {"Y", [&](auto& k, auto& v) { c.groups = static_cast<int>(to_long(k, v)); }},
      {"p_a", [&](auto& k, auto& v) { c.p_a = to_double(k, v); }},
      {"rho_p", [&](auto& k, auto& v) { c.rho_p = to_double(k, v); }},
      {"rho_u", [&](auto& k, auto& v) { c.rho_u = to_double(k, v); }},
      {"rho_p_db", [&](auto& k, auto& v) { c.rho_p = db_to_linear(to_double(k, v)); }},
      {"rho_u_db", [&](auto& k, auto& v) { c.rho_u = db_to_linear(to_double(k, v)); }},
      {"snr_db", [&](auto& k, auto& v) { c.rho_p = c.rho_u = db_to_linear(to_double(k, v)); }},
      {"L", [&](auto& k, auto& v) { c.hopping_length = static_cast<int>(to_long(k, v)); }},
      {"trials", [&](auto& k, auto& v) { c.trials = to_long(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = to_u64(k, v); }},
      {"asd_deg", [&](auto& k, auto& v) { sc.asd_deg = to_double(k, v); }},
      {"aoa_limit_deg", [&](auto& k, auto& v) { sc.aoa_limit_deg = to_double(k, v); }},
      {"spacing", [&](auto& k, auto& v) { sc.spacing = to_double(k, v); }},
      {"quadrature_points", [&](auto& k, auto& v) { sc.quadrature_points = static_cast<int>(to_long(k, v)); }},
      {"pilots_per_group", [&](auto& k, auto& v) { sc.pilots_per_group = static_cast<int>(to_long(k, v)); }},
      {"covariance",
       [&](auto& k, auto& v) {
         if (v == "exact") sc.covariance_model = CovarianceModel::exact;
         else if (v == "dft_approx") sc.covariance_model = CovarianceModel::dft_approx;
         else throw std::invalid_argument("config: '" + k + "' must be exact or dft_approx");
       }},
      {"metric",
       [&](auto& k, auto& v) {
         if (v == "mse_ce") sc.metric = Metric::mse_ce;
         else if (v == "sum_se") sc.metric = Metric::sum_se;
         else throw std::invalid_argument("config: '" + k + "' must be mse_ce or sum_se");
       }},
      {"sweep_var", [&](auto&, auto& v) { sc.sweep.variable = v; }},
      {"sweep_values",
       [&](auto& k, auto& v) {
         sc.sweep.values.clear();
         for (const auto& item : split_list(v)) sc.sweep.values.push_back(to_double(k, item));
       }},
      {"schemes", [&](auto&, auto& v) { sc.schemes = split_list(v); }},
      {"tau_p_list",
       [&](auto& k, auto& v) {
         sc.tau_p_list.clear();
         for (const auto& item : split_list(v)) sc.tau_p_list.push_back(static_cast<int>(to_long(k, item)));
       }},
  };

  for (const auto& [key, value] : kv)
    if (!setters.contains(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  // The shared SNR goes first so rho_p/rho_u keys can override it.
  if (const auto it = kv.find("snr_db"); it != kv.end()) setters.at("snr_db")(it->first, it->second);
  for (const auto& [key, value] : kv)
    if (key != "snr_db") setters.at(key)(key, value);
}

}  // namespace corra
