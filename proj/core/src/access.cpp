#include "corra/access.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace corra {

namespace {

double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// C(U-1, n) C(n, c) W^-c (1 - 1/W)^(n-c) C(K-U, K_a-1-n) / C(K-1, K_a-1)
// with n = in-group active devices besides the reference one.
double pmf_term(int k, int u, int w, int ka, int n, int c) {
  const double log_c = log_binomial(u - 1, n) + log_binomial(n, c) +
                       log_binomial(k - u, ka - 1 - n) - log_binomial(k - 1, ka - 1);
  if (!std::isfinite(log_c)) return 0.0;
  const double hit = 1.0 / w;
  return std::exp(log_c) * std::pow(hit, c) * std::pow(1.0 - hit, n - c);
}

}  // namespace

PilotBook::PilotBook(int tau_p) {
  if (tau_p < 1) throw std::invalid_argument("PilotBook: tau_p must be >= 1");
  sequences_.resize(tau_p, tau_p);
  for (int i = 0; i < tau_p; ++i)
    for (int n = 0; n < tau_p; ++n)
      sequences_(n, i) = std::polar(1.0, -2.0 * kPi * static_cast<double>((static_cast<long>(i) * n) % tau_p) / tau_p);
}

PilotBook make_pilot_book(int tau_p) { return PilotBook(tau_p); }

void SimConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SimConfig: " + what); };
  if (antennas < 1) fail("antennas must be >= 1");
  if (devices < 1) fail("devices must be >= 1");
  if (tau_p < 1) fail("tau_p must be >= 1");
  if (tau_u < tau_p) fail("tau_u must be >= tau_p");
  if (groups < 1 || groups > devices) fail("groups must lie in [1, devices]");
  if (tau_p % groups != 0) fail("groups must divide tau_p");
  if (!(p_a >= 0.0 && p_a <= 1.0)) fail("p_a must lie in [0, 1]");
  if (!(rho_p > 0.0) || !(rho_u > 0.0)) fail("SNRs must be > 0");
  if (hopping_length < 1) fail("hopping_length must be >= 1");
  if (trials < 1) fail("trials must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
}

IndexSet AccessEvent::colliders(int device) const {
  IndexSet out;
  for (int d : collision_sets[device])
    if (d != device) out.push_back(d);
  return out;
}

std::vector<IndexSet> AccessEvent::distinct_collision_sets() const {
  std::vector<IndexSet> out;
  for (int d : active) {
    const auto& set = collision_sets[d];
    if (set.front() == d) out.push_back(set);
  }
  return out;
}

IndexSet sample_active_set(int devices, double p_a, Rng& rng) {
  if (!(p_a >= 0.0 && p_a <= 1.0)) throw std::invalid_argument("sample_active_set: p_a outside [0, 1]");
  IndexSet active;
  for (int d = 0; d < devices; ++d)
    if (rng.uniform() < p_a) active.push_back(d);
  return active;
}

AccessEvent make_access_event(const IndexSet& active, const std::vector<int>& pilots,
                              int devices) {
  if (active.size() != pilots.size())
    throw std::invalid_argument("make_access_event: pilots must align with active devices");
  AccessEvent ev;
  ev.active = active;
  ev.pilot_of.assign(static_cast<std::size_t>(devices), -1);
  ev.collision_sets.assign(static_cast<std::size_t>(devices), {});
  std::map<int, IndexSet> by_pilot;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const int d = active[i];
    if (d < 0 || d >= devices) throw std::invalid_argument("make_access_event: device out of range");
    ev.pilot_of[d] = pilots[i];
    by_pilot[pilots[i]].push_back(d);
  }
  for (auto& [pilot, members] : by_pilot) {
    std::sort(members.begin(), members.end());
    for (int d : members) ev.collision_sets[d] = members;
  }
  return ev;
}

AccessEvent assign_pilots(const IndexSet& active, const GroupingPattern& pattern, Rng& rng) {
  std::vector<int> pilots;
  pilots.reserve(active.size());
  for (int d : active) {
    const auto& set = pattern.pilots_of(d);
    pilots.push_back(set[static_cast<std::size_t>(rng.uniform_index(static_cast<int>(set.size())))]);
  }
  return make_access_event(active, pilots, pattern.device_count());
}

std::vector<double> collider_count_pmf(int devices, int group_devices, int group_pilots,
                                       int active_devices) {
  const int k = devices;
  const int u = group_devices;
  const int w = group_pilots;
  const int ka = active_devices;
  if (k < 1 || u < 1 || u > k || w < 1 || ka < 1 || ka > k)
    throw std::invalid_argument("collider_count_pmf: arguments out of range");

  const int kao = ka - 1 - k + u;
  std::vector<double> pmf(static_cast<std::size_t>(ka), 0.0);
  for (int c = 0; c < ka; ++c) {
    double p = 0.0;
    if (ka <= u) {
      for (int j = 0; j <= ka - 1 - c; ++j) p += pmf_term(k, u, w, ka, c + j, c);
    } else if (ka <= k - u + 1) {
      if (c <= u - 1)
        for (int j = 0; j <= u - 1 - c; ++j) p += pmf_term(k, u, w, ka, c + j, c);
    } else if (c <= kao) {
      for (int j = 0; j <= k - ka; ++j) p += pmf_term(k, u, w, ka, kao + j, c);
    } else if (c <= u - 1) {
      for (int j = 0; j <= u - 1 - c; ++j) p += pmf_term(k, u, w, ka, c + j, c);
    }
    pmf[static_cast<std::size_t>(c)] = p;
  }
  return pmf;
}

CMatrix received_pilot_signal(const AccessEvent& event, const std::vector<CVector>& channels,
                              const PilotBook& book, double rho_p, Rng& rng, int antennas) {
  if (channels.size() != event.active.size())
    throw std::invalid_argument("received_pilot_signal: one channel per active device required");
  const int tau = book.length();
  const Eigen::Index m = antennas >= 0 ? antennas : (channels.empty() ? -1 : channels.front().size());
  if (m < 1) throw std::invalid_argument("received_pilot_signal: antenna count unknown");
  CMatrix y = CMatrix::Zero(m, tau);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].size() != m) throw std::invalid_argument("received_pilot_signal: channel length mismatch");
    y.noalias() += channels[i] * book.sequences().col(event.pilot_of[event.active[i]]).transpose();
  }
  if (!std::isinf(rho_p)) {
    const double var = 1.0 / rho_p;
    for (Eigen::Index c = 0; c < y.cols(); ++c)
      for (Eigen::Index r = 0; r < y.rows(); ++r) y(r, c) += rng.complex_normal(var);
  }
  return y;
}

CVector decorrelate(const CMatrix& received, const CVector& pilot) {
  if (received.cols() != pilot.size()) throw std::invalid_argument("decorrelate: dimension mismatch");
  return received * pilot.conjugate();
}

bool pattern_capacity_check(long group_devices, long group_pilots, long hopping_length) {
  if (group_devices < 1 || group_pilots < 1 || hopping_length < 1)
    throw std::invalid_argument("pattern_capacity_check: arguments must be positive");
  if (group_pilots == 1) return group_devices == 1;
  // Repeated multiplication stops as soon as the product reaches the device
  // count, so it never overflows and avoids log rounding at exact powers.
  long capacity = 1;
  for (long l = 0; l < hopping_length && capacity < group_devices; ++l) capacity *= group_pilots;
  return capacity >= group_devices;
}

}  // namespace corra
