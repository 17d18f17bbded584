#include "corra/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace corra {

namespace {

// Re(sum_ab Ri_ab conj(Rj_ab)) = tr(Ri Rj) for Hermitian inputs. Written out
// so that swapping the arguments gives the identical floating-point result.
double trace_product(const CMatrix& a, const CMatrix& b) {
  double acc = 0.0;
  const Eigen::Index n = a.size();
  const Complex* pa = a.data();
  const Complex* pb = b.data();
  for (Eigen::Index i = 0; i < n; ++i) acc += pa[i].real() * pb[i].real() + pa[i].imag() * pb[i].imag();
  return acc;
}

constexpr double kMinNorm = 1e-14;

}  // namespace

void validate_pattern(const GroupingPattern& pattern, int tau_p) {
  const int k = pattern.device_count();
  const int y = pattern.group_count();
  if (y < 1) throw std::invalid_argument("GroupingPattern: no groups");
  if (static_cast<int>(pattern.pilot_sets.size()) != y)
    throw std::invalid_argument("GroupingPattern: group and pilot set counts differ");

  std::vector<int> seen(static_cast<std::size_t>(k), -1);
  for (int g = 0; g < y; ++g) {
    for (int d : pattern.groups[g]) {
      if (d < 0 || d >= k) throw std::invalid_argument("GroupingPattern: device index out of range");
      if (seen[d] != -1) throw std::invalid_argument("GroupingPattern: device in two groups");
      if (pattern.group_of[d] != g) throw std::invalid_argument("GroupingPattern: group_of mismatch");
      seen[d] = g;
    }
  }
  if (std::find(seen.begin(), seen.end(), -1) != seen.end())
    throw std::invalid_argument("GroupingPattern: device not assigned to any group");

  std::vector<bool> used(static_cast<std::size_t>(tau_p), false);
  for (const auto& set : pattern.pilot_sets) {
    if (set.empty()) throw std::invalid_argument("GroupingPattern: empty pilot set");
    for (int p : set) {
      if (p < 0 || p >= tau_p) throw std::invalid_argument("GroupingPattern: pilot index out of range");
      if (used[p]) throw std::invalid_argument("GroupingPattern: pilot sets overlap");
      used[p] = true;
    }
    if (y > 1 && y < tau_p && set.size() < 2)
      throw std::invalid_argument("GroupingPattern: grouped pilot sets need at least two pilots");
  }
}

std::vector<IndexSet> split_pilots(int tau_p, int groups) {
  if (groups < 1 || tau_p < 1 || tau_p % groups != 0)
    throw std::invalid_argument("split_pilots: group count " + std::to_string(groups) +
                                " must divide pilot length " + std::to_string(tau_p));
  const int per = tau_p / groups;
  std::vector<IndexSet> sets(static_cast<std::size_t>(groups));
  for (int g = 0; g < groups; ++g)
    for (int i = 0; i < per; ++i) sets[g].push_back(g * per + i);
  return sets;
}

double matrix_cosine(const CovarianceMatrix& ri, const CovarianceMatrix& rj) {
  if (ri.dim() != rj.dim()) throw std::invalid_argument("matrix_angle: dimension mismatch");
  const double ni = std::sqrt(trace_product(ri.matrix(), ri.matrix()));
  const double nj = std::sqrt(trace_product(rj.matrix(), rj.matrix()));
  if (ni < kMinNorm || nj < kMinNorm) throw std::domain_error("matrix_angle: zero matrix");
  if (ri.matrix() == rj.matrix()) return 1.0;
  const double c = trace_product(ri.matrix(), rj.matrix()) / (ni * nj);
  return std::clamp(c, 0.0, 1.0);
}

double matrix_angle(const CovarianceMatrix& ri, const CovarianceMatrix& rj) {
  return std::acos(matrix_cosine(ri, rj));
}

Eigen::MatrixXd cosine_matrix(std::span<const CovarianceMatrix> covariances) {
  const auto k = static_cast<Eigen::Index>(covariances.size());
  Eigen::MatrixXd c(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& ri = covariances[static_cast<std::size_t>(i)];
    c(i, i) = matrix_cosine(ri, ri);
    for (Eigen::Index j = i + 1; j < k; ++j) {
      c(i, j) = matrix_cosine(ri, covariances[static_cast<std::size_t>(j)]);
      c(j, i) = c(i, j);
    }
  }
  return c;
}

GroupingPattern dgpsa(std::span<const CovarianceMatrix> covariances,
                      std::vector<IndexSet> pilot_sets) {
  return dgpsa_from_cosines(cosine_matrix(covariances), std::move(pilot_sets));
}

GroupingPattern dgpsa_from_cosines(const Eigen::MatrixXd& cosines,
                                   std::vector<IndexSet> pilot_sets) {
  const int k = static_cast<int>(cosines.rows());
  const int y = static_cast<int>(pilot_sets.size());
  if (y < 1) throw std::invalid_argument("dgpsa: need at least one pilot set");
  if (k < y) throw std::invalid_argument("dgpsa: fewer devices than groups");

  GroupingPattern out;
  out.groups.resize(static_cast<std::size_t>(y));
  out.pilot_sets = std::move(pilot_sets);
  out.group_of.assign(static_cast<std::size_t>(k), -1);

  // similarity[i] = sum of cos(R_i, R_j) over all grouped j
  std::vector<double> similarity(static_cast<std::size_t>(k), 0.0);
  auto place = [&](int device, int group) {
    out.groups[group].push_back(device);
    out.group_of[device] = group;
    for (int i = 0; i < k; ++i) similarity[i] += cosines(i, device);
  };

  place(0, 0);
  for (int t = 1; t < y; ++t) {
    int best = -1;
    for (int i = 0; i < k; ++i) {
      if (out.group_of[i] != -1) continue;
      if (best == -1 || similarity[i] > similarity[best]) best = i;
    }
    place(best, t);
  }

  for (int d = 0; d < k; ++d) {
    if (out.group_of[d] != -1) continue;
    int best = 0;
    double best_cost = 0.0;
    for (int g = 0; g < y; ++g) {
      double cost = 0.0;
      for (int s : out.groups[g]) cost += cosines(d, s);
      if (g == 0 || cost < best_cost) {
        best = g;
        best_cost = cost;
      }
    }
    out.groups[best].push_back(d);
    out.group_of[d] = best;
  }

  for (auto& g : out.groups) std::sort(g.begin(), g.end());
  return out;
}

GroupingPattern traditional_pattern(int devices, int tau_p) {
  if (devices < 1 || tau_p < 1) throw std::invalid_argument("traditional_pattern: bad sizes");
  GroupingPattern out;
  out.groups.emplace_back();
  out.pilot_sets.emplace_back();
  for (int d = 0; d < devices; ++d) out.groups[0].push_back(d);
  for (int p = 0; p < tau_p; ++p) out.pilot_sets[0].push_back(p);
  out.group_of.assign(static_cast<std::size_t>(devices), 0);
  return out;
}

GroupingPattern dedicated_pattern(int devices, int tau_p) {
  if (devices < 1) throw std::invalid_argument("dedicated_pattern: need at least one device");
  if (tau_p != devices)
    throw std::invalid_argument("dedicated_pattern: pilot length must equal device count");
  GroupingPattern out;
  for (int d = 0; d < devices; ++d) {
    out.groups.push_back({d});
    out.pilot_sets.push_back({d});
    out.group_of.push_back(d);
  }
  return out;
}

}  // namespace corra
