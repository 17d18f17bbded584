#pragma once

#include <span>
#include <vector>

#include "corra/channel_model.hpp"

namespace corra {

// Partition of the devices into groups, each owning a disjoint pilot set.
// Indices are 0-based.
struct GroupingPattern {
  std::vector<IndexSet> groups;
  std::vector<IndexSet> pilot_sets;
  std::vector<int> group_of;  // device -> group

  int group_count() const { return static_cast<int>(groups.size()); }
  int device_count() const { return static_cast<int>(group_of.size()); }
  const IndexSet& pilots_of(int device) const { return pilot_sets[group_of[device]]; }
};

// Throws std::invalid_argument if the pattern is not a partition of
// {0..K-1} with disjoint pilot sets inside {0..tau_p-1}, or if a grouped
// (1 < Y < tau_p) pattern has a pilot set with fewer than two pilots.
void validate_pattern(const GroupingPattern& pattern, int tau_p);

// `groups` contiguous pilot sets of equal size; `groups` must divide tau_p.
std::vector<IndexSet> split_pilots(int tau_p, int groups);

// tr(Ri Rj) / (|Ri|_F |Rj|_F), clamped into [0, 1].
double matrix_cosine(const CovarianceMatrix& ri, const CovarianceMatrix& rj);

// Angle between two covariance matrices, in [0, pi/2].
double matrix_angle(const CovarianceMatrix& ri, const CovarianceMatrix& rj);

// Pairwise cosine matrix used by dgpsa.
Eigen::MatrixXd cosine_matrix(std::span<const CovarianceMatrix> covariances);

// Device grouping and pilot set allocation. Seeds group t with the ungrouped
// device most similar (sum of cosines) to all devices grouped so far, then
// sends every remaining device, in ascending index order, to the group whose
// current members are least similar to it. Ties go to the lowest index.
GroupingPattern dgpsa(std::span<const CovarianceMatrix> covariances,
                      std::vector<IndexSet> pilot_sets);
GroupingPattern dgpsa_from_cosines(const Eigen::MatrixXd& cosines,
                                   std::vector<IndexSet> pilot_sets);

// Ungrouped baseline: one group holding every device and every pilot.
GroupingPattern traditional_pattern(int devices, int tau_p);

// One pilot per device. Requires tau_p == devices.
GroupingPattern dedicated_pattern(int devices, int tau_p);

}  // namespace corra
