#pragma once

#include <cstdint>
#include <vector>

#include "corra/grouping.hpp"
#include "corra/rng.hpp"
#include "corra/types.hpp"

namespace corra {

// Orthogonal pilot sequences with unit-modulus entries, phi_i^H phi_j = tau_p delta_ij.
class PilotBook {
 public:
  explicit PilotBook(int tau_p);

  int length() const { return static_cast<int>(sequences_.rows()); }
  // Column i is pilot i.
  const CMatrix& sequences() const { return sequences_; }
  CVector sequence(int i) const { return sequences_.col(i); }

 private:
  CMatrix sequences_;
};

PilotBook make_pilot_book(int tau_p);

// Scenario knobs shared by the Monte Carlo estimators. SNRs are linear.
struct SimConfig {
  int antennas = 64;      // M
  int devices = 40;       // K
  int tau_p = 20;         // pilot length
  int tau_u = 128;        // slot length in symbols
  int groups = 10;        // Y
  double p_a = 1.0 / 3.0;
  double rho_p = 100.0;
  double rho_u = 100.0;
  int hopping_length = 8;  // L
  long trials = 20000;
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const;
};

// One realised random-access slot. Indices are 0-based device/pilot ids.
struct AccessEvent {
  IndexSet active;
  std::vector<int> pilot_of;             // per device, -1 when inactive
  std::vector<IndexSet> collision_sets;  // per device; empty when inactive

  // Devices sharing `device`'s pilot, `device` included.
  const IndexSet& collision_set(int device) const { return collision_sets[device]; }
  // Colliders of `device`, itself excluded.
  IndexSet colliders(int device) const;
  // One entry per used pilot, each sorted, ordered by smallest member.
  std::vector<IndexSet> distinct_collision_sets() const;
};

// Each of `devices` devices joins independently with probability p_a.
IndexSet sample_active_set(int devices, double p_a, Rng& rng);

// Every active device draws a pilot uniformly from its group's set.
AccessEvent assign_pilots(const IndexSet& active, const GroupingPattern& pattern, Rng& rng);

// Builds the event (collision sets included) from explicit pilot choices.
AccessEvent make_access_event(const IndexSet& active, const std::vector<int>& pilots,
                              int devices);

// P(c colliders | K_a active) for a device in a group with `group_devices`
// devices and `group_pilots` pilots, c = 0..K_a-1.
std::vector<double> collider_count_pmf(int devices, int group_devices, int group_pilots,
                                       int active_devices);

// Y = sum_l h_l phi_{pi_l}^T + N, N_ij ~ CN(0, 1/rho_p). `channels` is aligned
// with event.active. An infinite rho_p adds no noise. `antennas` may be left
// at -1 when at least one channel is given.
CMatrix received_pilot_signal(const AccessEvent& event, const std::vector<CVector>& channels,
                              const PilotBook& book, double rho_p, Rng& rng, int antennas = -1);

// y = Y conj(phi).
CVector decorrelate(const CMatrix& received, const CVector& pilot);

// True iff group_pilots^hopping_length >= group_devices, i.e. every device in
// the group can own a distinct hopping pattern.
bool pattern_capacity_check(long group_devices, long group_pilots, long hopping_length);

}  // namespace corra
