#pragma once

#include <cstdint>
#include <vector>

#include "platoon/netcalc.hpp"
#include "platoon/smto.hpp"

namespace platoon::smto {

/// A platoon in which one deficient vehicle offloads every application class
/// to the other members each step while members come and go.
struct PolicyScenario {
  std::size_t platoon_cap = 5;       ///< including the offloading source
  std::size_t initial_vehicles = 3;  ///< including the offloading source
  double source_theta = 1.0;
  ChurnConfig churn{0.2, 2.0, 10.0, 0.6, 1.0};
  double bandwidth = 10.0;
  netcalc::MacParams mac{0.02, 2, 1};
  std::size_t apps = 5;
  double o_lo = 1.0, o_hi = 5.0;
  double tau_lo = 1.0, tau_hi = 3.0;
  double lam_lo = 0.05, lam_hi = 0.2;
  double eta = 1.0;
  /// Reward of application 1 (highest priority) first.
  std::vector<double> rewards{2.5, 2.0, 1.5, 1.0, 0.5};
  double slot_theta = 2.0;
  int epochs = 50;
  SelectOptions select;

  void validate() const;
};

struct EpochRow {
  int epoch = 0;
  double acceptance_ratio = 0.0;
  double mean_reward = 0.0;
  double mean_delay = 0.0;
  std::int64_t placements = 0;
  std::int64_t rejections = 0;
};

struct ReplicationResult {
  PolicyKind policy = PolicyKind::Smto;
  std::uint64_t seed = 0;
  std::vector<EpochRow> epochs;
  double acceptance_ratio = 0.0;  ///< over all applications of the run
  double mean_reward = 0.0;       ///< per application
  double mean_delay = 0.0;        ///< per application, misses at twice the deadline
};

/// Application classes drawn for a seed; identical for every policy.
std::vector<netcalc::AppProfile> draw_apps(const PolicyScenario& sc, std::uint64_t seed);

/// Runs one replication. Membership churn and application draws come from
/// streams that depend only on the seed, so policies compared on the same
/// seed face the same platoon.
ReplicationResult run_policy_replication(const PolicyScenario& sc, PolicyKind policy,
                                         std::uint64_t seed);

}  // namespace platoon::smto
