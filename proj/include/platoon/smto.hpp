#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "platoon/netcalc.hpp"
#include "platoon/rng.hpp"

namespace platoon::smto {

using VehicleId = std::int64_t;

enum class PolicyKind { Smto, Ucb, Greedy, FmlD };

std::string_view to_string(PolicyKind kind);
/// Accepts "smto", "ucb", "greedy", "fml_d" (case-insensitive).
PolicyKind parse_policy(std::string_view name);
inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Smto, PolicyKind::Ucb,
                                              PolicyKind::Greedy, PolicyKind::FmlD};

// ---------------------------------------------------------------------------
// Platoon membership (the sleeping arms)

struct PlatoonVehicle {
  VehicleId id = 0;
  double theta = 1.0;       ///< declared computing capacity
  double efficiency = 1.0;  ///< fraction of theta actually delivered; hidden from policies
  std::int64_t joined_step = 0;
  double depart_time = 0.0; ///< absolute time the vehicle leaves radio range
};

struct MembershipEvent {
  std::int64_t step = 0;
  VehicleId id = 0;
  bool arrival = true;
  double sojourn = 0.0;  ///< time spent in the platoon, departures only
};

/// Vehicles currently within V2V range of each other, capped in size.
///
/// The connected duration n_(ij) is the number of steps both i and j have been
/// members; a departed vehicle never returns under the same id, so its
/// durations are gone with it.
class PlatoonMembership {
 public:
  explicit PlatoonMembership(std::size_t cap);

  std::size_t cap() const { return cap_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::span<const PlatoonVehicle> members() const { return members_; }
  const PlatoonVehicle* find(VehicleId id) const;
  bool contains(VehicleId id) const { return find(id) != nullptr; }
  std::int64_t step() const { return step_; }

  /// Adds a vehicle at the current step. Throws DomainError when full or when
  /// the id is already present.
  void join(PlatoonVehicle v);
  void depart(VehicleId id);
  void advance() { ++step_; }
  VehicleId next_id() { return next_id_++; }

  std::int64_t connected(VehicleId i, VehicleId j) const;
  const std::vector<MembershipEvent>& log() const { return log_; }

 private:
  std::size_t cap_;
  std::vector<PlatoonVehicle> members_;
  std::vector<MembershipEvent> log_;
  std::int64_t step_ = 0;
  VehicleId next_id_ = 1;
};

struct ChurnConfig {
  double rate = 0.2;  ///< departure rate per member and refill rate per vacancy, 1/step
  double theta_lo = 2.0;
  double theta_hi = 10.0;
  double efficiency_lo = 1.0;
  double efficiency_hi = 1.0;
};

/// Draws a new member joining at the current step.
PlatoonVehicle spawn_vehicle(PlatoonMembership& membership, const ChurnConfig& cfg, Rng& rng);

/// Advances one step: members whose exponential sojourn has elapsed depart,
/// then each vacancy up to the cap refills with probability 1 - exp(-rate).
void churn_step(PlatoonMembership& membership, const ChurnConfig& cfg, Rng& rng);

// ---------------------------------------------------------------------------
// Offload tree

using NodeIndex = std::size_t;

struct TreeNode {
  std::optional<NodeIndex> parent;
  int app = 0;             ///< 0 at the root, otherwise the application id placed here
  VehicleId target = -1;
  double q = 0.0;          ///< running mean of rewards observed in this subtree
  std::int64_t visits = 0;
  int depth = 0;
  std::vector<NodeIndex> children;
};

/// One row per placed application in priority order, rooted at the source.
class OffloadTree {
 public:
  OffloadTree();

  static constexpr NodeIndex root() { return 0; }
  const TreeNode& node(NodeIndex i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }

  std::optional<NodeIndex> find_child(NodeIndex parent, int app, VehicleId target) const;
  NodeIndex child(NodeIndex parent, int app, VehicleId target);

  /// Folds reward into the node and every ancestor by incremental averaging.
  void backpropagate(NodeIndex leaf, double reward);
  int max_depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

struct BanditStats {
  std::map<VehicleId, std::int64_t> selections;  ///< J_(ij): accepted placements
  std::set<VehicleId> seen;                      ///< arms observed at an earlier selection
  std::int64_t pulls = 0;
  double reward_sum = 0.0;

  std::int64_t selection_count(VehicleId j) const;
};

/// Everything the selection rule may look at for one awake arm.
struct ArmView {
  VehicleId id = 0;
  double q = 0.0;
  double bound = 0.0;             ///< T_(ij)k; +inf when the link is saturated
  std::int64_t connected = 0;     ///< n_(ij)
  std::int64_t selections = 0;    ///< J_(ij)
  bool newly_arrived = false;
};

struct SelectOptions {
  /// Use [T - tau]^+ in the exploration width instead of [tau - T]^+.
  bool inverted_width = false;
};

/// Exploration term added to Q by the given policy. +inf for UCB on an arm
/// that was never selected.
double exploration_bonus(PolicyKind policy, const ArmView& arm, const netcalc::AppProfile& app,
                         SelectOptions opts = {});

/// Picks the offloading target among the awake arms. Throws NoArmsAwake when
/// arms is empty. Ties go to the lowest id.
VehicleId select_target(std::span<const ArmView> arms, const netcalc::AppProfile& app,
                        PolicyKind policy, SelectOptions opts = {});

struct OffloadOutcome {
  bool accepted = false;
  double measured_delay = 0.0;
  bool target_departed = false;
};

struct OffloadRecord {
  bool accepted = false;
  bool in_deadline = false;
  double delay = 0.0;   ///< measured delay, or twice the deadline on a miss
  double reward = 0.0;
};

/// Accounts a finished offload at node. Rejections change nothing; accepted
/// placements bump J_(ij) and fold the reward into node and its ancestors.
OffloadRecord complete_offload(OffloadTree& tree, BanditStats& stats, NodeIndex node,
                               const netcalc::AppProfile& app, const OffloadOutcome& outcome);

// ---------------------------------------------------------------------------
// Epoch scheduling

struct SourceState {
  OffloadTree tree;
  BanditStats stats;
};

struct EpochInputs {
  double bandwidth = 10.0;            ///< shared V2V bandwidth, Mb/s
  netcalc::MacParams mac;
  std::span<const netcalc::AppProfile> apps;
  std::span<const VehicleId> j0;      ///< deficient vehicles, ranked
  std::span<const VehicleId> j1;      ///< resource-rich candidates
  double slot_theta = 2.0;            ///< compute per concurrent application a target admits
  SelectOptions select;
};

struct EpochReport {
  std::int64_t total = 0;
  std::int64_t accepted = 0;
  std::int64_t placements = 0;
  std::int64_t rejections = 0;
  std::int64_t dropped = 0;
  std::int64_t selections = 0;
  std::int64_t in_deadline = 0;
  double reward_sum = 0.0;
  double delay_sum = 0.0;
  int max_tree_depth = 0;
  std::vector<VehicleId> residual_j0;  ///< deficient vehicles left with a dropped app

  /// Accepted / total; 1 when nothing arrived.
  double acceptance_ratio() const;
  double mean_reward() const;
  double mean_delay() const;
  bool needs_reallocation() const { return !residual_j0.empty(); }
};

/// Runs one scheduling epoch: every deficient vehicle, in rank order, places
/// its applications in priority order on J1 members via the policy. A target
/// admits floor(theta / slot_theta) (at least one) applications per epoch; a
/// rejected application is retried once on another target and then dropped.
EpochReport schedule_epoch(const EpochInputs& in, std::map<VehicleId, SourceState>& sources,
                           const PlatoonMembership& membership, PolicyKind policy,
                           std::uint64_t rng_seed);

/// Load-aware delay bound of placing app on target with work already queued.
double placement_bound(const netcalc::AppProfile& app, const PlatoonVehicle& target,
                       double queued_work, std::span<const netcalc::AppProfile> apps,
                       std::size_t app_index, std::size_t transmitters, double bandwidth,
                       const netcalc::MacParams& mac);

}  // namespace platoon::smto
