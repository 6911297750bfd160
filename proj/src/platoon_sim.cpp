#include "platoon/platoon_sim.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "platoon/errors.hpp"
#include "platoon/rng.hpp"

namespace platoon::smto {
namespace {

constexpr std::uint64_t kAppStream = 1;
constexpr std::uint64_t kChurnStream = 2;
constexpr std::uint64_t kEpochStream = 3;

constexpr VehicleId kSource = 0;

}  // namespace

void PolicyScenario::validate() const {
  if (platoon_cap < 2) throw DomainError("platoon_cap must leave room for at least one target");
  if (initial_vehicles < 1 || initial_vehicles > platoon_cap) {
    throw DomainError("initial_vehicles must be in [1, platoon_cap]");
  }
  if (!(source_theta > 0.0)) throw DomainError("source_theta must be > 0");
  if (!(churn.rate >= 0.0)) throw DomainError("churn rate must be >= 0");
  if (!(churn.theta_lo > 0.0) || churn.theta_hi < churn.theta_lo) {
    throw DomainError("theta range must satisfy 0 < lo <= hi");
  }
  if (!(churn.efficiency_lo > 0.0) || churn.efficiency_hi < churn.efficiency_lo) {
    throw DomainError("efficiency range must satisfy 0 < lo <= hi");
  }
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be > 0");
  mac.validate();
  if (apps < 1) throw DomainError("at least one application class is required");
  if (rewards.size() != apps) throw DomainError("rewards must list one value per application");
  if (!(o_lo > 0.0) || o_hi < o_lo) throw DomainError("data volume range must satisfy 0 < lo <= hi");
  if (!(tau_lo > 0.0) || tau_hi < tau_lo) throw DomainError("deadline range must satisfy 0 < lo <= hi");
  if (!(lam_lo >= 0.0) || lam_hi < lam_lo) throw DomainError("arrival-rate range must satisfy 0 <= lo <= hi");
  if (!(eta >= 0.0)) throw DomainError("eta must be >= 0");
  if (!(slot_theta > 0.0)) throw DomainError("slot_theta must be > 0");
  if (epochs < 1) throw DomainError("epochs must be >= 1");
}

std::vector<netcalc::AppProfile> draw_apps(const PolicyScenario& sc, std::uint64_t seed) {
  Rng rng(seed, kAppStream);
  const double max_reward = *std::max_element(sc.rewards.begin(), sc.rewards.end());
  std::vector<netcalc::AppProfile> apps;
  for (std::size_t k = 0; k < sc.apps; ++k) {
    netcalc::AppProfile a;
    a.id = static_cast<int>(k) + 1;
    a.priority = a.id;
    a.o = rng.uniform(sc.o_lo, sc.o_hi);
    a.tau = rng.uniform(sc.tau_lo, sc.tau_hi);
    a.lam = rng.uniform(sc.lam_lo, sc.lam_hi);
    a.eta = sc.eta;
    a.reward = sc.rewards[k];
    a.weight = max_reward > 0.0 ? a.reward / max_reward : 0.0;
    apps.push_back(a);
  }
  return apps;
}

ReplicationResult run_policy_replication(const PolicyScenario& sc, PolicyKind policy,
                                         std::uint64_t seed) {
  sc.validate();
  const auto apps = draw_apps(sc, seed);

  Rng churn_rng(seed, kChurnStream);
  PlatoonMembership membership(sc.platoon_cap);
  PlatoonVehicle source;
  source.id = kSource;
  source.theta = sc.source_theta;
  source.depart_time = std::numeric_limits<double>::infinity();
  membership.join(source);
  while (membership.size() < sc.initial_vehicles) {
    membership.join(spawn_vehicle(membership, sc.churn, churn_rng));
  }

  std::map<VehicleId, SourceState> sources;
  const std::vector<VehicleId> j0{kSource};

  ReplicationResult out;
  out.policy = policy;
  out.seed = seed;
  std::int64_t total = 0, accepted = 0;
  double reward = 0.0, delay = 0.0;

  for (int e = 0; e < sc.epochs; ++e) {
    if (e > 0) churn_step(membership, sc.churn, churn_rng);
    std::vector<VehicleId> j1;
    for (const auto& m : membership.members()) {
      if (m.id != kSource) j1.push_back(m.id);
    }

    EpochInputs in;
    in.bandwidth = sc.bandwidth;
    in.mac = sc.mac;
    in.apps = apps;
    in.j0 = j0;
    in.j1 = j1;
    in.slot_theta = sc.slot_theta;
    in.select = sc.select;
    const auto epoch_seed = splitmix64(seed ^ splitmix64(kEpochStream + static_cast<std::uint64_t>(e)));
    const EpochReport rep = schedule_epoch(in, sources, membership, policy, epoch_seed);

    out.epochs.push_back({e, rep.acceptance_ratio(), rep.mean_reward(), rep.mean_delay(),
                          rep.placements, rep.rejections});
    total += rep.total;
    accepted += rep.accepted;
    reward += rep.reward_sum;
    delay += rep.delay_sum;
  }
  if (total > 0) {
    out.acceptance_ratio = static_cast<double>(accepted) / static_cast<double>(total);
    out.mean_reward = reward / static_cast<double>(total);
    out.mean_delay = delay / static_cast<double>(total);
  }
  return out;
}

}  // namespace platoon::smto
