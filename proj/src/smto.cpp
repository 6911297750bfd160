#include "platoon/smto.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "platoon/errors.hpp"

namespace platoon::smto {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Smto: return "smto";
    case PolicyKind::Ucb: return "ucb";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::FmlD: return "fml_d";
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "smto") return PolicyKind::Smto;
  if (lower == "ucb") return PolicyKind::Ucb;
  if (lower == "greedy") return PolicyKind::Greedy;
  if (lower == "fml_d" || lower == "fml-d" || lower == "fmld") return PolicyKind::FmlD;
  throw DomainError("unknown policy '" + std::string(name) + "'");
}

// --- membership -------------------------------------------------------------

PlatoonMembership::PlatoonMembership(std::size_t cap) : cap_(cap) {
  if (cap == 0) throw DomainError("platoon cap must be >= 1");
}

const PlatoonVehicle* PlatoonMembership::find(VehicleId id) const {
  for (const auto& m : members_) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

void PlatoonMembership::join(PlatoonVehicle v) {
  if (members_.size() >= cap_) throw DomainError("platoon is full");
  if (contains(v.id)) throw DomainError("vehicle " + std::to_string(v.id) + " is already a member");
  v.joined_step = step_;
  next_id_ = std::max(next_id_, v.id + 1);
  log_.push_back({step_, v.id, true, 0.0});
  members_.push_back(v);
}

void PlatoonMembership::depart(VehicleId id) {
  auto it = std::find_if(members_.begin(), members_.end(),
                         [&](const PlatoonVehicle& m) { return m.id == id; });
  if (it == members_.end()) return;
  const double sojourn = it->depart_time - static_cast<double>(it->joined_step);
  log_.push_back({step_, id, false, std::isfinite(sojourn) ? sojourn : 0.0});
  members_.erase(it);
}

std::int64_t PlatoonMembership::connected(VehicleId i, VehicleId j) const {
  const auto* a = find(i);
  const auto* b = find(j);
  if (a == nullptr || b == nullptr) return 0;
  return step_ - std::max(a->joined_step, b->joined_step);
}

PlatoonVehicle spawn_vehicle(PlatoonMembership& membership, const ChurnConfig& cfg, Rng& rng) {
  PlatoonVehicle v;
  v.id = membership.next_id();
  v.theta = rng.uniform(cfg.theta_lo, cfg.theta_hi);
  v.efficiency = rng.uniform(cfg.efficiency_lo, cfg.efficiency_hi);
  v.joined_step = membership.step();
  v.depart_time = static_cast<double>(membership.step()) + rng.exponential(cfg.rate);
  return v;
}

void churn_step(PlatoonMembership& membership, const ChurnConfig& cfg, Rng& rng) {
  if (!(cfg.rate >= 0.0)) throw DomainError("churn rate must be >= 0");
  membership.advance();
  const double now = static_cast<double>(membership.step());
  std::vector<VehicleId> leaving;
  for (const auto& m : membership.members()) {
    if (m.depart_time <= now) leaving.push_back(m.id);
  }
  for (VehicleId id : leaving) membership.depart(id);

  const double refill = -std::expm1(-cfg.rate);
  const std::size_t vacancies = membership.cap() - membership.size();
  for (std::size_t v = 0; v < vacancies; ++v) {
    if (rng.bernoulli(refill)) membership.join(spawn_vehicle(membership, cfg, rng));
  }
}

// --- tree -------------------------------------------------------------------

OffloadTree::OffloadTree() { nodes_.push_back(TreeNode{}); }

std::optional<NodeIndex> OffloadTree::find_child(NodeIndex parent, int app,
                                                 VehicleId target) const {
  for (NodeIndex c : nodes_.at(parent).children) {
    if (nodes_[c].target == target && nodes_[c].app == app) return c;
  }
  return std::nullopt;
}

NodeIndex OffloadTree::child(NodeIndex parent, int app, VehicleId target) {
  if (auto c = find_child(parent, app, target)) return *c;
  TreeNode n;
  n.parent = parent;
  n.app = app;
  n.target = target;
  n.depth = nodes_.at(parent).depth + 1;
  nodes_.push_back(n);
  const NodeIndex idx = nodes_.size() - 1;
  nodes_[parent].children.push_back(idx);
  return idx;
}

void OffloadTree::backpropagate(NodeIndex leaf, double reward) {
  std::optional<NodeIndex> cur = leaf;
  while (cur) {
    TreeNode& n = nodes_.at(*cur);
    ++n.visits;
    n.q += (reward - n.q) / static_cast<double>(n.visits);
    cur = n.parent;
  }
}

int OffloadTree::max_depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

std::int64_t BanditStats::selection_count(VehicleId j) const {
  auto it = selections.find(j);
  return it == selections.end() ? 0 : it->second;
}

// --- selection ----------------------------------------------------------------

double exploration_bonus(PolicyKind policy, const ArmView& arm, const netcalc::AppProfile& app,
                         SelectOptions opts) {
  const double slack = opts.inverted_width ? arm.bound - app.tau : app.tau - arm.bound;
  const double feasible = std::isfinite(slack) ? std::max(slack, 0.0) : 0.0;
  const double log_n = std::log(static_cast<double>(std::max<std::int64_t>(arm.connected, 1)));
  switch (policy) {
    case PolicyKind::Smto:
      if (arm.selections == 0) return 0.0;
      return std::sqrt(app.weight * feasible * log_n / static_cast<double>(arm.selections));
    case PolicyKind::Ucb:
      if (arm.selections == 0) return std::numeric_limits<double>::infinity();
      return std::sqrt(log_n / static_cast<double>(arm.selections));
    case PolicyKind::Greedy:
      return 0.0;
    case PolicyKind::FmlD:
      return std::sqrt(feasible);
  }
  return 0.0;
}

VehicleId select_target(std::span<const ArmView> arms, const netcalc::AppProfile& app,
                        PolicyKind policy, SelectOptions opts) {
  if (arms.empty()) throw NoArmsAwake("no awake candidate for application " + std::to_string(app.id));

  auto lowest_id_where = [&](auto pred) -> std::optional<VehicleId> {
    std::optional<VehicleId> best;
    for (const auto& a : arms) {
      if (pred(a) && (!best || a.id < *best)) best = a.id;
    }
    return best;
  };

  if (policy == PolicyKind::Smto) {
    if (auto fresh = lowest_id_where([](const ArmView& a) { return a.newly_arrived; })) return *fresh;
    if (auto cold = lowest_id_where([](const ArmView& a) { return a.selections == 0; })) return *cold;
  }

  const ArmView* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& a : arms) {
    const double score = a.q + exploration_bonus(policy, a, app, opts);
    if (best == nullptr || score > best_score || (score == best_score && a.id < best->id)) {
      best = &a;
      best_score = score;
    }
  }
  return best->id;
}

OffloadRecord complete_offload(OffloadTree& tree, BanditStats& stats, NodeIndex node,
                               const netcalc::AppProfile& app, const OffloadOutcome& outcome) {
  OffloadRecord rec;
  if (!outcome.accepted) return rec;
  if (node >= tree.size() || node == OffloadTree::root()) {
    throw DomainError("unknown offload tree node " + std::to_string(node));
  }
  rec.accepted = true;
  rec.in_deadline = !outcome.target_departed && outcome.measured_delay <= app.tau;
  rec.delay = rec.in_deadline ? outcome.measured_delay : 2.0 * app.tau;
  rec.reward = rec.in_deadline ? app.reward : 0.0;
  ++stats.selections[tree.node(node).target];
  ++stats.pulls;
  stats.reward_sum += rec.reward;
  tree.backpropagate(node, rec.reward);
  return rec;
}

// --- epoch ----------------------------------------------------------------------

double EpochReport::acceptance_ratio() const {
  return total == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(total);
}

double EpochReport::mean_reward() const {
  return total == 0 ? 0.0 : reward_sum / static_cast<double>(total);
}

double EpochReport::mean_delay() const {
  return total == 0 ? 0.0 : delay_sum / static_cast<double>(total);
}

double placement_bound(const netcalc::AppProfile& app, const PlatoonVehicle& target,
                       double queued_work, std::span<const netcalc::AppProfile> apps,
                       std::size_t app_index, std::size_t transmitters, double bandwidth,
                       const netcalc::MacParams& mac) {
  // Queued work stretches the computing addend to (queued + o eta) / theta;
  // expressed as an equivalent capacity so the bound itself stays untouched.
  const double work = app.o * app.eta;
  netcalc::NodeResources node{target.theta, target.theta};
  if (work > 0.0 && queued_work > 0.0) node.theta = target.theta * work / (queued_work + work);
  const auto ct = netcalc::cross_traffic(std::max<std::size_t>(transmitters, 1), apps, app_index);
  try {
    return netcalc::delay_bound(app, node, bandwidth, mac, ct).total();
  } catch (const SaturatedLink&) {
    return std::numeric_limits<double>::infinity();
  } catch (const ZeroCompute&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace {

struct TargetLoad {
  std::int64_t admitted = 0;
  double work = 0.0;
};

std::int64_t slots_of(const PlatoonVehicle& v, double slot_theta) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(v.theta / slot_theta)));
}

}  // namespace

EpochReport schedule_epoch(const EpochInputs& in, std::map<VehicleId, SourceState>& sources,
                           const PlatoonMembership& membership, PolicyKind policy,
                           std::uint64_t rng_seed) {
  in.mac.validate();
  if (!(in.slot_theta > 0.0)) throw DomainError("slot_theta must be > 0");
  EpochReport report;
  if (in.j0.empty()) return report;

  std::vector<std::size_t> order(in.apps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return in.apps[a].priority < in.apps[b].priority;
  });

  Rng rng(rng_seed);
  const double lambda = netcalc::backoff_window_sum(in.mac);
  const double now = static_cast<double>(membership.step());
  std::map<VehicleId, TargetLoad> load;
  double link_backlog = 0.0;

  for (VehicleId source : in.j0) {
    SourceState& st = sources[source];
    NodeIndex cursor = OffloadTree::root();
    bool dropped_any = false;

    for (std::size_t k : order) {
      const auto& app = in.apps[k];
      ++report.total;
      std::set<VehicleId> excluded;
      bool placed = false;

      for (int attempt = 0; attempt < 2 && !placed; ++attempt) {
        std::vector<ArmView> arms;
        for (VehicleId j : in.j1) {
          if (j == source || excluded.count(j)) continue;
          const PlatoonVehicle* v = membership.find(j);
          if (v == nullptr) continue;  // asleep
          ArmView a;
          a.id = j;
          if (auto c = st.tree.find_child(cursor, app.id, j)) a.q = st.tree.node(*c).q;
          a.bound = placement_bound(app, *v, load[j].work, in.apps, k, in.j0.size(),
                                    in.bandwidth, in.mac);
          a.connected = membership.connected(source, j);
          a.selections = st.stats.selection_count(j);
          a.newly_arrived = st.stats.seen.count(j) == 0;
          arms.push_back(a);
        }
        if (arms.empty()) break;

        const VehicleId target = select_target(arms, app, policy, in.select);
        ++report.selections;
        for (const auto& a : arms) st.stats.seen.insert(a.id);

        const PlatoonVehicle& tv = *membership.find(target);
        TargetLoad& tl = load[target];
        if (tl.admitted >= slots_of(tv, in.slot_theta)) {
          ++report.rejections;
          excluded.insert(target);
          continue;
        }

        const double work = app.o * app.eta;
        const double transmission = lambda * rng.uniform() + (link_backlog + app.o) / in.bandwidth;
        const double processing = (tl.work + work) / (tv.theta * tv.efficiency);
        OffloadOutcome outcome;
        outcome.accepted = true;
        outcome.measured_delay = transmission + processing;
        outcome.target_departed = tv.depart_time < now + outcome.measured_delay;

        const NodeIndex node = st.tree.child(cursor, app.id, target);
        const OffloadRecord rec = complete_offload(st.tree, st.stats, node, app, outcome);
        tl.admitted += 1;
        tl.work += work;
        link_backlog += app.o;
        cursor = node;
        placed = true;

        ++report.accepted;
        ++report.placements;
        if (rec.in_deadline) ++report.in_deadline;
        report.reward_sum += rec.reward;
        report.delay_sum += rec.delay;
      }

      if (!placed) {
        ++report.dropped;
        report.delay_sum += 2.0 * app.tau;
        dropped_any = true;
      }
    }
    report.max_tree_depth = std::max(report.max_tree_depth, st.tree.max_depth());
    if (dropped_any) report.residual_j0.push_back(source);
  }
  return report;
}

}  // namespace platoon::smto
