#include "platoon/resource.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "platoon/csv.hpp"
#include "platoon/errors.hpp"

namespace platoon {

void SegmentState::validate() const {
  const std::string where = "segment " + std::to_string(id) + ": ";
  if (!(rho > 0.0)) throw DomainError(where + "density must be > 0");
  if (!(bandwidth >= 0.0)) throw DomainError(where + "bandwidth must be >= 0");
  if (lanes < 1) throw DomainError(where + "lane count must be >= 1");
  if (!(radio_range > 0.0)) throw DomainError(where + "radio range must be > 0");
  for (const auto& v : vehicles) {
    if (!(v.theta >= 0.0) || !(v.theta <= v.theta_upper)) {
      throw DomainError(where + "vehicle compute must satisfy 0 <= theta <= theta_upper");
    }
  }
}

}  // namespace platoon

namespace platoon::resource {
namespace {

std::vector<double> required_per_vehicle(const SegmentState& segment, double tau0,
                                         const netcalc::MacParams& mac,
                                         std::span<const netcalc::AppProfile> profiles,
                                         std::size_t k) {
  if (segment.vehicles.empty()) {
    throw DomainError("segment " + std::to_string(segment.id) + " has no vehicles");
  }
  const auto ct = netcalc::cross_traffic(segment.vehicles.size(), profiles, k);
  std::vector<double> req;
  req.reserve(segment.vehicles.size());
  for (const auto& node : segment.vehicles) {
    req.push_back(netcalc::required_bandwidth(profiles[k], node, tau0, mac, ct));
  }
  return req;
}

}  // namespace

double ReallocationPlan::conservation_residual() const {
  double sum = 0.0;
  for (const auto& d : deltas) sum += d.delta;
  return sum;
}

std::vector<double> segment_bounds(const SegmentState& segment, const netcalc::MacParams& mac,
                                   std::span<const netcalc::AppProfile> profiles, std::size_t k) {
  std::vector<double> out;
  if (segment.vehicles.empty()) return out;
  const auto ct = netcalc::cross_traffic(segment.vehicles.size(), profiles, k);
  out.reserve(segment.vehicles.size());
  for (const auto& node : segment.vehicles) {
    out.push_back(netcalc::delay_bound(profiles[k], node, segment.bandwidth, mac, ct).total());
  }
  return out;
}

VehicleGrouping classify_vehicles(std::span<const double> bounds, double tau0) {
  VehicleGrouping g;
  g.slack.reserve(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const double slack = bounds[i] - tau0;
    g.slack.push_back(slack);
    (slack > 0.0 ? g.j0 : g.j1).push_back(i);
  }
  std::stable_sort(g.j0.begin(), g.j0.end(), [&](std::size_t a, std::size_t b) {
    return g.slack[a] > g.slack[b];
  });
  return g;
}

double segment_deficit(const SegmentState& segment, double tau0, const netcalc::MacParams& mac,
                       std::span<const netcalc::AppProfile> profiles, std::size_t k) {
  const auto req = required_per_vehicle(segment, tau0, mac, profiles, k);
  return *std::max_element(req.begin(), req.end()) - segment.bandwidth;
}

double segment_surplus(const SegmentState& segment, double tau0, const netcalc::MacParams& mac,
                       std::span<const netcalc::AppProfile> profiles, std::size_t k) {
  const auto req = required_per_vehicle(segment, tau0, mac, profiles, k);
  return segment.bandwidth - *std::max_element(req.begin(), req.end());
}

SegmentGrouping group_segments(std::span<const SegmentState> segments, double tau0,
                               const netcalc::MacParams& mac,
                               std::span<const netcalc::AppProfile> profiles, std::size_t k) {
  SegmentGrouping g;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    bool deficient = false;
    try {
      const auto bounds = segment_bounds(segments[s], mac, profiles, k);
      deficient = std::any_of(bounds.begin(), bounds.end(), [&](double t) { return t > tau0; });
    } catch (const SaturatedLink&) {
      deficient = true;
    }
    (deficient ? g.exist : g.empty).push_back(s);
  }
  return g;
}

ReallocationPlan reallocate(const SegmentGrouping& groups, std::span<const double> deficits,
                            std::span<const double> surpluses, std::size_t m) {
  if (deficits.size() != groups.exist.size() || surpluses.size() != groups.empty.size()) {
    throw DomainError("deficit/surplus lists must align with the segment groups");
  }
  if (m == 0) throw DomainError("number of managed segments must be >= 1");

  ReallocationPlan plan;
  const double total_surplus = std::accumulate(surpluses.begin(), surpluses.end(), 0.0);
  const double total_deficit = std::accumulate(deficits.begin(), deficits.end(), 0.0);
  plan.d_r = total_surplus - total_deficit;
  if (groups.exist.empty()) {
    for (std::size_t u : groups.empty) plan.deltas.push_back({u, 0.0, Role::Give});
    return plan;
  }

  const double share = plan.d_r / static_cast<double>(m);
  for (std::size_t i = 0; i < groups.empty.size(); ++i) {
    const double give = surpluses[i] - std::max(share, 0.0);
    plan.deltas.push_back({groups.empty[i], -give, Role::Give});
  }
  for (std::size_t i = 0; i < groups.exist.size(); ++i) {
    const double receive = deficits[i] + share;
    plan.deltas.push_back({groups.exist[i], receive, Role::Receive});
  }
  if (plan.d_r < 0.0) plan.fallback = groups.exist;
  return plan;
}

std::vector<SegmentState> apply_plan(std::span<const SegmentState> segments,
                                     const ReallocationPlan& plan, double r_upper) {
  std::vector<SegmentState> out(segments.begin(), segments.end());
  for (const auto& d : plan.deltas) {
    if (d.segment >= out.size()) {
      throw DomainError("plan references segment position " + std::to_string(d.segment) +
                        " outside the roster");
    }
    out[d.segment].bandwidth += d.delta;
  }
  double total = 0.0;
  for (const auto& s : out) {
    // Rounding in the give/receive split may leave a -1e-15 style residue.
    if (s.bandwidth < 0.0 && s.bandwidth > -1e-12) {
      continue;
    }
    if (s.bandwidth < 0.0) {
      throw NegativeBandwidth("segment " + std::to_string(s.id) + " would hold " +
                              std::to_string(s.bandwidth) + " Mb/s");
    }
    total += s.bandwidth;
  }
  for (auto& s : out) s.bandwidth = std::max(s.bandwidth, 0.0);
  if (total > r_upper * (1.0 + 1e-12)) {
    throw CapViolation("total bandwidth " + std::to_string(total) + " exceeds cap " +
                       std::to_string(r_upper));
  }
  return out;
}

FallbackSpacing fallback_spacing(const SegmentState& segment, double post_bandwidth,
                                 const netcalc::MacParams& mac,
                                 std::span<const netcalc::AppProfile> profiles, std::size_t k,
                                 const KinematicParams& kinematics) {
  SegmentState at_plan = segment;
  at_plan.bandwidth = post_bandwidth;
  const auto bounds = segment_bounds(at_plan, mac, profiles, k);
  if (bounds.empty()) {
    throw DomainError("segment " + std::to_string(segment.id) + " has no vehicles");
  }
  FallbackSpacing f;
  f.tau0 = *std::max_element(bounds.begin(), bounds.end());
  f.s_star = safety_distance(kinematics, f.tau0);
  return f;
}

void write_plan_csv(std::ostream& os, const ReallocationPlan& plan,
                    std::span<const SegmentState> segments) {
  CsvWriter w(os);
  w.header({"segment_id", "delta_mbps", "role"});
  for (const auto& d : plan.deltas) {
    const std::int64_t id = d.segment < segments.size() ? segments[d.segment].id
                                                        : static_cast<std::int64_t>(d.segment);
    const bool fallback =
        std::find(plan.fallback.begin(), plan.fallback.end(), d.segment) != plan.fallback.end();
    w.field(id).field(d.delta).field(d.role == Role::Give ? "give" : (fallback ? "receive-fallback" : "receive"));
    w.end_row();
  }
}

}  // namespace platoon::resource
