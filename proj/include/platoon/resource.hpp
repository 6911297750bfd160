#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "platoon/netcalc.hpp"
#include "platoon/segment.hpp"
#include "platoon/traffic.hpp"

namespace platoon::resource {

/// Split of a segment's vehicles by whether their delay bound meets tau0.
/// Entries are roster indices.
struct VehicleGrouping {
  std::vector<std::size_t> j0;     ///< deficient, descending by T - tau0
  std::vector<std::size_t> j1;     ///< resource-rich, ascending index
  std::vector<double> slack;       ///< T - tau0 per roster index
};

/// Segment positions (indices into the managed roster).
struct SegmentGrouping {
  std::vector<std::size_t> exist;  ///< at least one deficient vehicle
  std::vector<std::size_t> empty;  ///< no deficient vehicle
};

enum class Role { Give, Receive };

struct SegmentDelta {
  std::size_t segment = 0;
  double delta = 0.0;  ///< signed change applied to the segment bandwidth
  Role role = Role::Give;
};

struct ReallocationPlan {
  double d_r = 0.0;                     ///< total surplus minus total deficit
  std::vector<SegmentDelta> deltas;
  std::vector<std::size_t> fallback;    ///< segments that must widen spacing
  /// Sum of all deltas. Zero whenever the groups cover every segment and
  /// d_r >= 0; otherwise reported as a diagnostic.
  double conservation_residual() const;
};

/// Spacing a fallback segment has to adopt at its post-plan bandwidth.
struct FallbackSpacing {
  double tau0 = 0.0;
  double s_star = 0.0;
};

/// Per-vehicle delay bound for application k when every roster vehicle runs
/// every profile and competes on the segment's bandwidth.
std::vector<double> segment_bounds(const SegmentState& segment, const netcalc::MacParams& mac,
                                   std::span<const netcalc::AppProfile> profiles, std::size_t k);

/// Partitions roster indices by the sign of T - tau0. Zero slack is rich.
VehicleGrouping classify_vehicles(std::span<const double> bounds, double tau0);

/// Bandwidth segment must gain so its neediest vehicle meets tau0:
/// max_i required_bandwidth_i - R.
double segment_deficit(const SegmentState& segment, double tau0, const netcalc::MacParams& mac,
                       std::span<const netcalc::AppProfile> profiles, std::size_t k);

/// Bandwidth segment can spare while every vehicle still meets tau0:
/// min_i R - required_bandwidth_i.
double segment_surplus(const SegmentState& segment, double tau0, const netcalc::MacParams& mac,
                       std::span<const netcalc::AppProfile> profiles, std::size_t k);

/// Groups segments by whether any vehicle misses tau0 at current bandwidth.
SegmentGrouping group_segments(std::span<const SegmentState> segments, double tau0,
                               const netcalc::MacParams& mac,
                               std::span<const netcalc::AppProfile> profiles, std::size_t k);

/// deficits align with groups.exist, surpluses with groups.empty; m is the
/// number of managed segments.
ReallocationPlan reallocate(const SegmentGrouping& groups, std::span<const double> deficits,
                            std::span<const double> surpluses, std::size_t m);

/// Returns a copy of segments with plan applied. Throws NegativeBandwidth or
/// CapViolation without modifying anything.
std::vector<SegmentState> apply_plan(std::span<const SegmentState> segments,
                                     const ReallocationPlan& plan, double r_upper);

/// Largest delay bound in the segment at post_bandwidth, mapped back to the
/// safety distance that delay supports.
FallbackSpacing fallback_spacing(const SegmentState& segment, double post_bandwidth,
                                 const netcalc::MacParams& mac,
                                 std::span<const netcalc::AppProfile> profiles, std::size_t k,
                                 const KinematicParams& kinematics);

/// segment_id,delta_mbps,role rows with a header line.
void write_plan_csv(std::ostream& os, const ReallocationPlan& plan,
                    std::span<const SegmentState> segments);

}  // namespace platoon::resource
