#pragma once

#include <cstdint>

namespace platoon {

/// Mean string velocity and braking deceleration magnitude.
///
/// Units are m/s and m/s^2 on the road model; the cellular automaton uses
/// cells and steps instead. Callers convert; nothing here does.
struct KinematicParams {
  double v = 0.0;
  double A = 1.0;
};

/// Snapshot of string-level traffic metrics.
struct StringMetrics {
  double mean_spacing = 0.0;  ///< average same-lane inter-vehicle spacing
  double dd = 0.0;            ///< |mean_spacing(t) - mean_spacing(t-1)|
  double gap = 0.0;           ///< |1/rho - s*|
  double d_s = 0.0;           ///< normalized gap in [0, 1]
  double throughput = 0.0;    ///< vehicle flux
};

/// Floor constant of the normalized gap, in meters.
inline constexpr double kDefaultOmega = 1e-6;

/// Minimum spacing that lets a follower with reaction delay tau0 stop behind
/// a leader braking at A: (A/2) tau0^2 + v tau0.
double safety_distance(const KinematicParams& params, double tau0);

/// Inverse of safety_distance in tau0: the reaction-delay budget that keeps
/// spacing s_star safe.
double perception_reaction_delay(double s_star, const KinematicParams& params);

/// Scalar flux v * rho.
double throughput(double v, double rho);

/// |1/rho - s*|; zero means the string sits at its safety distance.
double stability_gap(double rho, double s_star);

/// min(gap / max(gap, omega), 1).
double normalized_gap(double gap, double omega = kDefaultOmega);

/// |mean_now - mean_prev|.
double differential_distance(double mean_now, double mean_prev);

/// Vehicles that fit in a platoon spanning twice the radio range on every
/// lane at spacing s_star, rounded down.
std::int64_t platoon_capacity(int lanes, double radio_range, double s_star);

}  // namespace platoon
