#include "platoon/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "platoon/errors.hpp"

namespace platoon {
namespace {

void check_kinematics(const KinematicParams& p) {
  if (!(p.A > 0.0)) throw DomainError("deceleration A must be > 0");
  if (!(p.v >= 0.0)) throw DomainError("velocity v must be >= 0");
}

}  // namespace

double safety_distance(const KinematicParams& params, double tau0) {
  check_kinematics(params);
  if (!(tau0 >= 0.0)) throw DomainError("perception-reaction delay must be >= 0");
  return 0.5 * params.A * tau0 * tau0 + params.v * tau0;
}

double perception_reaction_delay(double s_star, const KinematicParams& params) {
  check_kinematics(params);
  if (!(s_star >= 0.0)) throw DomainError("safety distance must be >= 0");
  if (s_star == 0.0) return 0.0;
  // (sqrt(v^2 + 2 A s) - v) / A, rationalized to avoid cancellation when
  // v^2 dominates 2 A s.
  const double root = std::sqrt(params.v * params.v + 2.0 * params.A * s_star);
  return 2.0 * s_star / (root + params.v);
}

double throughput(double v, double rho) {
  if (!(v >= 0.0) || !(rho >= 0.0)) throw DomainError("throughput needs v >= 0 and rho >= 0");
  return v * rho;
}

double stability_gap(double rho, double s_star) {
  if (!(rho > 0.0)) throw DomainError("density must be > 0 for spacing 1/rho");
  return std::abs(1.0 / rho - s_star);
}

double normalized_gap(double gap, double omega) {
  if (!(omega > 0.0)) throw DomainError("omega must be > 0");
  if (!(gap >= 0.0)) throw DomainError("gap must be >= 0");
  return std::min(gap / std::max(gap, omega), 1.0);
}

double differential_distance(double mean_now, double mean_prev) {
  return std::abs(mean_now - mean_prev);
}

std::int64_t platoon_capacity(int lanes, double radio_range, double s_star) {
  if (!(s_star > 0.0)) throw DomainError("safety distance must be > 0 for a finite capacity");
  if (!(radio_range > 0.0)) throw DomainError("radio range must be > 0");
  if (lanes < 1) throw DomainError("lane count must be >= 1");
  return static_cast<std::int64_t>(std::floor(2.0 * lanes * radio_range / s_star));
}

}  // namespace platoon
