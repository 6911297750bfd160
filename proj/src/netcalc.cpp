#include "platoon/netcalc.hpp"

#include <cmath>
#include <string>

#include "platoon/errors.hpp"

namespace platoon::netcalc {
namespace {

double computing_delay(const AppProfile& app, const NodeResources& node) {
  const double work = app.o * app.eta;
  if (work == 0.0) return 0.0;
  if (node.theta == 0.0) throw ZeroCompute("vehicle has no computing capacity for a nonzero workload");
  return work / node.theta;
}

void check_inputs(const AppProfile& app, const NodeResources& node, const MacParams& mac,
                  const CrossTraffic& ct) {
  app.validate();
  mac.validate();
  if (!(node.theta >= 0.0)) throw DomainError("theta must be >= 0");
  if (!(ct.h_lam >= 0.0) || !(ct.h_o >= 0.0)) throw DomainError("cross traffic must be >= 0");
}

}  // namespace

void AppProfile::validate() const {
  if (!(o > 0.0)) throw DomainError("app " + std::to_string(id) + ": data volume o must be > 0");
  if (!(lam >= 0.0)) throw DomainError("app " + std::to_string(id) + ": arrival rate must be >= 0");
  if (!(eta >= 0.0)) throw DomainError("app " + std::to_string(id) + ": eta must be >= 0");
  if (!(tau > 0.0)) throw DomainError("app " + std::to_string(id) + ": deadline must be > 0");
  if (!(weight >= 0.0)) throw DomainError("app " + std::to_string(id) + ": weight must be >= 0");
}

void MacParams::validate() const {
  if (!(w0 > 0.0)) throw DomainError("w0 must be > 0");
  if (gamma < 1) throw DomainError("gamma must be >= 1");
  if (eps <= 0) throw DomainError("eps must be > 0");
  if (eps > gamma) throw DomainError("eps exceeds gamma");
}

double backoff_window_sum(const MacParams& mac) {
  mac.validate();
  const double p = std::ldexp(1.0, mac.eps);
  return (2.0 * p - 1.0 + p * (mac.gamma - mac.eps)) * mac.w0;
}

CrossTraffic cross_traffic(std::size_t n_vehicles, std::span<const AppProfile> profiles,
                           std::size_t k) {
  if (n_vehicles < 1) throw DomainError("cross traffic needs at least one vehicle");
  if (k >= profiles.size()) {
    throw DomainError("unknown application index " + std::to_string(k));
  }
  const double n = static_cast<double>(n_vehicles);
  CrossTraffic ct;
  for (std::size_t l = 0; l < profiles.size(); ++l) {
    const double copies = l == k ? n - 1.0 : n;
    ct.h_lam += copies * profiles[l].lam;
    ct.h_o += copies * profiles[l].o;
  }
  return ct;
}

DelayBreakdown delay_bound(const AppProfile& app, const NodeResources& node, double bandwidth,
                           const MacParams& mac, const CrossTraffic& ct) {
  check_inputs(app, node, mac, ct);
  const double leftover = bandwidth - ct.h_lam;
  if (!(leftover > 0.0)) {
    throw SaturatedLink("bandwidth " + std::to_string(bandwidth) +
                        " does not exceed cross-traffic rate " + std::to_string(ct.h_lam));
  }
  const double lambda = backoff_window_sum(mac);
  DelayBreakdown d;
  d.computing = computing_delay(app, node);
  d.transmission = app.o / leftover;
  d.competition = (lambda * ct.h_lam + ct.h_o) / leftover;
  d.protocol = lambda;
  return d;
}

AsymptoticBounds asymptotic_bounds(const AppProfile& app, const NodeResources& node,
                                   double bandwidth, const MacParams& mac,
                                   const CrossTraffic& ct) {
  check_inputs(app, node, mac, ct);
  const double leftover = bandwidth - ct.h_lam;
  if (!(leftover > 0.0)) {
    throw SaturatedLink("bandwidth does not exceed cross-traffic rate");
  }
  const double lambda = backoff_window_sum(mac);
  AsymptoticBounds b;
  b.limit_theta_inf = (app.o + lambda * ct.h_lam + ct.h_o) / leftover + lambda;
  b.limit_R_inf = computing_delay(app, node) + lambda;
  return b;
}

double required_bandwidth(const AppProfile& app, const NodeResources& node, double tau0,
                          const MacParams& mac, const CrossTraffic& ct) {
  check_inputs(app, node, mac, ct);
  const double lambda = backoff_window_sum(mac);
  const double budget = tau0 - computing_delay(app, node) - lambda;
  if (!(budget > 0.0)) {
    throw InfeasibleBudget("computing and protocol delay leave no time for transmission within " +
                           std::to_string(tau0) + " s");
  }
  return (app.o + lambda * ct.h_lam + ct.h_o) / budget + ct.h_lam;
}

}  // namespace platoon::netcalc
