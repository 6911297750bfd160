#pragma once

#include <cstddef>
#include <span>

namespace platoon::netcalc {

/// One application class offloaded over V2V.
///
/// Unit convention: data volume in Mb, rates in Mb/s, times in s. Compute
/// intensity eta and vehicle capacity theta are chosen so o * eta / theta is
/// seconds (theta in Mb/s of processed input when eta = 1).
struct AppProfile {
  int id = 0;
  double o = 1.0;       ///< data volume per burst, Mb
  double lam = 0.0;     ///< sustained arrival rate, Mb/s
  double eta = 1.0;     ///< compute intensity
  double tau = 1.0;     ///< deadline, s
  int priority = 1;     ///< 1 is the highest
  double reward = 0.0;  ///< reward for an in-deadline completion
  double weight = 0.0;  ///< exploration weight P_g

  void validate() const;
};

/// Exponential back-off: gamma stages, window stops doubling after stage eps.
struct MacParams {
  double w0 = 0.2;
  int gamma = 2;
  int eps = 1;

  void validate() const;
};

struct NodeResources {
  double theta = 1.0;
  double theta_upper = 1.0;
};

/// Aggregate arrival envelope H_lam * t + H_o of every competing flow.
struct CrossTraffic {
  double h_lam = 0.0;
  double h_o = 0.0;
};

/// The four addends of the offloading delay bound.
struct DelayBreakdown {
  double computing = 0.0;
  double transmission = 0.0;
  double competition = 0.0;
  double protocol = 0.0;

  double total() const { return computing + transmission + competition + protocol; }
};

struct AsymptoticBounds {
  double limit_theta_inf = 0.0;  ///< bound as on-board compute grows without limit
  double limit_R_inf = 0.0;      ///< bound as link bandwidth grows without limit
};

/// Worst-case cumulative back-off window Lambda = sum_g min(2^g, 2^eps) W0.
double backoff_window_sum(const MacParams& mac);

/// Envelope of all flows other than application k of the tagged vehicle, for
/// N vehicles each running every profile. k indexes into profiles.
CrossTraffic cross_traffic(std::size_t n_vehicles, std::span<const AppProfile> profiles,
                           std::size_t k);

/// Upper bound on the V2V offloading delay of one application burst.
/// Throws SaturatedLink when bandwidth <= ct.h_lam and ZeroCompute when
/// theta is 0 but there is work to process.
DelayBreakdown delay_bound(const AppProfile& app, const NodeResources& node, double bandwidth,
                           const MacParams& mac, const CrossTraffic& ct);

AsymptoticBounds asymptotic_bounds(const AppProfile& app, const NodeResources& node,
                                   double bandwidth, const MacParams& mac,
                                   const CrossTraffic& ct);

/// Smallest bandwidth whose delay bound equals tau0. Throws InfeasibleBudget
/// when computing plus protocol delay already reach tau0.
double required_bandwidth(const AppProfile& app, const NodeResources& node, double tau0,
                          const MacParams& mac, const CrossTraffic& ct);

}  // namespace platoon::netcalc
