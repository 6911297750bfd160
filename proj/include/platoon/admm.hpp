#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace platoon::admm {

struct AdmmConfig {
  double mu = 1.0;        ///< augmented-Lagrangian penalty, > 0
  double delta = 1.0;     ///< weight of the stability term, >= 0
  double eps_prim = 1e-6;
  double eps_dual = 1e-6;
  int max_iter = 10000;
  /// Drop the mean-spacing offset from the s*-update (textbook LASSO form).
  bool textbook_update = false;

  void validate() const;
};

/// Per-segment safety distances, consensus variable and scaled multipliers.
struct AdmmState {
  std::vector<double> s_star;
  std::vector<double> xi;
  double z = 1.0;
  double z_prev = 1.0;
  int iter = 0;

  /// Default start: z = 1, xi_i = 1, s*_i = 0.
  static AdmmState initial(std::size_t segments);
  std::size_t segments() const { return s_star.size(); }
};

struct Residuals {
  double r_sq = 0.0;   ///< sum_i (s*_i - z)^2
  double dr_sq = 0.0;  ///< M mu^2 (z - z_prev)^2
};

struct SolveResult {
  AdmmState state;
  Residuals residuals;
  bool converged = false;
};

using TraceFn = std::function<void(const AdmmState&, const Residuals&)>;

/// S_kappa(a): shrink a toward zero by kappa.
double soft_threshold(double a, double kappa);

/// One consensus iteration: s*-update, z-update, multiplier update.
AdmmState admm_step(const AdmmState& state, const AdmmConfig& cfg,
                    std::span<const double> spacings);

Residuals residuals(const AdmmState& state, double mu);

/// Iterates admm_step until both residuals are at or below their thresholds
/// or max_iter steps have run. Non-convergence is reported in the result.
SolveResult solve(const AdmmConfig& cfg, std::span<const double> spacings,
                  std::optional<AdmmState> init = std::nullopt,
                  const TraceFn& trace = {});

}  // namespace platoon::admm
