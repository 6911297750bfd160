#include "platoon/admm.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "platoon/errors.hpp"

namespace platoon::admm {
namespace {

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

void AdmmConfig::validate() const {
  if (!(mu > 0.0)) throw DomainError("mu must be > 0");
  if (!(delta >= 0.0)) throw DomainError("delta must be >= 0");
  if (!(eps_prim > 0.0)) throw DomainError("eps_prim must be > 0");
  if (!(eps_dual > 0.0)) throw DomainError("eps_dual must be > 0");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
}

AdmmState AdmmState::initial(std::size_t segments) {
  AdmmState s;
  s.s_star.assign(segments, 0.0);
  s.xi.assign(segments, 1.0);
  s.z = 1.0;
  s.z_prev = 1.0;
  return s;
}

double soft_threshold(double a, double kappa) {
  if (!(kappa >= 0.0)) throw DomainError("soft threshold needs kappa >= 0");
  if (a > kappa) return a - kappa;
  if (a < -kappa) return a + kappa;
  return 0.0;
}

AdmmState admm_step(const AdmmState& state, const AdmmConfig& cfg,
                    std::span<const double> spacings) {
  const std::size_t m = spacings.size();
  if (m == 0) throw DomainError("at least one segment is required");
  if (state.s_star.size() != m || state.xi.size() != m) {
    throw DomainError("state has " + std::to_string(state.s_star.size()) +
                      " segments but " + std::to_string(m) + " spacings were given");
  }
  const double mean_spacing = mean(spacings);
  const double offset = cfg.textbook_update ? 0.0 : mean_spacing;
  const double gain = cfg.mu / (1.0 + cfg.mu);

  AdmmState next;
  next.s_star.resize(m);
  next.xi.resize(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    next.s_star[i] = gain * (state.z - state.xi[i] - offset);
    acc += next.s_star[i] + state.xi[i];
  }
  next.z_prev = state.z;
  next.z = soft_threshold(acc / static_cast<double>(m), cfg.delta / cfg.mu) + mean_spacing;
  for (std::size_t i = 0; i < m; ++i) {
    next.xi[i] = state.xi[i] + next.s_star[i] - next.z;
  }
  next.iter = state.iter + 1;
  return next;
}

Residuals residuals(const AdmmState& state, double mu) {
  Residuals r;
  for (double s : state.s_star) r.r_sq += (s - state.z) * (s - state.z);
  const double dz = state.z - state.z_prev;
  r.dr_sq = static_cast<double>(state.segments()) * mu * mu * dz * dz;
  return r;
}

SolveResult solve(const AdmmConfig& cfg, std::span<const double> spacings,
                  std::optional<AdmmState> init, const TraceFn& trace) {
  cfg.validate();
  if (spacings.empty()) throw DomainError("at least one segment is required");
  SolveResult out;
  out.state = init ? std::move(*init) : AdmmState::initial(spacings.size());
  for (int k = 0; k < cfg.max_iter; ++k) {
    out.state = admm_step(out.state, cfg, spacings);
    out.residuals = residuals(out.state, cfg.mu);
    if (trace) trace(out.state, out.residuals);
    if (out.residuals.r_sq <= cfg.eps_prim && out.residuals.dr_sq <= cfg.eps_dual) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace platoon::admm
