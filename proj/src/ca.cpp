#include "platoon/ca.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "platoon/errors.hpp"
#include "platoon/traffic.hpp"

namespace platoon::ca {
namespace {

constexpr int kOpenRoad = std::numeric_limits<int>::max();

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// Empty cells ahead of pos in lane up to the next vehicle, or kOpenRoad.
int gap_ahead(const CaGrid& g, int lane, int pos) {
  for (int p = pos + 1; p < g.length(); ++p) {
    if (g.at(lane, p)) return p - pos - 1;
  }
  return kOpenRoad;
}

/// True when cells [pos - span, pos + span] of lane are all free, clipped
/// to the road.
bool has_room(const CaGrid& g, int lane, int pos, int span) {
  for (int p = std::max(0, pos - span); p <= std::min(g.length() - 1, pos + span); ++p) {
    if (g.at(lane, p)) return false;
  }
  return true;
}

}  // namespace

void CaConfig::validate() const {
  if (length < 2) throw DomainError("length must be >= 2 cells");
  if (lanes < 1) throw DomainError("lanes must be >= 1");
  if (v_max < 1) throw DomainError("v_max must be >= 1");
  if (!(arrival_rate >= 0.0) || arrival_rate > static_cast<double>(lanes)) {
    throw DomainError("arrival_rate must be in [0, lanes]");
  }
  if (initial_speed < 0 || initial_speed > v_max) {
    throw DomainError("initial_speed must be in [0, v_max]");
  }
  if (s_star < 1) throw DomainError("s_star must be >= 1");
  if (!(lane_change_prob >= 0.0 && lane_change_prob <= 1.0)) {
    throw DomainError("lane_change_prob must be in [0, 1]");
  }
  if (initial_spacing < 0) throw DomainError("initial_spacing must be >= 0");
  if (initial_fill_speed < -1 || initial_fill_speed > v_max) {
    throw DomainError("initial_fill_speed must be -1 or in [0, v_max]");
  }
}

CaGrid::CaGrid(const CaConfig& cfg) : lanes_(cfg.lanes), length_(cfg.length) {
  cfg.validate();
  cells_.resize(static_cast<std::size_t>(lanes_) * static_cast<std::size_t>(length_));
  if (cfg.initial_spacing > 0) {
    const int v = cfg.initial_fill_speed >= 0 ? cfg.initial_fill_speed : cfg.initial_speed;
    for (int lane = 0; lane < lanes_; ++lane) {
      for (int pos = length_ - 1; pos >= 0; pos -= cfg.initial_spacing + 1) {
        place(lane, pos, v);
      }
    }
  }
}

const std::optional<CaVehicle>& CaGrid::at(int lane, int pos) const {
  return cells_.at(static_cast<std::size_t>(lane) * static_cast<std::size_t>(length_) +
                   static_cast<std::size_t>(pos));
}

std::optional<CaVehicle>& CaGrid::cell(int lane, int pos) {
  return cells_.at(static_cast<std::size_t>(lane) * static_cast<std::size_t>(length_) +
                   static_cast<std::size_t>(pos));
}

void CaGrid::place(int lane, int pos, int v) {
  auto& c = cell(lane, pos);
  if (c) throw DomainError("cell already occupied");
  c = CaVehicle{next_id_++, v};
}

std::size_t CaGrid::vehicle_count() const {
  std::size_t n = 0;
  for (const auto& c : cells_) n += c.has_value() ? 1 : 0;
  return n;
}

void CaGrid::dump_raster(std::ostream& os) const {
  for (int lane = 0; lane < lanes_; ++lane) {
    for (int pos = 0; pos < length_; ++pos) os << (at(lane, pos) ? '#' : '.');
    os << '\n';
  }
}

void step(CaGrid& g, const CaConfig& cfg, Rng& rng) {
  const int L = g.length();

  // Velocity rules, judged on the grid as it stood at the start of the step.
  for (int lane = 0; lane < g.lanes(); ++lane) {
    for (int pos = 0; pos < L; ++pos) {
      auto& c = g.cell(lane, pos);
      if (!c) continue;
      const int gap = gap_ahead(g, lane, pos);
      if (gap > cfg.s_star && c->v < cfg.v_max) {
        ++c->v;
      } else if (gap < cfg.s_star && c->v >= 1) {
        --c->v;
      }
    }
  }

  // Lane changes. Applied in place, so a later vehicle sees earlier moves.
  for (int lane = 0; lane < g.lanes(); ++lane) {
    for (int pos = 0; pos < L; ++pos) {
      if (!g.at(lane, pos)) continue;
      if (gap_ahead(g, lane, pos) >= cfg.s_star) continue;
      for (int side : {-1, 1}) {
        const int target = lane + side;
        if (target < 0 || target >= g.lanes()) continue;
        if (!has_room(g, target, pos, cfg.s_star)) continue;
        if (!rng.bernoulli(cfg.lane_change_prob)) continue;
        g.cell(target, pos) = g.cell(lane, pos);
        g.cell(lane, pos).reset();
        break;
      }
    }
  }

  // Synchronous movement against the post-lane-change positions.
  std::vector<std::optional<CaVehicle>> next(g.cells_.size());
  std::int64_t exits = 0, contacts = 0;
  for (int lane = 0; lane < g.lanes(); ++lane) {
    const std::size_t base = static_cast<std::size_t>(lane) * static_cast<std::size_t>(L);
    int leader_new = -1;  // new position of the vehicle ahead, -1 when none remains
    bool leader_exited = true;
    for (int pos = L - 1; pos >= 0; --pos) {
      const auto& c = g.at(lane, pos);
      if (!c) continue;
      CaVehicle v = *c;
      const int gap = gap_ahead(g, lane, pos);
      if (gap == kOpenRoad) {
        const int dest = pos + v.v;
        if (dest >= L) {
          ++exits;
          leader_exited = true;
          leader_new = -1;
          continue;
        }
        next[base + static_cast<std::size_t>(dest)] = v;
        leader_new = dest;
        leader_exited = false;
        continue;
      }
      int move = v.v;
      bool clipped = false;
      if (move > gap) {
        move = gap;
        clipped = true;
      }
      // A leader that exited or moved on frees more room, but movement is
      // bounded by the start-of-step gap.
      const int dest = pos + move;
      if (clipped) {
        v.v = move;
        if (!leader_exited && leader_new == dest + 1) {
          v.v = 0;
          next[base + static_cast<std::size_t>(leader_new)]->v = 0;
          ++contacts;
        }
      }
      next[base + static_cast<std::size_t>(dest)] = v;
      leader_new = dest;
      leader_exited = false;
    }
  }
  g.cells_ = std::move(next);

  // Entries.
  const double p = cfg.arrival_rate / static_cast<double>(g.lanes());
  for (int lane = 0; lane < g.lanes(); ++lane) {
    const bool arrives = rng.bernoulli(p);
    if (arrives && !g.at(lane, 0)) g.place(lane, 0, cfg.initial_speed);
  }

  g.last_exits_ = exits;
  g.last_congestion_ = contacts;
  ++g.time_;
}

std::optional<double> mean_spacing(const CaGrid& g) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (int lane = 0; lane < g.lanes(); ++lane) {
    int prev = -1;
    for (int pos = 0; pos < g.length(); ++pos) {
      if (!g.at(lane, pos)) continue;
      if (prev >= 0) {
        sum += pos - prev - 1;
        ++n;
      }
      prev = pos;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

CaRow measure(const CaGrid& g, const CaConfig& cfg, std::optional<double> prev_spacing,
              double omega) {
  CaRow row;
  row.t = g.time();
  const auto s = mean_spacing(g);
  row.mean_spacing = s ? *s : nan();
  row.dd = (s && prev_spacing) ? differential_distance(*s, *prev_spacing) : nan();
  row.throughput = static_cast<double>(g.last_exits());
  row.vehicles = static_cast<std::int64_t>(g.vehicle_count());
  row.density = static_cast<double>(row.vehicles) /
                (static_cast<double>(g.lanes()) * static_cast<double>(g.length()));
  row.d_s = row.density > 0.0
                ? normalized_gap(stability_gap(row.density, static_cast<double>(cfg.s_star)), omega)
                : nan();
  row.congestion_events = g.last_congestion();
  return row;
}

CaRun run(const CaConfig& cfg, int steps, double omega) {
  if (steps < 1) throw DomainError("steps must be >= 1");
  CaGrid grid(cfg);
  Rng rng(cfg.seed);
  CaRun out;
  out.rows.push_back(measure(grid, cfg, std::nullopt, omega));
  std::optional<double> prev = mean_spacing(grid);
  for (int t = 0; t < steps; ++t) {
    step(grid, cfg, rng);
    out.rows.push_back(measure(grid, cfg, prev, omega));
    for (std::int64_t i = 0; i < grid.last_congestion(); ++i) out.congestion_log.push_back(grid.time());
    prev = mean_spacing(grid);
  }
  return out;
}

CaSummary summarize(const CaRun& r, std::int64_t from, std::int64_t to) {
  auto mean_of = [&](double CaRow::*field) {
    double sum = 0.0;
    std::int64_t n = 0;
    for (const auto& row : r.rows) {
      if (row.t < from || row.t > to) continue;
      const double x = row.*field;
      if (std::isnan(x)) continue;
      sum += x;
      ++n;
    }
    return n > 0 ? sum / static_cast<double>(n) : nan();
  };
  return {mean_of(&CaRow::dd), mean_of(&CaRow::throughput), mean_of(&CaRow::d_s),
          mean_of(&CaRow::mean_spacing)};
}

}  // namespace platoon::ca
