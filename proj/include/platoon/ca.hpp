#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "platoon/rng.hpp"

namespace platoon::ca {

/// Multi-lane highway cellular automaton. Positions and gaps are in cells,
/// velocities in cells per step.
struct CaConfig {
  int length = 100;
  int lanes = 3;
  int v_max = 30;
  double arrival_rate = 0.5;      ///< mean entries per step, split evenly over lanes
  int initial_speed = 5;
  int s_star = 10;                ///< target safety distance in empty cells
  double lane_change_prob = 0.5;
  /// Pre-fill every lane with vehicles this many empty cells apart at
  /// initial_speed; 0 starts from an empty road.
  int initial_spacing = 0;
  int initial_fill_speed = -1;    ///< speed of pre-filled vehicles; -1 uses initial_speed
  std::uint64_t seed = 1;

  void validate() const;
};

struct CaVehicle {
  std::int64_t id = 0;
  int v = 0;
};

/// Occupancy of lanes x length cells.
class CaGrid {
 public:
  explicit CaGrid(const CaConfig& cfg);

  int lanes() const { return lanes_; }
  int length() const { return length_; }
  std::int64_t time() const { return time_; }

  const std::optional<CaVehicle>& at(int lane, int pos) const;
  /// Places a vehicle; throws DomainError if the cell is taken.
  void place(int lane, int pos, int v);
  std::size_t vehicle_count() const;

  /// Vehicles that left past the last cell during the most recent step.
  std::int64_t last_exits() const { return last_exits_; }
  /// Contacts recorded during the most recent step.
  std::int64_t last_congestion() const { return last_congestion_; }

  /// One char per cell, one line per lane: '#' vehicle, '.' empty.
  void dump_raster(std::ostream& os) const;

 private:
  friend void step(CaGrid& grid, const CaConfig& cfg, Rng& rng);

  std::optional<CaVehicle>& cell(int lane, int pos);

  int lanes_;
  int length_;
  std::vector<std::optional<CaVehicle>> cells_;
  std::int64_t time_ = 0;
  std::int64_t next_id_ = 1;
  std::int64_t last_exits_ = 0;
  std::int64_t last_congestion_ = 0;
};

/// Advances the grid one step: velocity rules, lane changes, movement with
/// contact detection, then entries at cell 0.
void step(CaGrid& grid, const CaConfig& cfg, Rng& rng);

/// Per-step traffic metrics.
struct CaRow {
  std::int64_t t = 0;
  double mean_spacing = 0.0;  ///< NaN when no lane holds two vehicles
  double dd = 0.0;            ///< NaN when either spacing sample is missing
  double throughput = 0.0;    ///< exits during the step
  double density = 0.0;       ///< vehicles per cell
  double d_s = 0.0;           ///< NaN on an empty road
  std::int64_t congestion_events = 0;
  std::int64_t vehicles = 0;
};

/// Mean empty-cell gap between consecutive same-lane vehicles; nullopt
/// when no lane has two vehicles.
std::optional<double> mean_spacing(const CaGrid& grid);

/// Builds the metric row for the grid's current state. prev_spacing is the
/// previous step's mean spacing, if any.
CaRow measure(const CaGrid& grid, const CaConfig& cfg, std::optional<double> prev_spacing,
              double omega);

struct CaRun {
  std::vector<CaRow> rows;  ///< row 0 is the initial state
  std::vector<std::int64_t> congestion_log;  ///< step of every contact
};

/// Seeds the stream from cfg.seed and runs steps >= 1 steps.
CaRun run(const CaConfig& cfg, int steps, double omega);

struct CaSummary {
  double mean_dd = 0.0;
  double mean_throughput = 0.0;
  double mean_d_s = 0.0;
  double mean_spacing = 0.0;
};

/// Averages over rows with t in [from, to]; NaN samples are skipped.
CaSummary summarize(const CaRun& run, std::int64_t from, std::int64_t to);

}  // namespace platoon::ca
