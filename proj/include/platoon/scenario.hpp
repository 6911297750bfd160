#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "platoon/admm.hpp"
#include "platoon/ca.hpp"
#include "platoon/netcalc.hpp"
#include "platoon/platoon_sim.hpp"

namespace platoon::harness {

enum class ExperimentKind { BoundSurface, AdmmSweep, CaRelations, PolicyComparison };

std::string_view to_string(ExperimentKind kind);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Evenly spaced sweep from..to with `steps` points (steps >= 2), or the
/// single point `from` when steps == 1.
struct Sweep {
  double from = 0.0;
  double to = 0.0;
  int steps = 1;

  std::vector<double> values() const;
};

struct BoundSurfaceParams {
  std::size_t vehicles = 3;
  std::size_t apps = 5;
  Range o{1.0, 3.0};
  Range lam{0.4, 0.8};
  double eta = 5.0;
  std::size_t app_index = 0;  ///< which drawn application is the tagged one
  Sweep theta{10.0, 60.0, 11};
  Sweep bandwidth{15.0, 60.0, 10};
};

struct AdmmSweepParams {
  std::size_t segments = 5;
  Range density{0.02, 0.1};  ///< vehicles per meter
  std::vector<double> deltas;
  admm::AdmmConfig solver;   ///< delta is overwritten per sweep point
};

struct CaRunSpec {
  int s_star = 10;
  int initial_spacing = 0;
  int initial_fill_speed = -1;
};

struct CaRelationsParams {
  ca::CaConfig base;
  int steps = 100;
  double omega = 1000.0;
  /// Dd transient probe: early window [0, split], late window [split, steps].
  CaRunSpec probe;
  int split = 20;
  std::vector<int> sweep_s_star{5, 10, 15, 20};
  int sweep_initial_spacing = 0;
  int sweep_initial_fill_speed = -1;
};

struct PolicyComparisonParams {
  smto::PolicyScenario platoon;
  std::vector<smto::PolicyKind> policies{std::begin(smto::kAllPolicies),
                                         std::end(smto::kAllPolicies)};
};

struct Scenario {
  std::string name;
  ExperimentKind kind = ExperimentKind::BoundSurface;
  std::vector<std::uint64_t> seeds;
  netcalc::MacParams mac;
  BoundSurfaceParams bound;
  AdmmSweepParams admm;
  CaRelationsParams ca;
  PolicyComparisonParams policy;
};

struct Issue {
  enum class Severity { Error, Warning } severity = Severity::Error;
  std::string field;
  std::string message;
};

std::string format_issue(const Issue& issue);

/// Every problem found in a scenario document. Never throws on bad input.
std::vector<Issue> validate(const nlohmann::json& doc);

bool has_errors(const std::vector<Issue>& issues);

/// Thrown by load/parse when validation reports errors; what() lists them all.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

/// Validates and converts. Throws ScenarioError on any error-level issue.
Scenario parse_scenario(const nlohmann::json& doc);

/// Reads a JSON file; parse failures become a ScenarioError too.
nlohmann::json read_scenario_file(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

/// Replaces the seed list with `reps` consecutive seeds starting at `seed`.
void override_seeds(Scenario& sc, std::uint64_t seed, std::size_t reps);

}  // namespace platoon::harness
