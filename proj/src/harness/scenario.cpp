#include "platoon/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "platoon/errors.hpp"

namespace platoon::harness {

using nlohmann::json;

namespace {

/// Reads optional fields out of a JSON object, recording type problems and
/// leaving the destination at its default.
class Reader {
 public:
  explicit Reader(std::vector<Issue>& issues) : issues_(issues) {}

  void error(const std::string& field, const std::string& msg) {
    issues_.push_back({Issue::Severity::Error, field, msg});
  }
  void warning(const std::string& field, const std::string& msg) {
    issues_.push_back({Issue::Severity::Warning, field, msg});
  }

  const json* object(const json& parent, const std::string& key, const std::string& path) {
    auto it = parent.find(key);
    if (it == parent.end()) return nullptr;
    if (!it->is_object()) {
      error(path, "must be an object");
      return nullptr;
    }
    return &*it;
  }

  void number(const json& obj, const char* key, const std::string& path, double& dst) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number()) return error(path, "must be a number");
    dst = it->get<double>();
  }

  template <typename Int>
  void integer(const json& obj, const char* key, const std::string& path, Int& dst) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_integer()) return error(path, "must be an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (it->is_number_unsigned() || it->get<std::int64_t>() >= 0) {
        dst = it->get<Int>();
      } else {
        error(path, "must be >= 0");
      }
    } else {
      dst = it->get<Int>();
    }
  }

  void boolean(const json& obj, const char* key, const std::string& path, bool& dst) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_boolean()) return error(path, "must be true or false");
    dst = it->get<bool>();
  }

  void range(const json& obj, const char* key, const std::string& path, Range& dst) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      return error(path, "must be a [lo, hi] pair of numbers");
    }
    dst = {(*it)[0].get<double>(), (*it)[1].get<double>()};
  }

  void sweep(const json& obj, const char* key, const std::string& path, Sweep& dst) {
    const json* s = object(obj, key, path);
    if (!s) return;
    number(*s, "from", path + ".from", dst.from);
    number(*s, "to", path + ".to", dst.to);
    integer(*s, "steps", path + ".steps", dst.steps);
  }

  template <typename T>
  void array(const json& obj, const char* key, const std::string& path, std::vector<T>& dst) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_array()) return error(path, "must be an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& e = (*it)[i];
      const std::string p = path + "[" + std::to_string(i) + "]";
      if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer()) return error(p, "must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (!e.is_number_unsigned()) return error(p, "must be >= 0");
        }
      } else {
        if (!e.is_number()) return error(p, "must be a number");
      }
      out.push_back(e.get<T>());
    }
    dst = std::move(out);
  }

  void require(bool ok, const std::string& field, const std::string& msg) {
    if (!ok) error(field, msg);
  }

 private:
  std::vector<Issue>& issues_;
};

ExperimentKind parse_kind(const std::string& s, bool& ok) {
  ok = true;
  if (s == "bound_surface") return ExperimentKind::BoundSurface;
  if (s == "admm_sweep") return ExperimentKind::AdmmSweep;
  if (s == "ca_relations") return ExperimentKind::CaRelations;
  if (s == "policy_comparison") return ExperimentKind::PolicyComparison;
  ok = false;
  return ExperimentKind::BoundSurface;
}

void check_range(Reader& r, const Range& x, const std::string& path, bool strictly_positive) {
  if (strictly_positive) {
    r.require(x.lo > 0.0, path, "lower end must be > 0");
  } else {
    r.require(x.lo >= 0.0, path, "lower end must be >= 0");
  }
  r.require(x.hi >= x.lo, path, "upper end must be >= lower end");
}

void check_sweep(Reader& r, const Sweep& s, const std::string& path) {
  r.require(s.from > 0.0, path + ".from", "must be > 0");
  r.require(s.to >= s.from, path + ".to", "must be >= from");
  r.require(s.steps >= 1, path + ".steps", "must be >= 1");
}

void read_mac(Reader& r, const json& doc, netcalc::MacParams& mac) {
  if (const json* m = r.object(doc, "mac", "mac")) {
    r.number(*m, "w0", "mac.w0", mac.w0);
    r.integer(*m, "gamma", "mac.gamma", mac.gamma);
    r.integer(*m, "eps", "mac.eps", mac.eps);
  }
  r.require(mac.w0 > 0.0, "mac.w0", "must be > 0");
  r.require(mac.gamma >= 1, "mac.gamma", "must be >= 1");
  r.require(mac.eps >= 1, "mac.eps", "must be >= 1");
  r.require(mac.eps <= mac.gamma, "mac.eps", "eps exceeds gamma");
  r.require(mac.gamma <= 30, "mac.gamma", "must be <= 30");
}

void read_bound(Reader& r, const json& doc, const netcalc::MacParams&, BoundSurfaceParams& b) {
  if (const json* s = r.object(doc, "bound", "bound")) {
    r.integer(*s, "vehicles", "bound.vehicles", b.vehicles);
    r.integer(*s, "apps", "bound.apps", b.apps);
    r.range(*s, "o", "bound.o", b.o);
    r.range(*s, "lam", "bound.lam", b.lam);
    r.number(*s, "eta", "bound.eta", b.eta);
    r.integer(*s, "app_index", "bound.app_index", b.app_index);
    r.sweep(*s, "theta", "bound.theta", b.theta);
    r.sweep(*s, "bandwidth", "bound.bandwidth", b.bandwidth);
  }
  r.require(b.vehicles >= 1, "bound.vehicles", "must be >= 1");
  r.require(b.apps >= 1, "bound.apps", "must be >= 1");
  r.require(b.app_index < b.apps, "bound.app_index", "must index one of the applications");
  check_range(r, b.o, "bound.o", true);
  check_range(r, b.lam, "bound.lam", false);
  r.require(b.eta >= 0.0, "bound.eta", "must be >= 0");
  check_sweep(r, b.theta, "bound.theta");
  check_sweep(r, b.bandwidth, "bound.bandwidth");

  // Worst-case load of all N vehicles running every application against the
  // smallest swept bandwidth.
  const double load = static_cast<double>(b.vehicles) * static_cast<double>(b.apps) * b.lam.hi;
  if (load > b.bandwidth.from) {
    std::ostringstream msg;
    msg << "admission: N * sum(lambda) can reach " << load << " Mb/s, above R = "
        << b.bandwidth.from << " Mb/s; the bound is infinite wherever R <= H_lambda";
    r.warning("bound.bandwidth.from", msg.str());
  }
}

void read_admm(Reader& r, const json& doc, AdmmSweepParams& a) {
  a.deltas = {1, 5, 10, 20, 40, 50};
  if (const json* s = r.object(doc, "admm", "admm")) {
    r.integer(*s, "segments", "admm.segments", a.segments);
    r.range(*s, "density", "admm.density", a.density);
    r.array(*s, "deltas", "admm.deltas", a.deltas);
    r.number(*s, "mu", "admm.mu", a.solver.mu);
    r.number(*s, "eps_prim", "admm.eps_prim", a.solver.eps_prim);
    r.number(*s, "eps_dual", "admm.eps_dual", a.solver.eps_dual);
    r.integer(*s, "max_iter", "admm.max_iter", a.solver.max_iter);
    r.boolean(*s, "textbook_update", "admm.textbook_update", a.solver.textbook_update);
  }
  r.require(a.segments >= 1, "admm.segments", "must be >= 1");
  r.require(a.density.lo > 0.0, "admm.density", "density rho must be > 0");
  r.require(a.density.hi >= a.density.lo, "admm.density", "upper end must be >= lower end");
  r.require(!a.deltas.empty(), "admm.deltas", "must list at least one delta");
  for (std::size_t i = 0; i < a.deltas.size(); ++i) {
    r.require(a.deltas[i] >= 0.0, "admm.deltas[" + std::to_string(i) + "]", "must be >= 0");
  }
  r.require(a.solver.mu > 0.0, "admm.mu", "must be > 0");
  r.require(a.solver.eps_prim > 0.0, "admm.eps_prim", "must be > 0");
  r.require(a.solver.eps_dual > 0.0, "admm.eps_dual", "must be > 0");
  r.require(a.solver.max_iter >= 1, "admm.max_iter", "must be >= 1");
}

void check_ca_config(Reader& r, const ca::CaConfig& c) {
  r.require(c.length >= 2, "ca.length", "must be >= 2");
  r.require(c.lanes >= 1, "ca.lanes", "must be >= 1");
  r.require(c.v_max >= 1, "ca.v_max", "must be >= 1");
  r.require(c.arrival_rate >= 0.0 && c.arrival_rate <= c.lanes, "ca.arrival_rate",
            "must be in [0, lanes]");
  r.require(c.initial_speed >= 0 && c.initial_speed <= c.v_max, "ca.initial_speed",
            "must be in [0, v_max]");
  r.require(c.lane_change_prob >= 0.0 && c.lane_change_prob <= 1.0, "ca.lane_change_prob",
            "must be in [0, 1]");
}

void check_ca_run(Reader& r, const ca::CaConfig& base, int s_star, int spacing, int fill,
                  const std::string& path) {
  r.require(s_star >= 1, path + ".s_star", "must be >= 1");
  r.require(spacing >= 0, path + ".initial_spacing", "must be >= 0");
  r.require(fill == -1 || (fill >= 0 && fill <= base.v_max), path + ".initial_fill_speed",
            "must be -1 or in [0, v_max]");
}

void read_ca(Reader& r, const json& doc, CaRelationsParams& c) {
  if (const json* s = r.object(doc, "ca", "ca")) {
    r.integer(*s, "length", "ca.length", c.base.length);
    r.integer(*s, "lanes", "ca.lanes", c.base.lanes);
    r.integer(*s, "v_max", "ca.v_max", c.base.v_max);
    r.number(*s, "arrival_rate", "ca.arrival_rate", c.base.arrival_rate);
    r.integer(*s, "initial_speed", "ca.initial_speed", c.base.initial_speed);
    r.number(*s, "lane_change_prob", "ca.lane_change_prob", c.base.lane_change_prob);
    r.integer(*s, "steps", "ca.steps", c.steps);
    r.number(*s, "omega", "ca.omega", c.omega);
    r.integer(*s, "split", "ca.split", c.split);
    if (const json* p = r.object(*s, "probe", "ca.probe")) {
      r.integer(*p, "s_star", "ca.probe.s_star", c.probe.s_star);
      r.integer(*p, "initial_spacing", "ca.probe.initial_spacing", c.probe.initial_spacing);
      r.integer(*p, "initial_fill_speed", "ca.probe.initial_fill_speed",
                c.probe.initial_fill_speed);
    }
    if (const json* w = r.object(*s, "sweep", "ca.sweep")) {
      r.array(*w, "s_star", "ca.sweep.s_star", c.sweep_s_star);
      r.integer(*w, "initial_spacing", "ca.sweep.initial_spacing", c.sweep_initial_spacing);
      r.integer(*w, "initial_fill_speed", "ca.sweep.initial_fill_speed",
                c.sweep_initial_fill_speed);
    }
  }
  check_ca_config(r, c.base);
  r.require(c.steps >= 2, "ca.steps", "measurement window must be >= 2 steps");
  r.require(c.omega > 0.0, "ca.omega", "must be > 0");
  r.require(c.split >= 1 && c.split < c.steps, "ca.split", "must be in [1, steps)");
  check_ca_run(r, c.base, c.probe.s_star, c.probe.initial_spacing, c.probe.initial_fill_speed,
               "ca.probe");
  r.require(!c.sweep_s_star.empty(), "ca.sweep.s_star", "must list at least one value");
  for (std::size_t i = 0; i < c.sweep_s_star.size(); ++i) {
    r.require(c.sweep_s_star[i] >= 1, "ca.sweep.s_star[" + std::to_string(i) + "]",
              "must be >= 1");
  }
  check_ca_run(r, c.base, 1, c.sweep_initial_spacing, c.sweep_initial_fill_speed, "ca.sweep");
}

void read_policy(Reader& r, const json& doc, const netcalc::MacParams& mac,
                 PolicyComparisonParams& p) {
  auto& sc = p.platoon;
  sc.mac = mac;
  if (const json* s = r.object(doc, "policy", "policy")) {
    r.integer(*s, "platoon_cap", "policy.platoon_cap", sc.platoon_cap);
    r.integer(*s, "initial_vehicles", "policy.initial_vehicles", sc.initial_vehicles);
    r.number(*s, "source_theta", "policy.source_theta", sc.source_theta);
    r.number(*s, "leave_rate", "policy.leave_rate", sc.churn.rate);
    Range theta{sc.churn.theta_lo, sc.churn.theta_hi};
    r.range(*s, "theta", "policy.theta", theta);
    sc.churn.theta_lo = theta.lo;
    sc.churn.theta_hi = theta.hi;
    Range eff{sc.churn.efficiency_lo, sc.churn.efficiency_hi};
    r.range(*s, "efficiency", "policy.efficiency", eff);
    sc.churn.efficiency_lo = eff.lo;
    sc.churn.efficiency_hi = eff.hi;
    r.number(*s, "bandwidth", "policy.bandwidth", sc.bandwidth);
    Range o{sc.o_lo, sc.o_hi}, tau{sc.tau_lo, sc.tau_hi}, lam{sc.lam_lo, sc.lam_hi};
    r.range(*s, "o", "policy.o", o);
    r.range(*s, "tau", "policy.tau", tau);
    r.range(*s, "lam", "policy.lam", lam);
    sc.o_lo = o.lo, sc.o_hi = o.hi;
    sc.tau_lo = tau.lo, sc.tau_hi = tau.hi;
    sc.lam_lo = lam.lo, sc.lam_hi = lam.hi;
    r.number(*s, "eta", "policy.eta", sc.eta);
    r.array(*s, "rewards", "policy.rewards", sc.rewards);
    sc.apps = sc.rewards.size();
    r.number(*s, "slot_theta", "policy.slot_theta", sc.slot_theta);
    r.integer(*s, "epochs", "policy.epochs", sc.epochs);
    r.boolean(*s, "inverted_width", "policy.inverted_width", sc.select.inverted_width);
    if (auto it = s->find("policies"); it != s->end()) {
      if (!it->is_array() || it->empty()) {
        r.error("policy.policies", "must be a non-empty array of policy names");
      } else {
        p.policies.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
          const std::string path = "policy.policies[" + std::to_string(i) + "]";
          if (!(*it)[i].is_string()) {
            r.error(path, "must be a string");
            continue;
          }
          try {
            p.policies.push_back(smto::parse_policy((*it)[i].get<std::string>()));
          } catch (const DomainError& e) {
            r.error(path, e.what());
          }
        }
      }
    }
  }
  r.require(sc.platoon_cap >= 2, "policy.platoon_cap", "must be >= 2");
  r.require(sc.initial_vehicles >= 1 && sc.initial_vehicles <= sc.platoon_cap,
            "policy.initial_vehicles", "must be in [1, platoon_cap]");
  r.require(sc.source_theta > 0.0, "policy.source_theta", "must be > 0");
  r.require(sc.churn.rate >= 0.0, "policy.leave_rate", "must be >= 0");
  check_range(r, {sc.churn.theta_lo, sc.churn.theta_hi}, "policy.theta", true);
  check_range(r, {sc.churn.efficiency_lo, sc.churn.efficiency_hi}, "policy.efficiency", true);
  r.require(sc.bandwidth > 0.0, "policy.bandwidth", "must be > 0");
  check_range(r, {sc.o_lo, sc.o_hi}, "policy.o", true);
  check_range(r, {sc.tau_lo, sc.tau_hi}, "policy.tau", true);
  check_range(r, {sc.lam_lo, sc.lam_hi}, "policy.lam", false);
  r.require(sc.eta >= 0.0, "policy.eta", "must be >= 0");
  r.require(!sc.rewards.empty(), "policy.rewards", "must list one reward per application");
  r.require(sc.slot_theta > 0.0, "policy.slot_theta", "must be > 0");
  r.require(sc.epochs >= 1, "policy.epochs", "must be >= 1");

  const double load = static_cast<double>(sc.apps) * sc.lam_hi;
  if (load > sc.bandwidth) {
    std::ostringstream msg;
    msg << "admission: N * sum(lambda) can reach " << load << " Mb/s, above R = "
        << sc.bandwidth << " Mb/s; targets become unreachable when the link saturates";
    r.warning("policy.bandwidth", msg.str());
  }
}

void read_seeds(Reader& r, const json& doc, std::vector<std::uint64_t>& seeds) {
  seeds.clear();
  if (doc.contains("seeds")) {
    r.array(doc, "seeds", "seeds", seeds);
    r.require(!seeds.empty(), "seeds", "must list at least one seed");
    std::vector<std::uint64_t> sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    r.require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "seeds",
              "must not repeat a seed");
    if (doc.contains("replications")) {
      r.error("replications", "give either seeds or replications, not both");
    }
    return;
  }
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  r.integer(doc, "seed", "seed", seed);
  r.integer(doc, "replications", "replications", reps);
  r.require(reps >= 1, "replications", "must be >= 1");
  for (std::size_t i = 0; i < reps; ++i) seeds.push_back(seed + i);
}

Scenario read(const json& doc, std::vector<Issue>& issues) {
  Reader r(issues);
  Scenario sc;
  if (!doc.is_object()) {
    r.error("", "scenario must be a JSON object");
    return sc;
  }
  if (auto it = doc.find("name"); it != doc.end()) {
    if (it->is_string()) {
      sc.name = it->get<std::string>();
    } else {
      r.error("name", "must be a string");
    }
  }
  auto kind = doc.find("kind");
  if (kind == doc.end()) {
    r.error("kind", "is required");
  } else if (!kind->is_string()) {
    r.error("kind", "must be a string");
  } else {
    bool ok = false;
    sc.kind = parse_kind(kind->get<std::string>(), ok);
    if (!ok) {
      r.error("kind", "must be one of bound_surface, admm_sweep, ca_relations, policy_comparison");
    }
  }
  if (sc.name.empty()) sc.name = std::string(to_string(sc.kind));
  for (char ch : sc.name) {
    const bool safe = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
    if (!safe) {
      r.error("name", "may only contain letters, digits, '_' and '-'");
      break;
    }
  }
  read_seeds(r, doc, sc.seeds);
  read_mac(r, doc, sc.mac);

  switch (sc.kind) {
    case ExperimentKind::BoundSurface:
      read_bound(r, doc, sc.mac, sc.bound);
      break;
    case ExperimentKind::AdmmSweep:
      read_admm(r, doc, sc.admm);
      break;
    case ExperimentKind::CaRelations:
      read_ca(r, doc, sc.ca);
      break;
    case ExperimentKind::PolicyComparison:
      read_policy(r, doc, sc.mac, sc.policy);
      break;
  }
  return sc;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::BoundSurface: return "bound_surface";
    case ExperimentKind::AdmmSweep: return "admm_sweep";
    case ExperimentKind::CaRelations: return "ca_relations";
    case ExperimentKind::PolicyComparison: return "policy_comparison";
  }
  return "unknown";
}

std::vector<double> Sweep::values() const {
  if (steps <= 1) return {from};
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) {
    out.push_back(from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return out;
}

std::string format_issue(const Issue& issue) {
  std::string s = issue.severity == Issue::Severity::Error ? "error" : "warning";
  s += ": ";
  if (!issue.field.empty()) s += issue.field + ": ";
  return s + issue.message;
}

std::vector<Issue> validate(const json& doc) {
  std::vector<Issue> issues;
  read(doc, issues);
  return issues;
}

bool has_errors(const std::vector<Issue>& issues) {
  for (const auto& i : issues) {
    if (i.severity == Issue::Severity::Error) return true;
  }
  return false;
}

namespace {
std::string join_issues(const std::vector<Issue>& issues) {
  std::string s = "invalid scenario";
  for (const auto& i : issues) {
    if (i.severity == Issue::Severity::Error) s += "\n  " + format_issue(i);
  }
  return s;
}
}  // namespace

ScenarioError::ScenarioError(std::vector<Issue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

Scenario parse_scenario(const json& doc) {
  std::vector<Issue> issues;
  Scenario sc = read(doc, issues);
  if (has_errors(issues)) throw ScenarioError(std::move(issues));
  return sc;
}

json read_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({{Issue::Severity::Error, "", "cannot open " + path.string()}});
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ScenarioError({{Issue::Severity::Error, "", path.string() + ": " + e.what()}});
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_scenario_file(path));
}

void override_seeds(Scenario& sc, std::uint64_t seed, std::size_t reps) {
  if (reps == 0) throw DomainError("reps must be >= 1");
  sc.seeds.clear();
  for (std::size_t i = 0; i < reps; ++i) sc.seeds.push_back(seed + i);
}

}  // namespace platoon::harness
