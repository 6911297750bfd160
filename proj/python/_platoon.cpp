#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "platoon/admm.hpp"
#include "platoon/ca.hpp"
#include "platoon/errors.hpp"
#include "platoon/experiments.hpp"
#include "platoon/netcalc.hpp"
#include "platoon/platoon_sim.hpp"
#include "platoon/resource.hpp"
#include "platoon/scenario.hpp"
#include "platoon/stats.hpp"
#include "platoon/traffic.hpp"

namespace py = pybind11;
using namespace platoon;

namespace {

std::vector<netcalc::AppProfile> profiles_from(const std::vector<double>& lam,
                                               const std::vector<double>& o, double eta) {
  if (lam.size() != o.size()) throw DomainError("lam and o must have the same length");
  std::vector<netcalc::AppProfile> out(lam.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = static_cast<int>(i) + 1;
    out[i].lam = lam[i];
    out[i].o = o[i];
    out[i].eta = eta;
  }
  return out;
}

py::dict breakdown_dict(const netcalc::DelayBreakdown& d) {
  py::dict out;
  out["computing"] = d.computing;
  out["transmission"] = d.transmission;
  out["competition"] = d.competition;
  out["protocol"] = d.protocol;
  out["total"] = d.total();
  return out;
}

}  // namespace

PYBIND11_MODULE(_platoon, m) {
  m.doc() = "Platoon safety-distance, offloading-delay and scheduling models";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SaturatedLink>(m, "SaturatedLink", PyExc_RuntimeError);
  py::register_exception<InfeasibleBudget>(m, "InfeasibleBudget", PyExc_RuntimeError);
  py::register_exception<harness::ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  m.def("safety_distance",
        [](double v, double A, double tau0) { return safety_distance({v, A}, tau0); },
        py::arg("v"), py::arg("A"), py::arg("tau0"));
  m.def("perception_reaction_delay",
        [](double s, double v, double A) { return perception_reaction_delay(s, {v, A}); },
        py::arg("s_star"), py::arg("v"), py::arg("A"));
  m.def("normalized_gap", &normalized_gap, py::arg("gap"), py::arg("omega") = kDefaultOmega);

  m.def("backoff_window_sum",
        [](double w0, int gamma, int eps) { return netcalc::backoff_window_sum({w0, gamma, eps}); },
        py::arg("w0") = 0.2, py::arg("gamma") = 2, py::arg("eps") = 1);

  m.def(
      "delay_bound",
      [](double o, double eta, double theta, double R, std::size_t N, std::size_t k,
         const std::vector<double>& lam, const std::vector<double>& o_all, double w0, int gamma,
         int eps) {
        const auto apps = profiles_from(lam, o_all, eta);
        if (k >= apps.size()) throw DomainError("k must index one of the applications");
        netcalc::AppProfile tagged = apps[k];
        tagged.o = o;
        const auto ct = netcalc::cross_traffic(N, apps, k);
        return breakdown_dict(netcalc::delay_bound(tagged, {theta, theta}, R, {w0, gamma, eps}, ct));
      },
      "Delay bound addends for application k (0-based) of N vehicles.", py::arg("o"),
      py::arg("eta"), py::arg("theta"), py::arg("R"), py::arg("N"), py::arg("k"), py::arg("lam"),
      py::arg("o_all"), py::arg("w0") = 0.2, py::arg("gamma") = 2, py::arg("eps") = 1);

  m.def(
      "required_bandwidth",
      [](double tau0, double o, double eta, double theta, std::size_t N, std::size_t k,
         const std::vector<double>& lam, const std::vector<double>& o_all, double w0, int gamma,
         int eps) {
        const auto apps = profiles_from(lam, o_all, eta);
        if (k >= apps.size()) throw DomainError("k must index one of the applications");
        netcalc::AppProfile tagged = apps[k];
        tagged.o = o;
        const auto ct = netcalc::cross_traffic(N, apps, k);
        return netcalc::required_bandwidth(tagged, {theta, theta}, tau0, {w0, gamma, eps}, ct);
      },
      py::arg("tau0"), py::arg("o"), py::arg("eta"), py::arg("theta"), py::arg("N"), py::arg("k"),
      py::arg("lam"), py::arg("o_all"), py::arg("w0") = 0.2, py::arg("gamma") = 2,
      py::arg("eps") = 1);

  m.def("soft_threshold", &admm::soft_threshold, py::arg("a"), py::arg("kappa"));
  m.def(
      "admm_solve",
      [](const std::vector<double>& spacings, double delta, double mu, double eps_prim,
         double eps_dual, int max_iter, bool textbook_update) {
        admm::AdmmConfig cfg{mu, delta, eps_prim, eps_dual, max_iter, textbook_update};
        const auto r = admm::solve(cfg, spacings);
        py::dict out;
        out["s_star"] = r.state.s_star;
        out["z"] = r.state.z;
        out["iterations"] = r.state.iter;
        out["converged"] = r.converged;
        out["r_sq"] = r.residuals.r_sq;
        out["dr_sq"] = r.residuals.dr_sq;
        return out;
      },
      "Consensus ADMM over per-segment mean spacings 1/rho.", py::arg("spacings"),
      py::arg("delta") = 1.0, py::arg("mu") = 1.0, py::arg("eps_prim") = 1e-6,
      py::arg("eps_dual") = 1e-6, py::arg("max_iter") = 10000, py::arg("textbook_update") = false);

  m.def(
      "ca_run",
      [](int s_star, int steps, std::uint64_t seed, double omega, int initial_spacing,
         int initial_fill_speed, double arrival_rate) {
        ca::CaConfig cfg;
        cfg.s_star = s_star;
        cfg.seed = seed;
        cfg.initial_spacing = initial_spacing;
        cfg.initial_fill_speed = initial_fill_speed;
        cfg.arrival_rate = arrival_rate;
        const auto run = ca::run(cfg, steps, omega);
        py::list rows;
        for (const auto& r : run.rows) {
          py::dict d;
          d["t"] = r.t;
          d["mean_spacing"] = r.mean_spacing;
          d["dd"] = r.dd;
          d["throughput"] = r.throughput;
          d["density"] = r.density;
          d["d_s"] = r.d_s;
          d["congestion_events"] = r.congestion_events;
          d["vehicles"] = r.vehicles;
          rows.append(d);
        }
        return rows;
      },
      py::arg("s_star") = 10, py::arg("steps") = 100, py::arg("seed") = 1,
      py::arg("omega") = 1000.0, py::arg("initial_spacing") = 0,
      py::arg("initial_fill_speed") = -1, py::arg("arrival_rate") = 0.5);

  m.def(
      "run_policy",
      [](const std::string& policy, std::uint64_t seed, int epochs) {
        smto::PolicyScenario sc;
        sc.epochs = epochs;
        const auto r = smto::run_policy_replication(sc, smto::parse_policy(policy), seed);
        py::dict out;
        out["acceptance_ratio"] = r.acceptance_ratio;
        out["mean_reward"] = r.mean_reward;
        out["mean_delay"] = r.mean_delay;
        return out;
      },
      "One replication of the default platoon preset under a policy.", py::arg("policy"),
      py::arg("seed"), py::arg("epochs") = 50);

  m.def(
      "aggregate",
      [](const std::vector<double>& xs) {
        const auto s = aggregate(xs);
        py::dict out;
        out["n"] = s.n;
        out["mean"] = s.mean;
        out["variance"] = s.variance;
        out["min"] = s.min;
        out["q1"] = s.q1;
        out["median"] = s.median;
        out["q3"] = s.q3;
        out["max"] = s.max;
        return out;
      },
      py::arg("values"));

  m.def(
      "validate_scenario",
      [](const std::string& text) {
        std::vector<std::string> out;
        for (const auto& i : harness::validate(nlohmann::json::parse(text))) {
          out.push_back(harness::format_issue(i));
        }
        return out;
      },
      "Every problem in a JSON scenario document, as 'error: ...' / 'warning: ...' lines.",
      py::arg("text"));

  m.def(
      "run_experiment",
      [](const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
         std::optional<std::uint64_t> seed, std::optional<std::size_t> reps, std::size_t workers) {
        auto sc = harness::load_scenario(scenario);
        if (seed || reps) {
          harness::override_seeds(sc, seed.value_or(sc.seeds.front()),
                                  reps.value_or(sc.seeds.size()));
        }
        harness::ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = harness::run_experiment(sc, {out_dir, workers, nullptr});
        }
        py::dict out;
        for (const auto& a : res.aggregate) out[py::str(a.metric)] = a.stats.mean;
        return out;
      },
      "Runs a scenario file, writes its CSVs and returns each metric's mean.", py::arg("scenario"),
      py::arg("out_dir"), py::arg("seed") = py::none(), py::arg("reps") = py::none(),
      py::arg("workers") = 1);
}
