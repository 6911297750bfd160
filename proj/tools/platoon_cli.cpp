// Batch front end: one-shot evaluations plus scenario-driven experiments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "platoon/admm.hpp"
#include "platoon/ca.hpp"
#include "platoon/csv.hpp"
#include "platoon/errors.hpp"
#include "platoon/experiments.hpp"
#include "platoon/netcalc.hpp"
#include "platoon/scenario.hpp"

namespace fs = std::filesystem;
using namespace platoon;

namespace {

struct CommonFlags {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string out;
  std::size_t workers = 1;
  bool trace = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario file (JSON)");
  cmd->add_option("--seed", f.seed, "First seed; replaces the scenario's seed list");
  cmd->add_option("--reps", f.reps, "Number of replications");
  cmd->add_option("--out", f.out, "Output directory (file for one-shot runs)");
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--trace", f.trace, "Print per-iteration or per-replication progress");
}

/// Output stream: the --out file when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void print_issues(const std::vector<harness::Issue>& issues) {
  for (const auto& i : issues) std::cerr << harness::format_issue(i) << '\n';
}

int run_scenario(const CommonFlags& f, harness::ExperimentKind expected) {
  const auto doc = harness::read_scenario_file(f.scenario);
  const auto issues = harness::validate(doc);
  print_issues(issues);
  if (harness::has_errors(issues)) return 2;
  auto sc = harness::parse_scenario(doc);
  if (sc.kind != expected) {
    std::cerr << "error: scenario kind is " << harness::to_string(sc.kind) << ", this command runs "
              << harness::to_string(expected) << '\n';
    return 2;
  }
  if (f.seed || f.reps) {
    harness::override_seeds(sc, f.seed.value_or(sc.seeds.front()), f.reps.value_or(sc.seeds.size()));
  }
  harness::RunOptions opts;
  opts.out_dir = f.out.empty() ? fs::path("results") : fs::path(f.out);
  opts.workers = f.workers;
  if (f.trace) opts.progress = &std::cerr;
  const auto res = harness::run_experiment(sc, opts);
  harness::write_aggregate_csv(std::cout, res.aggregate);
  std::cerr << "wrote " << res.files.size() << " files to " << opts.out_dir.string() << '\n';
  return 0;
}

std::vector<double> spacings_from(const std::vector<double>& densities,
                                  const std::vector<double>& spacings) {
  if (!spacings.empty()) return spacings;
  std::vector<double> out;
  for (double rho : densities) {
    if (!(rho > 0.0)) throw DomainError("density must be > 0");
    out.push_back(1.0 / rho);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Platoon resource management experiments"};
  app.require_subcommand(1);

  // bound
  CommonFlags bf;
  netcalc::AppProfile tagged;
  tagged.eta = 5.0;
  double theta = 5.0, bandwidth = 10.0;
  netcalc::MacParams mac;
  std::size_t vehicles = 2, k = 1;
  std::vector<double> lam_all{0.5, 0.5}, o_all{1.0, 1.0};
  auto* bound = app.add_subcommand("bound", "Evaluate the offloading delay bound and its four addends");
  add_common(bound, bf);
  bound->add_option("--o", tagged.o, "Data volume of the tagged application, Mb");
  bound->add_option("--eta", tagged.eta, "Compute intensity");
  bound->add_option("--theta", theta, "Computing capacity of the target");
  bound->add_option("--R", bandwidth, "Link bandwidth, Mb/s");
  bound->add_option("--w0", mac.w0, "Base back-off window, s");
  bound->add_option("--gamma", mac.gamma, "Retry limit");
  bound->add_option("--eps", mac.eps, "Back-off doubling limit");
  bound->add_option("--N", vehicles, "Vehicles sharing the link");
  bound->add_option("--k", k, "Tagged application, 1-based index into --lam/--o-all");
  bound->add_option("--lam", lam_all, "Arrival rate of every application, Mb/s")->delimiter(',');
  bound->add_option("--o-all", o_all, "Data volume of every application, Mb")->delimiter(',');

  // admm
  CommonFlags af;
  admm::AdmmConfig acfg;
  std::vector<double> densities, spacings;
  auto* admm_cmd = app.add_subcommand("admm", "Solve the consensus safety-distance problem");
  add_common(admm_cmd, af);
  admm_cmd->add_option("--density", densities, "Per-segment densities, vehicles/m")->delimiter(',');
  admm_cmd->add_option("--spacing", spacings, "Per-segment mean spacings 1/rho, m")->delimiter(',');
  admm_cmd->add_option("--delta", acfg.delta, "Stability weight");
  admm_cmd->add_option("--mu", acfg.mu, "Penalty parameter");
  admm_cmd->add_option("--max-iter", acfg.max_iter, "Iteration cap");
  admm_cmd->add_flag("--textbook", acfg.textbook_update, "Use the textbook s-update");

  // ca
  CommonFlags cf;
  ca::CaConfig ccfg;
  int steps = 100;
  double omega = 1000.0;
  std::string raster;
  auto* ca_cmd = app.add_subcommand("ca", "Run the cellular-automaton highway");
  add_common(ca_cmd, cf);
  ca_cmd->add_option("--s-star", ccfg.s_star, "Safety distance, cells");
  ca_cmd->add_option("--steps", steps, "Steps to simulate");
  ca_cmd->add_option("--omega", omega, "Normalized-gap floor");
  ca_cmd->add_option("--arrival-rate", ccfg.arrival_rate, "Mean entries per step");
  ca_cmd->add_option("--initial-spacing", ccfg.initial_spacing, "Pre-fill spacing, 0 for empty");
  ca_cmd->add_option("--fill-speed", ccfg.initial_fill_speed, "Speed of pre-filled vehicles");
  ca_cmd->add_option("--raster", raster, "Write the final occupancy raster here");

  // sched
  CommonFlags sf;
  auto* sched = app.add_subcommand("sched", "Compare offloading policies on the platoon preset");
  add_common(sched, sf);

  // validate
  CommonFlags vf;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file and list every problem");
  add_common(validate_cmd, vf);
  validate_cmd->get_option("--scenario")->required();

  // report
  CommonFlags rf;
  std::string input;
  auto* report = app.add_subcommand("report", "Aggregate a replications table");
  add_common(report, rf);
  report->add_option("input", input, "A <name>_replications.csv file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bound) {
      if (!bf.scenario.empty()) return run_scenario(bf, harness::ExperimentKind::BoundSurface);
      if (lam_all.size() != o_all.size()) throw DomainError("--lam and --o-all differ in length");
      if (k < 1 || k > lam_all.size()) throw DomainError("--k must index one of the applications");
      std::vector<netcalc::AppProfile> profiles(lam_all.size());
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        profiles[i].id = static_cast<int>(i) + 1;
        profiles[i].lam = lam_all[i];
        profiles[i].o = o_all[i];
        profiles[i].eta = tagged.eta;
      }
      tagged.lam = lam_all[k - 1];
      const auto ct = netcalc::cross_traffic(vehicles, profiles, k - 1);
      const auto d = netcalc::delay_bound(tagged, {theta, theta}, bandwidth, mac, ct);
      Sink sink(bf.out);
      auto& os = sink.os();
      os << "computing " << format_number(d.computing) << '\n'
         << "transmission " << format_number(d.transmission) << '\n'
         << "competition " << format_number(d.competition) << '\n'
         << "protocol " << format_number(d.protocol) << '\n'
         << "total " << format_number(d.total()) << '\n';
      if (bf.trace) {
        std::cerr << "h_lambda " << format_number(ct.h_lam) << " h_o " << format_number(ct.h_o)
                  << '\n';
      }
      return 0;
    }

    if (*admm_cmd) {
      if (!af.scenario.empty()) return run_scenario(af, harness::ExperimentKind::AdmmSweep);
      const auto sp = spacings_from(densities, spacings);
      if (sp.empty()) throw DomainError("give --density or --spacing, or --scenario");
      admm::TraceFn trace;
      if (af.trace) {
        trace = [](const admm::AdmmState& st, const admm::Residuals& r) {
          std::cerr << "iter " << st.iter << " z " << format_number(st.z) << " r2 "
                    << format_number(r.r_sq) << " dr2 " << format_number(r.dr_sq) << '\n';
        };
      }
      const auto res = admm::solve(acfg, sp, std::nullopt, trace);
      Sink sink(af.out);
      CsvWriter w(sink.os());
      w.header({"segment", "spacing", "s_star"});
      for (std::size_t i = 0; i < sp.size(); ++i) {
        w.field(static_cast<std::uint64_t>(i)).field(sp[i]).field(res.state.s_star[i]);
        w.end_row();
      }
      std::cerr << "z " << format_number(res.state.z) << " iterations " << res.state.iter
                << (res.converged ? " converged\n" : " not converged\n");
      return res.converged ? 0 : 1;
    }

    if (*ca_cmd) {
      if (!cf.scenario.empty()) return run_scenario(cf, harness::ExperimentKind::CaRelations);
      ccfg.seed = cf.seed.value_or(1);
      const auto run = ca::run(ccfg, steps, omega);
      Sink sink(cf.out);
      CsvWriter w(sink.os());
      w.header({"t", "mean_spacing", "dd", "throughput", "density", "d_s", "congestion_events"});
      for (const auto& r : run.rows) {
        w.field(r.t).field(r.mean_spacing).field(r.dd).field(r.throughput).field(r.density);
        w.field(r.d_s).field(r.congestion_events);
        w.end_row();
      }
      if (!raster.empty()) {
        // Rerun to the same step count; the run is deterministic.
        ca::CaGrid grid(ccfg);
        Rng rng(ccfg.seed);
        std::ofstream rf_out(raster);
        for (int t = 0; t < steps; ++t) {
          ca::step(grid, ccfg, rng);
          if (cf.trace) {
            rf_out << "t=" << grid.time() << '\n';
            grid.dump_raster(rf_out);
          }
        }
        if (!cf.trace) grid.dump_raster(rf_out);
      }
      return 0;
    }

    if (*sched) {
      CommonFlags f = sf;
      if (f.scenario.empty()) f.scenario = PLATOON_PRESET_DIR "/policy_comparison.json";
      return run_scenario(f, harness::ExperimentKind::PolicyComparison);
    }

    if (*validate_cmd) {
      const auto issues = harness::validate(harness::read_scenario_file(vf.scenario));
      print_issues(issues);
      if (harness::has_errors(issues)) return 1;
      std::cout << "ok\n";
      return 0;
    }

    if (*report) {
      std::ifstream in(input);
      if (!in) throw std::runtime_error("cannot open " + input);
      const auto reps = harness::read_replications_csv(in);
      Sink sink(rf.out);
      harness::write_aggregate_csv(sink.os(), harness::aggregate_summaries(reps));
      return 0;
    }
  } catch (const harness::ScenarioError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
