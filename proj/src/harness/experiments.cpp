#include "platoon/experiments.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "platoon/admm.hpp"
#include "platoon/ca.hpp"
#include "platoon/csv.hpp"
#include "platoon/errors.hpp"
#include "platoon/netcalc.hpp"
#include "platoon/platoon_sim.hpp"
#include "platoon/rng.hpp"

namespace platoon::harness {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream 1 of each replication seed draws the experiment's random inputs.
constexpr std::uint64_t kInputStream = 1;

void add(ReplicationSummary& s, std::string name, double value) {
  s.names.push_back(std::move(name));
  s.values.push_back(value);
}

ReplicationOutput bound_surface(const Scenario& sc, std::uint64_t seed) {
  const auto& b = sc.bound;
  Rng rng(seed, kInputStream);
  std::vector<netcalc::AppProfile> apps(b.apps);
  for (std::size_t k = 0; k < b.apps; ++k) {
    apps[k].id = static_cast<int>(k) + 1;
    apps[k].priority = apps[k].id;
    apps[k].o = rng.uniform(b.o.lo, b.o.hi);
    apps[k].lam = rng.uniform(b.lam.lo, b.lam.hi);
    apps[k].eta = b.eta;
  }
  const auto& app = apps[b.app_index];
  const auto ct = netcalc::cross_traffic(b.vehicles, apps, b.app_index);
  const auto thetas = b.theta.values();
  const auto rates = b.bandwidth.values();

  std::ostringstream csv;
  CsvWriter w(csv);
  w.header({"theta", "bandwidth", "computing", "transmission", "competition", "protocol", "total"});
  std::vector<std::vector<double>> grid(thetas.size(), std::vector<double>(rates.size(), kInf));
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    for (std::size_t j = 0; j < rates.size(); ++j) {
      netcalc::DelayBreakdown d{kInf, kInf, kInf, kInf};
      try {
        d = netcalc::delay_bound(app, {thetas[i], thetas[i]}, rates[j], sc.mac, ct);
        grid[i][j] = d.total();
      } catch (const SaturatedLink&) {
      }
      w.field(thetas[i]).field(rates[j]).field(d.computing).field(d.transmission);
      w.field(d.competition).field(d.protocol).field(grid[i][j]);
      w.end_row();
    }
  }

  double lo = kInf, hi = 0.0;
  std::int64_t violations = 0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    for (std::size_t j = 0; j < rates.size(); ++j) {
      if (std::isfinite(grid[i][j])) {
        lo = std::min(lo, grid[i][j]);
        hi = std::max(hi, grid[i][j]);
      }
      if (i > 0 && grid[i][j] > grid[i - 1][j]) ++violations;
      if (j > 0 && grid[i][j] > grid[i][j - 1]) ++violations;
    }
  }
  ReplicationOutput out;
  out.summary.seed = seed;
  add(out.summary, "t_min", std::isfinite(lo) ? lo : kNaN);
  add(out.summary, "t_max", std::isfinite(lo) ? hi : kNaN);
  add(out.summary, "h_lambda", ct.h_lam);
  add(out.summary, "monotone_violations", static_cast<double>(violations));
  out.csv = csv.str();
  return out;
}

ReplicationOutput admm_sweep(const Scenario& sc, std::uint64_t seed) {
  const auto& a = sc.admm;
  Rng rng(seed, kInputStream);
  std::vector<double> spacings(a.segments);
  double mean = 0.0;
  for (auto& s : spacings) {
    s = 1.0 / rng.uniform(a.density.lo, a.density.hi);
    mean += s;
  }
  mean /= static_cast<double>(spacings.size());

  std::ostringstream csv;
  CsvWriter w(csv);
  w.header({"delta", "iter", "z", "mean_s_star", "r_sq", "dr_sq"});
  ReplicationOutput out;
  out.summary.seed = seed;
  add(out.summary, "mean_spacing", mean);
  for (double delta : a.deltas) {
    admm::AdmmConfig cfg = a.solver;
    cfg.delta = delta;
    auto trace = [&](const admm::AdmmState& st, const admm::Residuals& r) {
      double m = 0.0;
      for (double s : st.s_star) m += s;
      m /= static_cast<double>(st.s_star.size());
      w.field(delta).field(st.iter).field(st.z).field(m).field(r.r_sq).field(r.dr_sq);
      w.end_row();
    };
    const auto res = admm::solve(cfg, spacings, std::nullopt, trace);
    double m = 0.0;
    for (double s : res.state.s_star) m += s;
    m /= static_cast<double>(res.state.s_star.size());
    const std::string tag = "_d" + format_number(delta);
    add(out.summary, "s_mean" + tag, m);
    add(out.summary, "iters" + tag, static_cast<double>(res.state.iter));
    add(out.summary, "converged" + tag, res.converged ? 1.0 : 0.0);
  }
  out.csv = csv.str();
  return out;
}

void write_ca_rows(CsvWriter& w, const char* run, int s_star, const ca::CaRun& r) {
  for (const auto& row : r.rows) {
    w.field(run).field(s_star).field(row.t).field(row.mean_spacing).field(row.dd);
    w.field(row.throughput).field(row.density).field(row.d_s).field(row.congestion_events);
    w.field(row.vehicles);
    w.end_row();
  }
}

ReplicationOutput ca_relations(const Scenario& sc, std::uint64_t seed) {
  const auto& c = sc.ca;
  std::ostringstream csv;
  CsvWriter w(csv);
  w.header({"run", "s_star", "t", "mean_spacing", "dd", "throughput", "density", "d_s",
            "congestion_events", "vehicles"});
  ReplicationOutput out;
  out.summary.seed = seed;

  ca::CaConfig probe = c.base;
  probe.seed = seed;
  probe.s_star = c.probe.s_star;
  probe.initial_spacing = c.probe.initial_spacing;
  probe.initial_fill_speed = c.probe.initial_fill_speed;
  const auto pr = ca::run(probe, c.steps, c.omega);
  write_ca_rows(w, "probe", probe.s_star, pr);
  const double early = ca::summarize(pr, 0, c.split).mean_dd;
  const double late = ca::summarize(pr, c.split, c.steps).mean_dd;
  add(out.summary, "dd_early", early);
  add(out.summary, "dd_late", late);
  add(out.summary, "dd_settled", late < early ? 1.0 : 0.0);

  for (int s_star : c.sweep_s_star) {
    ca::CaConfig cfg = c.base;
    cfg.seed = seed;
    cfg.s_star = s_star;
    cfg.initial_spacing = c.sweep_initial_spacing;
    cfg.initial_fill_speed = c.sweep_initial_fill_speed;
    const auto r = ca::run(cfg, c.steps, c.omega);
    write_ca_rows(w, "sweep", s_star, r);
    const auto s = ca::summarize(r, 1, c.steps);
    std::int64_t contacts = static_cast<std::int64_t>(r.congestion_log.size());
    const std::string tag = "_s" + std::to_string(s_star);
    add(out.summary, "throughput" + tag, s.mean_throughput);
    add(out.summary, "d_s" + tag, s.mean_d_s);
    add(out.summary, "spacing" + tag, s.mean_spacing);
    add(out.summary, "congestion" + tag, static_cast<double>(contacts));
  }
  out.csv = csv.str();
  return out;
}

ReplicationOutput policy_comparison(const Scenario& sc, std::uint64_t seed) {
  std::ostringstream csv;
  CsvWriter w(csv);
  w.header({"seed", "policy", "epoch", "acceptance_ratio", "mean_reward", "mean_delay_s",
            "placements", "rejections"});
  ReplicationOutput out;
  out.summary.seed = seed;
  for (auto policy : sc.policy.policies) {
    const auto r = smto::run_policy_replication(sc.policy.platoon, policy, seed);
    const std::string name(smto::to_string(policy));
    for (const auto& e : r.epochs) {
      w.field(seed).field(name).field(e.epoch).field(e.acceptance_ratio).field(e.mean_reward);
      w.field(e.mean_delay).field(e.placements).field(e.rejections);
      w.end_row();
    }
    add(out.summary, name + "_reward", r.mean_reward);
    add(out.summary, name + "_ar", r.acceptance_ratio);
    add(out.summary, name + "_delay", r.mean_delay);
  }
  out.csv = csv.str();
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("short write to " + path.string());
}

double parse_number(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("not a number: '" + s + "'");
  }
  return x;
}

}  // namespace

double ReplicationSummary::get(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw std::out_of_range("no metric named '" + name + "'");
}

std::vector<double> ExperimentResult::column(const std::string& metric) const {
  std::vector<double> out;
  out.reserve(replications.size());
  for (const auto& r : replications) out.push_back(r.get(metric));
  return out;
}

ReplicationOutput run_replication(const Scenario& sc, std::uint64_t seed) {
  switch (sc.kind) {
    case ExperimentKind::BoundSurface: return bound_surface(sc, seed);
    case ExperimentKind::AdmmSweep: return admm_sweep(sc, seed);
    case ExperimentKind::CaRelations: return ca_relations(sc, seed);
    case ExperimentKind::PolicyComparison: return policy_comparison(sc, seed);
  }
  throw DomainError("unknown experiment kind");
}

std::vector<MetricAggregate> aggregate_summaries(const std::vector<ReplicationSummary>& reps) {
  std::vector<MetricAggregate> out;
  if (reps.empty()) return out;
  for (std::size_t m = 0; m < reps.front().names.size(); ++m) {
    std::vector<double> xs;
    for (const auto& r : reps) {
      if (r.names.size() != reps.front().names.size() || r.names[m] != reps.front().names[m]) {
        throw DomainError("replications report different metrics");
      }
      if (std::isfinite(r.values[m])) xs.push_back(r.values[m]);
    }
    MetricAggregate a;
    a.metric = reps.front().names[m];
    if (xs.empty()) {
      a.stats = {0, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    } else {
      a.stats = aggregate(xs);
    }
    out.push_back(std::move(a));
  }
  return out;
}

void write_replications_csv(std::ostream& os, const std::vector<ReplicationSummary>& reps) {
  CsvWriter w(os);
  w.field("seed");
  if (!reps.empty()) {
    for (const auto& n : reps.front().names) w.field(n);
  }
  w.end_row();
  for (const auto& r : reps) {
    w.field(r.seed);
    for (double v : r.values) w.field(v);
    w.end_row();
  }
}

void write_aggregate_csv(std::ostream& os, const std::vector<MetricAggregate>& agg) {
  CsvWriter w(os);
  w.header({"metric", "n", "mean", "variance", "min", "q1", "median", "q3", "max"});
  for (const auto& a : agg) {
    const auto& s = a.stats;
    w.field(a.metric).field(static_cast<std::uint64_t>(s.n)).field(s.mean).field(s.variance);
    w.field(s.min).field(s.q1).field(s.median).field(s.q3).field(s.max);
    w.end_row();
  }
}

std::vector<ReplicationSummary> read_replications_csv(std::istream& is) {
  const CsvTable t = read_csv(is);
  if (t.columns.empty() || t.columns.front() != "seed") {
    throw std::runtime_error("replications table must start with a seed column");
  }
  std::vector<ReplicationSummary> out;
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw std::runtime_error("ragged replications table");
    ReplicationSummary s;
    s.seed = std::stoull(row[0]);
    for (std::size_t i = 1; i < row.size(); ++i) {
      s.names.push_back(t.columns[i]);
      s.values.push_back(parse_number(row[i]));
    }
    out.push_back(std::move(s));
  }
  return out;
}

ExperimentResult run_experiment(const Scenario& sc, const RunOptions& opts) {
  const std::size_t n = sc.seeds.size();
  std::vector<ReplicationOutput> outputs(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex progress_mu;

  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outputs[i] = run_replication(sc, sc.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      if (opts.progress) {
        std::lock_guard lock(progress_mu);
        *opts.progress << to_string(sc.kind) << ": seed " << sc.seeds[i]
                       << (errors[i] ? " failed\n" : " done\n");
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult res;
  for (auto& o : outputs) res.replications.push_back(std::move(o.summary));
  res.aggregate = aggregate_summaries(res.replications);

  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    for (std::size_t i = 0; i < n; ++i) {
      auto p = opts.out_dir / (sc.name + "_seed" + std::to_string(sc.seeds[i]) + ".csv");
      write_file(p, outputs[i].csv);
      res.files.push_back(p);
    }
    std::ostringstream reps, agg;
    write_replications_csv(reps, res.replications);
    write_aggregate_csv(agg, res.aggregate);
    auto rp = opts.out_dir / (sc.name + "_replications.csv");
    auto ap = opts.out_dir / (sc.name + "_aggregate.csv");
    write_file(rp, reps.str());
    write_file(ap, agg.str());
    res.files.push_back(rp);
    res.files.push_back(ap);
  }
  return res;
}

}  // namespace platoon::harness
