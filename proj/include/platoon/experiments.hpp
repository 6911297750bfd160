#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "platoon/scenario.hpp"
#include "platoon/stats.hpp"

namespace platoon::harness {

/// Scalar results of one replication, in a fixed column order.
struct ReplicationSummary {
  std::uint64_t seed = 0;
  std::vector<std::string> names;
  std::vector<double> values;

  double get(const std::string& name) const;  ///< throws std::out_of_range
};

struct ReplicationOutput {
  ReplicationSummary summary;
  std::string csv;  ///< per-replication detail table
};

/// Runs one replication of the scenario's experiment for one seed.
ReplicationOutput run_replication(const Scenario& sc, std::uint64_t seed);

struct RunOptions {
  std::filesystem::path out_dir;  ///< empty: keep everything in memory
  std::size_t workers = 1;
  std::ostream* progress = nullptr;  ///< one line per finished replication
};

struct MetricAggregate {
  std::string metric;
  AggregateStats stats;  ///< over the finite values only; n may be 0
};

struct ExperimentResult {
  std::vector<ReplicationSummary> replications;  ///< in seed-list order
  std::vector<MetricAggregate> aggregate;
  std::vector<std::filesystem::path> files;

  /// Values of one metric across replications, in seed-list order.
  std::vector<double> column(const std::string& metric) const;
};

/// Runs every seed of the scenario on up to `workers` threads. Results and
/// files do not depend on the worker count. With an out_dir, writes
/// <name>_seed<seed>.csv per replication, <name>_replications.csv and
/// <name>_aggregate.csv.
ExperimentResult run_experiment(const Scenario& sc, const RunOptions& opts = {});

std::vector<MetricAggregate> aggregate_summaries(const std::vector<ReplicationSummary>& reps);

void write_replications_csv(std::ostream& os, const std::vector<ReplicationSummary>& reps);
void write_aggregate_csv(std::ostream& os, const std::vector<MetricAggregate>& agg);

/// Reads a <name>_replications.csv back.
std::vector<ReplicationSummary> read_replications_csv(std::istream& is);

}  // namespace platoon::harness
