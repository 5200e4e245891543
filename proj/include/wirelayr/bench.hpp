#pragma once

#include <string>
#include <vector>

#include "wirelayr/layout.hpp"
#include "wirelayr/synth.hpp"

namespace wirelayr::bench {

using diagram::Length;

struct BenchRow {
  std::string file;
  std::uint64_t seed = 0;
  std::string status;
  std::int64_t objective = -1;  // -1 when no incumbent
  double wall_s = 0.0;
  std::int64_t nodes = 0;
  std::int64_t lazy_rows = 0;
};

/// One benchmark cell (#c,#b,#n,delta) with per-instance rows and the Table-1
/// style aggregates: mean wall time over solved instances and #Feas.
struct BenchRecord {
  int pipelines = 0;
  int branches = 0;
  int nodes = 0;
  Length delta = 0;
  std::vector<BenchRow> rows;
  double mean_time_solved = 0.0;
  int feasible = 0;

  void finalize();
};

struct BenchParams {
  double time_limit_s = 60.0;
  int jobs = 1;
};

/// Runs every instance of the suite (discretize, model, solve, validate) with
/// a per-instance time limit; instances run in parallel workers and results
/// merge deterministically by cell then seed. Wall times are measured, so only
/// the timing columns vary across runs.
std::vector<BenchRecord> run_bench(const synth::SuiteManifest& manifest,
                                   const std::string& suite_dir, const BenchParams& params);

/// Per-instance rows: one CSV line per (cell, instance).
void write_records_csv(const std::vector<BenchRecord>& records, std::ostream& out);

/// Cell table mirroring the benchmark layout: one row per (#c,#b,#n) with
/// (Time, #Feas) column pairs per delta, in ascending delta order.
void write_cell_table_csv(const std::vector<BenchRecord>& records, std::ostream& out);

void write_bench_files(const std::vector<BenchRecord>& records, const std::string& prefix);

}  // namespace wirelayr::bench
