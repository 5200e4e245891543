#include "wirelayr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "wirelayr/engine.hpp"
#include "wirelayr/gridgen.hpp"
#include "wirelayr/json_io.hpp"
#include "wirelayr/validate.hpp"

namespace wirelayr::bench {

void BenchRecord::finalize() {
  feasible = 0;
  double time_sum = 0.0;
  int solved = 0;
  for (const BenchRow& r : rows) {
    if (r.status == "optimal" || r.status == "feasible") ++feasible;
    if (r.status == "optimal") {
      time_sum += r.wall_s;
      ++solved;
    }
  }
  mean_time_solved = solved ? time_sum / solved : 0.0;
}

namespace {

BenchRow run_one(const std::string& path, std::uint64_t seed, const BenchParams& params) {
  BenchRow row;
  row.seed = seed;
  try {
    diagram::Instance inst = json_io::load_instance(path);
    std::vector<gridgen::GridGraph> graphs = gridgen::assemble_all(inst);
    milp::MilpModel model = milp::build_core_model(graphs, inst);
    milp::ConflictCatalog catalog = milp::build_conflict_catalog(graphs, inst);
    engine::SolveParams sp;
    sp.time_limit_s = params.time_limit_s;
    sp.seed = seed;
    auto [layout, report] = engine::solve(inst, graphs, model, catalog, sp);
    row.status = to_string(report.status);
    row.wall_s = report.wall_s;
    row.nodes = report.nodes;
    row.lazy_rows = report.lazy_rows;
    if (report.objective) row.objective = *report.objective;
    if (layout) {
      Length bend_gap = 10;
      auto it = inst.meta.generator_params.find("min_bend_gap");
      if (it != inst.meta.generator_params.end()) bend_gap = it->second;
      validate::ViolationReport check = validate::check_layout(inst, *layout, bend_gap);
      if (!check.empty()) row.status = "validator_rejected";
    }
  } catch (const gridgen::DiscretizationError&) {
    row.status = "infeasible";
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace

std::vector<BenchRecord> run_bench(const synth::SuiteManifest& manifest,
                                   const std::string& suite_dir, const BenchParams& params) {
  struct Job {
    std::size_t cell;
    std::size_t index;
    std::string path;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  std::vector<BenchRecord> records(manifest.cells.size());
  for (std::size_t c = 0; c < manifest.cells.size(); ++c) {
    const synth::SuiteCell& cell = manifest.cells[c];
    records[c].pipelines = cell.pipelines;
    records[c].branches = cell.branches;
    records[c].nodes = cell.nodes;
    records[c].delta = cell.delta;
    records[c].rows.resize(cell.instances.size());
    for (std::size_t i = 0; i < cell.instances.size(); ++i) {
      jobs.push_back({c, i, suite_dir + "/" + cell.instances[i].file, cell.instances[i].seed});
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      BenchRow row = run_one(jobs[j].path, jobs[j].seed, params);
      row.file = jobs[j].path;
      records[jobs[j].cell].rows[jobs[j].index] = std::move(row);
    }
  };
  int n_workers = std::max(1, params.jobs);
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (BenchRecord& r : records) r.finalize();
  return records;
}

void write_records_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << "pipelines,branches,nodes,delta,seed,status,objective,wall_s,bb_nodes,lazy_rows\n";
  for (const BenchRecord& rec : records) {
    for (const BenchRow& r : rec.rows) {
      out << rec.pipelines << "," << rec.branches << "," << rec.nodes << "," << rec.delta << ","
          << r.seed << "," << r.status << "," << r.objective << "," << std::fixed
          << std::setprecision(3) << r.wall_s << "," << r.nodes << "," << r.lazy_rows << "\n";
    }
  }
}

void write_cell_table_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  std::set<Length> deltas;
  std::map<std::tuple<int, int, int>, std::map<Length, const BenchRecord*>> table;
  for (const BenchRecord& r : records) {
    deltas.insert(r.delta);
    table[{r.pipelines, r.branches, r.nodes}][r.delta] = &r;
  }
  out << "pipelines,branches,nodes";
  for (Length d : deltas) out << ",time_d" << d << ",feas_d" << d;
  out << "\n";
  for (const auto& [key, by_delta] : table) {
    auto [c, b, n] = key;
    out << c << "," << b << "," << n;
    for (Length d : deltas) {
      auto it = by_delta.find(d);
      if (it == by_delta.end()) {
        out << ",,";
      } else {
        out << "," << std::fixed << std::setprecision(3) << it->second->mean_time_solved << ","
            << it->second->feasible;
      }
    }
    out << "\n";
  }
}

void write_bench_files(const std::vector<BenchRecord>& records, const std::string& prefix) {
  {
    std::ofstream out(prefix + "_records.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + prefix + "_records.csv");
    write_records_csv(records, out);
  }
  {
    std::ofstream out(prefix + "_table.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + prefix + "_table.csv");
    write_cell_table_csv(records, out);
  }
}

}  // namespace wirelayr::bench
