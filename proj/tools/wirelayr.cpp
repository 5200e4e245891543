#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wirelayr/bench.hpp"
#include "wirelayr/engine.hpp"
#include "wirelayr/gridgen.hpp"
#include "wirelayr/json_io.hpp"
#include "wirelayr/milp.hpp"
#include "wirelayr/scene.hpp"
#include "wirelayr/synth.hpp"
#include "wirelayr/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitTimeLimit = 3;
constexpr int kExitInputError = 4;

using wirelayr::Length;

int thread_count(int flag_value) {
  // The environment variable takes precedence over the flag.
  if (const char* env = std::getenv("WIRELAYR_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return flag_value;
}

wirelayr::diagram::Instance load_checked(const std::string& path) {
  wirelayr::diagram::Instance inst = wirelayr::json_io::load_instance(path);
  auto errors = wirelayr::diagram::validate_instance(inst);
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "invalid instance: " << e.str() << "\n";
    throw std::runtime_error("instance failed structural validation");
  }
  return inst;
}

Length bend_gap_of(const wirelayr::diagram::Instance& inst) {
  auto it = inst.meta.generator_params.find("min_bend_gap");
  return it != inst.meta.generator_params.end() ? it->second : 10;
}

int cmd_generate(const wirelayr::synth::GeneratorParams& params, const std::string& out) {
  wirelayr::diagram::Instance inst = wirelayr::synth::generate(params);
  std::string path = out;
  namespace fs = std::filesystem;
  if (!out.ends_with(".json")) {
    fs::create_directories(out);
    path = out + "/inst_c" + std::to_string(params.num_pipelines) + "_b" +
           std::to_string(params.branches_per_pipeline) + "_n" +
           std::to_string(params.nodes_per_branch) + "_d" + std::to_string(params.delta) + "_s" +
           std::to_string(params.seed) + ".json";
  }
  wirelayr::json_io::save_instance(inst, path);
  std::cout << path << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& instance_path, const std::string& out,
              const std::string& emit_model, double time_limit, int threads, std::uint64_t seed,
              bool eager) {
  using namespace wirelayr;
  diagram::Instance inst = load_checked(instance_path);

  std::vector<gridgen::GridGraph> graphs;
  try {
    graphs = gridgen::assemble_all(inst);
  } catch (const gridgen::DiscretizationError& e) {
    Layout empty;
    SolveReport rep;
    rep.status = SolveStatus::infeasible;
    rep.certificate = e.what();
    if (!out.empty()) json_io::save_solution(empty, rep, out);
    std::cerr << "infeasible at discretization: " << e.what() << "\n";
    return kExitInfeasible;
  }

  milp::MilpModel model = milp::build_core_model(graphs, inst);
  milp::ConflictCatalog catalog = milp::build_conflict_catalog(graphs, inst);
  if (!emit_model.empty()) {
    milp::ModelFormat fmt =
        emit_model.ends_with(".lp") ? milp::ModelFormat::lp : milp::ModelFormat::mps;
    milp::export_model_file(model, fmt, emit_model);
  }

  engine::SolveParams params;
  params.time_limit_s = time_limit;
  params.threads = thread_count(threads);
  params.seed = seed;
  params.eager_safety = eager;
  auto [layout, report] = engine::solve(inst, graphs, model, catalog, params);

  std::cerr << "status=" << to_string(report.status);
  if (report.objective) std::cerr << " objective=" << *report.objective;
  std::cerr << " bound=" << report.bound << " gap=" << report.gap
            << " lazy_rows=" << report.lazy_rows << " nodes=" << report.nodes
            << " iterations=" << report.iterations << " wall_s=" << report.wall_s << "\n";

  if (!out.empty()) {
    json_io::save_solution(layout ? *layout : Layout{}, report, out);
  }
  switch (report.status) {
    case SolveStatus::optimal:
    case SolveStatus::feasible:
      return kExitOk;
    case SolveStatus::infeasible:
      return kExitInfeasible;
    case SolveStatus::time_limit:
      return kExitTimeLimit;
  }
  return kExitOk;
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path,
                 Length enforce_bend_gap) {
  using namespace wirelayr;
  diagram::Instance inst = load_checked(instance_path);
  auto [layout, report] = json_io::load_solution(solution_path);

  Length gap = enforce_bend_gap > 0 ? enforce_bend_gap : bend_gap_of(inst);
  validate::ViolationReport check =
      validate::check_layout(inst, layout, gap, enforce_bend_gap > 0);

  nlohmann::json j;
  j["violations"] = nlohmann::json::array();
  for (const auto& v : check.violations) {
    j["violations"].push_back({{"kind", validate::to_string(v.kind)},
                               {"entities", v.entities},
                               {"measured", v.measured},
                               {"threshold", v.threshold}});
  }
  j["advisories"] = nlohmann::json::array();
  for (const auto& v : check.advisories) {
    j["advisories"].push_back({{"kind", validate::to_string(v.kind)},
                               {"entities", v.entities},
                               {"measured", v.measured},
                               {"threshold", v.threshold}});
  }
  j["recomputed_total"] = check.recomputed_total;
  j["reported_total"] = layout.total_length;
  j["scoping"] = "separation exempts tree edges sharing a node";
  std::cout << wirelayr::json_io::dump_deterministic(j);
  return check.empty() ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wirelayr: rectilinear wiring layout optimization toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate one synthetic instance");
  wirelayr::synth::GeneratorParams gp;
  std::string gen_out = ".";
  gen->add_option("--seed", gp.seed, "random seed");
  gen->add_option("--pipelines", gp.num_pipelines, "number of pipelines");
  gen->add_option("--branches", gp.branches_per_pipeline, "branches per pipeline");
  gen->add_option("--nodes", gp.nodes_per_branch, "nodes per branch");
  gen->add_option("--delta", gp.delta, "safety distance");
  gen->add_option("--cube", gp.cube_edge, "cube edge length");
  gen->add_option("--region-edge", gp.region_edge, "admissible box edge length");
  gen->add_option("--bend-gap", gp.min_bend_gap, "grid step / bend spacing");
  gen->add_option("--pipe-sep", gp.min_pipeline_separation, "min pipeline separation");
  gen->add_option("--out", gen_out, "output file (.json) or directory");

  // suite
  auto* suite = app.add_subcommand("suite", "generate a benchmark suite");
  wirelayr::synth::SuiteConfig sc;
  bool table1 = false;
  std::string suite_out = "suite";
  int per_cell = 10;
  std::vector<int> s_pipelines, s_branches, s_nodes;
  std::vector<Length> s_deltas;
  suite->add_flag("--table1", table1, "full scaled benchmark grid");
  suite->add_option("--pipelines", s_pipelines, "pipeline counts");
  suite->add_option("--branches", s_branches, "branch counts");
  suite->add_option("--nodes", s_nodes, "nodes per branch");
  suite->add_option("--deltas", s_deltas, "safety distances");
  suite->add_option("--per-cell", per_cell, "instances per cell");
  suite->add_option("--base-seed", sc.base_seed, "first seed");
  suite->add_option("--out", suite_out, "output directory")->required();

  // discretize
  auto* disc = app.add_subcommand("discretize", "dump the per-tree routing graphs");
  std::string disc_instance, disc_out = "graph.json";
  disc->add_option("instance", disc_instance, "instance JSON")->required();
  disc->add_option("--out", disc_out, "graph dump path");

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance to optimality");
  std::string solve_instance, solve_out = "solution.json", emit_model;
  double time_limit = 3600.0;
  int threads = 1;
  std::uint64_t seed = 0;
  bool eager = false;
  solve->add_option("instance", solve_instance, "instance JSON")->required();
  solve->add_option("--out", solve_out, "solution JSON path");
  solve->add_option("--time-limit", time_limit, "seconds");
  solve->add_option("--threads", threads, "worker threads (search is sequential)");
  solve->add_option("--seed", seed, "seed recorded in the report");
  solve->add_flag("--eager", eager, "materialize all safety constraints up front");
  solve->add_option("--emit-model", emit_model, "write the MILP as .mps or .lp");

  // validate
  auto* val = app.add_subcommand("validate", "check a solution against an instance");
  std::string val_instance, val_solution;
  Length enforce_gap = 0;
  val->add_option("instance", val_instance, "instance JSON")->required();
  val->add_option("solution", val_solution, "solution JSON")->required();
  val->add_option("--enforce-bend-gap", enforce_gap, "promote bend spacing to a hard check");

  // bench
  auto* bench = app.add_subcommand("bench", "run a suite and emit CSV records");
  std::string bench_suite, bench_prefix = "bench";
  double bench_limit = 60.0;
  int bench_jobs = 1;
  bench->add_option("--suite", bench_suite, "suite directory (with manifest.json)")->required();
  bench->add_option("--out", bench_prefix, "output CSV prefix");
  bench->add_option("--time-limit", bench_limit, "per-instance seconds");
  bench->add_option("--jobs", bench_jobs, "parallel instances");

  // export
  auto* exp = app.add_subcommand("export", "emit a 3D scene for offline viewing");
  std::string exp_instance, exp_solution, exp_format = "obj", exp_out;
  exp->add_option("instance", exp_instance, "instance JSON")->required();
  exp->add_option("--solution", exp_solution, "solution JSON");
  exp->add_option("--format", exp_format, "obj or csv");
  exp->add_option("--out", exp_out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gp, gen_out);

    if (suite->parsed()) {
      if (table1) {
        sc.pipelines = {1, 2};
        sc.branches = {1, 3, 5};
        sc.nodes = {3, 5, 10, 15};
        sc.deltas = {1, 3, 5};
      } else {
        if (!s_pipelines.empty()) sc.pipelines = s_pipelines;
        if (!s_branches.empty()) sc.branches = s_branches;
        if (!s_nodes.empty()) sc.nodes = s_nodes;
        if (!s_deltas.empty()) sc.deltas = s_deltas;
      }
      sc.instances_per_cell = per_cell;
      std::filesystem::create_directories(suite_out);
      auto manifest = wirelayr::synth::generate_suite(sc, suite_out);
      std::cout << manifest.instance_count() << " instances in " << suite_out << "\n";
      return kExitOk;
    }

    if (disc->parsed()) {
      wirelayr::diagram::Instance inst = load_checked(disc_instance);
      try {
        auto graphs = wirelayr::gridgen::assemble_all(inst);
        wirelayr::json_io::save_graphs(graphs, disc_out);
        std::cout << disc_out << "\n";
        return kExitOk;
      } catch (const wirelayr::gridgen::DiscretizationError& e) {
        std::cerr << "infeasible at discretization: " << e.what() << "\n";
        return kExitInfeasible;
      }
    }

    if (solve->parsed()) {
      return cmd_solve(solve_instance, solve_out, emit_model, time_limit, threads, seed, eager);
    }

    if (val->parsed()) return cmd_validate(val_instance, val_solution, enforce_gap);

    if (bench->parsed()) {
      auto manifest = wirelayr::synth::load_manifest(bench_suite + "/manifest.json");
      wirelayr::bench::BenchParams bp;
      bp.time_limit_s = bench_limit;
      bp.jobs = thread_count(bench_jobs);
      auto records = wirelayr::bench::run_bench(manifest, bench_suite, bp);
      wirelayr::bench::write_bench_files(records, bench_prefix);
      std::cout << bench_prefix << "_records.csv " << bench_prefix << "_table.csv\n";
      return kExitOk;
    }

    if (exp->parsed()) {
      wirelayr::diagram::Instance inst = load_checked(exp_instance);
      wirelayr::Layout layout;
      bool have_layout = false;
      if (!exp_solution.empty()) {
        auto [l, rep] = wirelayr::json_io::load_solution(exp_solution);
        layout = std::move(l);
        have_layout = true;
      }
      wirelayr::scene::SceneFormat fmt = exp_format == "csv"
                                             ? wirelayr::scene::SceneFormat::csv_segments
                                             : wirelayr::scene::SceneFormat::obj_polylines;
      wirelayr::scene::export_scene_file(inst, have_layout ? &layout : nullptr, fmt, exp_out);
      std::cout << exp_out << "\n";
      return kExitOk;
    }
  } catch (const wirelayr::synth::PlacementOverflow& e) {
    std::cerr << "generation failed: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
