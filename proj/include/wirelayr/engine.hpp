#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wirelayr/layout.hpp"
#include "wirelayr/milp.hpp"

namespace wirelayr::engine {

using diagram::Instance;
using gridgen::GridGraph;
using milp::ConflictCatalog;
using milp::MilpModel;

inline constexpr Length kInfLength = std::numeric_limits<Length>::max() / 4;

struct SolveParams {
  double time_limit_s = 3600.0;  // matches the benchmark protocol default
  int threads = 1;
  std::uint64_t seed = 0;
  bool eager_safety = false;  // materialize the whole conflict catalog up front
};

/// Open subproblem of the search: per-tree candidate placements (restrictions
/// of the admissible sets) and per-tree-edge banned corridors.
struct SearchNode {
  // candidates[tree][node id] -> allowed vertex ids (subset of admissible)
  std::vector<std::map<std::string, std::vector<std::int32_t>>> candidates;
  // banned[tree][edge index] -> corridor ids unusable by that tree edge
  std::vector<std::vector<std::vector<std::int32_t>>> banned;

  static SearchNode root_of(const Instance& inst, const std::vector<GridGraph>& graphs);
};

/// Relaxation bound: the sum over tree edges of the multi-source multi-sink
/// shortest-path distance between the candidate sets of the edge's endpoints,
/// on the graph without the edge's banned corridors. Safety interactions are
/// ignored. Returns kInfLength when some edge is disconnected or some
/// candidate set is empty.
Length lower_bound(const Instance& inst, const std::vector<GridGraph>& graphs,
                   const SearchNode& node);

/// A 0/1 value per model column.
struct ModelSolution {
  std::vector<std::uint8_t> value;
};

struct ExtractResult {
  Layout layout;
  bool dropped_cycles = false;  // flow contained circulation disconnected from paths
};

/// Decodes placements from the y columns and walks the f columns to recover
/// each tree edge's path. Flow cycles disconnected from the paths are dropped;
/// installed arcs are recomputed from the used paths.
ExtractResult extract_layout(const Instance& inst, const std::vector<GridGraph>& graphs,
                             const MilpModel& model, const ModelSolution& solution);

/// Exact solve: branch-and-bound on placements with combinatorial shortest
/// path bounds, corridor conflict branching, and an outer lazy separation loop
/// over the conflict catalog.
std::pair<std::optional<Layout>, SolveReport> solve(const Instance& inst,
                                                    const std::vector<GridGraph>& graphs,
                                                    const MilpModel& model,
                                                    const ConflictCatalog& catalog,
                                                    const SolveParams& params);

}  // namespace wirelayr::engine
