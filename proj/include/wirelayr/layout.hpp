#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wirelayr/geometry.hpp"

namespace wirelayr {

using geometry::Length;
using geometry::Point3;
using geometry::Segment3;

/// Routed path of one tree edge: an axis-aligned vertex chain from the
/// parent's placement to the child's placement. A single-point path is valid
/// when both placements coincide.
struct EdgeRoute {
  std::string tree_id;
  std::string parent;
  std::string child;
  std::vector<Point3> path;
  Length length = 0;
};

/// Complete solution: placements, per-edge routes, and the per-tree set of
/// installed corridor segments (deduplicated across routes of one tree).
struct Layout {
  std::map<std::string, Point3> placements;  // every node, leaves included
  std::vector<EdgeRoute> routes;
  std::map<std::string, std::vector<Segment3>> installed;  // tree id -> segments
  Length total_length = 0;  // sum over installed segments
};

enum class SolveStatus { optimal, feasible, infeasible, time_limit };

std::string to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<Length> objective;  // sum of route lengths of the returned layout
  Length bound = 0;                 // proven lower bound
  double gap = 0.0;                 // (objective - bound) / max(1, objective)
  std::int64_t lazy_rows = 0;       // safety rows materialized during the solve
  std::int64_t nodes = 0;           // branch-and-bound nodes expanded
  int iterations = 0;               // outer separation rounds
  int threads = 1;
  std::uint64_t seed = 0;
  double wall_s = 0.0;              // not serialized into solution files
  std::string certificate;          // infeasibility note, when applicable
};

}  // namespace wirelayr
