#pragma once

// Test-only oracles, kept independent of the implementation paths they check:
// sampled geometric distances, a brute-force solver that enumerates placements
// and simple paths with raw-coordinate conflict checks, and a small MPS reader
// with an exhaustive binary-model enumerator.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wirelayr/diagram.hpp"
#include "wirelayr/gridgen.hpp"

namespace wirelayr::test_support {

using diagram::Instance;
using diagram::Length;
using geometry::Point3;
using geometry::Segment3;

/// Minimum l1 distance over all integer-coordinate point pairs of two
/// axis-aligned segments (dense sampling at unit resolution; exact for
/// integer endpoints).
Length sampled_segment_distance(const Segment3& s, const Segment3& t);

struct BruteForceResult {
  bool feasible = false;
  Length objective = 0;
};

/// Exhaustive placement enumeration plus conflict-aware per-edge simple-path
/// enumeration. Intended for tiny instances only; throws when the path count
/// exceeds the cap. All separation checks are re-derived from coordinates.
BruteForceResult brute_force_solve(const Instance& inst,
                                   const std::vector<gridgen::GridGraph>& graphs,
                                   std::size_t path_cap = 20000);

/// Placement-enumeration + per-edge shortest-path oracle (no conflicts):
/// the expected optimum when delta is relaxed to 0.
Length placement_enumeration_optimum(const Instance& inst,
                                     const std::vector<gridgen::GridGraph>& graphs);

struct MpsModel {
  std::vector<std::string> columns;
  std::vector<double> objective;
  struct Row {
    char sense;  // L, G, E
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
  };
  std::vector<Row> rows;
};

MpsModel parse_mps(const std::string& text);

/// Exhaustive 0/1 enumeration of a parsed model; columns must be few.
std::optional<double> enumerate_binary_optimum(const MpsModel& model);

}  // namespace wirelayr::test_support
