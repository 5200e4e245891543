#pragma once

#include <string>
#include <vector>

#include "wirelayr/diagram.hpp"
#include "wirelayr/layout.hpp"

namespace wirelayr::validate {

using diagram::Instance;
using diagram::Length;

// Model-free feasibility checker. Re-derives every check from raw coordinates
// so that solver bugs cannot self-certify; it never consults the MILP or the
// discretization graph.

enum class ViolationKind {
  placement_outside_region,
  path_disconnected,
  obstacle_hit,
  branch_separation,
  pipeline_separation,
  leaf_degree,
  bend_spacing,
};

std::string to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string entities;
  Length measured = 0;
  Length threshold = 0;
};

struct ViolationReport {
  std::vector<Violation> violations;  // hard failures
  std::vector<Violation> advisories;  // bend spacing unless promoted
  Length recomputed_total = 0;        // length re-derived from installed segments
  bool scoping_note = true;  // separation exempts tree edges sharing a node

  bool empty() const { return violations.empty(); }
};

/// Verifies placements, path connectivity, obstacle avoidance, branch and
/// pipeline separation (closed comparison: distance == threshold passes),
/// leaf degree, and bend spacing against the original continuous geometry.
ViolationReport check_layout(const Instance& inst, const Layout& layout, Length min_bend_gap,
                             bool enforce_bend_gap = false);

}  // namespace wirelayr::validate
