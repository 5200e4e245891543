#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wirelayr/gridgen.hpp"

namespace wirelayr::milp {

using diagram::Instance;
using diagram::Length;
using gridgen::GridGraph;

/// Identifies one binary column of the model.
struct VarRef {
  enum class Kind { install, flow, place };

  Kind kind = Kind::install;
  std::int32_t tree = 0;
  std::int32_t edge = -1;        // flow only: tree edge index
  std::int32_t arc = -1;         // install/flow: directed arc index
  std::int32_t node = -1;        // place only: ordinal among the tree's placement nodes
  std::int32_t position = -1;    // place only: position in the node's admissible list
};

enum class RowTag {
  placement,
  flow_balance,
  coupling,
  leaf_in,
  leaf_out,
  unidir,
  safety_arc,
  safety_pipeline,
};

enum class Sense { le, eq, ge };

struct LinearConstraint {
  RowTag tag = RowTag::placement;
  Sense sense = Sense::eq;
  std::int64_t rhs = 0;
  std::vector<std::pair<std::int32_t, std::int64_t>> terms;  // (column, coefficient)
};

/// Solver-agnostic binary model over the per-tree grid graphs.
/// Column layout is family-major and deterministic:
/// all install columns (by tree, arc), then all flow columns (by tree, tree
/// edge, arc), then all placement columns (by tree, placement node, position).
/// Placement nodes are the non-leaf nodes of each tree in node order; leaf
/// sinks are constants, not columns.
struct MilpModel {
  struct TreeVars {
    std::int32_t install_base = 0;
    std::int32_t flow_base = 0;
    std::int32_t place_base = 0;
    std::int32_t n_arcs = 0;
    std::int32_t n_edges = 0;
    std::vector<std::string> place_nodes;                 // non-leaf ids, node order
    std::vector<std::int32_t> place_off;                  // per place node
    std::vector<std::vector<std::int32_t>> place_verts;   // admissible vertex ids
  };

  std::vector<TreeVars> trees;
  std::int32_t num_cols = 0;
  std::vector<LinearConstraint> rows;
  std::vector<Length> objective;  // per column; d_a on install columns, 0 elsewhere
  std::int64_t big_m = 0;         // total directed arc count over all trees

  std::int32_t install_col(std::int32_t tree, std::int32_t arc) const;
  std::int32_t flow_col(std::int32_t tree, std::int32_t edge, std::int32_t arc) const;
  std::int32_t place_col(std::int32_t tree, std::int32_t node_ord, std::int32_t position) const;
  VarRef var_of(std::int32_t col) const;
  std::string column_name(std::int32_t col) const;
};

/// Constraints (1)-(7): placement, flow balance with placement-coupled
/// sources/sinks, arc coupling, leaf degree, and antiparallel exclusion.
MilpModel build_core_model(const std::vector<GridGraph>& graphs, const Instance& inst);

/// Corridor-level reference into one tree's grid.
struct CorrRef {
  std::int32_t tree = 0;
  std::int32_t corridor = 0;
  friend auto operator<=>(const CorrRef&, const CorrRef&) = default;
};

/// Geometric conflict precomputation for the lazy safety families (8)-(9).
/// Pairs are stored at corridor level; a corridor conflict covers all four
/// directed-arc combinations. No entry relates a corridor to itself, and
/// same-tree pairs respect the scoping rule: they apply only between tree
/// edges that share no tree node (enforcement is flow-based there).
struct ConflictCatalog {
  std::vector<std::pair<CorrRef, CorrRef>> cross_pairs;      // tree_a < tree_b
  std::vector<std::array<std::int32_t, 3>> same_tree_pairs;  // (tree, ca, cb), ca < cb
  std::vector<CorrRef> pipeline_forbidden;                   // constraint (9) fixings

  std::map<CorrRef, std::vector<CorrRef>> cross_neighbors;   // symmetric adjacency
  std::vector<std::set<std::pair<std::int32_t, std::int32_t>>> same_tree_sets;  // per tree

  bool same_tree_conflict(std::int32_t tree, std::int32_t ca, std::int32_t cb) const;
  std::size_t pair_count() const { return cross_pairs.size() + same_tree_pairs.size(); }

  /// Directed-arc expansion of the catalog (for export and tests): pairs of
  /// (tree, arc) with distance below delta under the scoping rule. Never
  /// contains an arc with itself or its reverse.
  std::vector<std::pair<std::pair<std::int32_t, std::int32_t>,
                        std::pair<std::int32_t, std::int32_t>>>
  directed_arc_pairs(const std::vector<GridGraph>& graphs) const;
};

ConflictCatalog build_conflict_catalog(const std::vector<GridGraph>& graphs, const Instance& inst);

/// Aggregated big-M exclusion row for one directed arc: sum of the installs of
/// every cataloged neighbor (both orientations) plus M x_a <= M. Returns
/// nothing when the arc has an empty conflict neighborhood.
std::optional<LinearConstraint> materialize_arc_safety_row(const MilpModel& model,
                                                           const ConflictCatalog& catalog,
                                                           std::int32_t tree, std::int32_t arc);

/// Fixing row x_a = 0 for a pipeline-forbidden directed arc.
LinearConstraint materialize_pipeline_fixing(const MilpModel& model, std::int32_t tree,
                                             std::int32_t arc);

/// Appends the full safety families (8)-(9) to the model: big-M rows for every
/// directed arc with a nonempty cross-tree neighborhood, flow-exclusion rows
/// for same-tree pairs between node-disjoint tree edges (including shared and
/// reversed corridors), and pipeline fixings.
void add_all_safety_rows(MilpModel& model, const ConflictCatalog& catalog,
                         const std::vector<GridGraph>& graphs, const Instance& inst);

enum class ModelFormat { mps, lp };

/// Deterministic model export; all variables declared binary.
void export_model(const MilpModel& model, ModelFormat format, std::ostream& out);
void export_model_file(const MilpModel& model, ModelFormat format, const std::string& path);

}  // namespace wirelayr::milp
