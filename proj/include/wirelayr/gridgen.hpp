#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wirelayr/diagram.hpp"

namespace wirelayr::gridgen {

using diagram::Box3;
using diagram::Coord;
using diagram::Instance;
using diagram::Length;
using diagram::Point3;
using diagram::WiringTree;
using geometry::Segment3;

/// Sorted unique coordinate set per axis; the generator of one group grid.
struct AxisCoords {
  std::vector<Coord> axis[3];

  void add_point(const Point3& p);
  void add_box(const Box3& b);
  void finalize();  // sort + dedup
  std::size_t vertex_count() const { return axis[0].size() * axis[1].size() * axis[2].size(); }
};

struct GroupGrid {
  std::vector<Point3> vertices;
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // index pairs, u < v
};

/// Directed arc of the discretized graph. Arcs come in antiparallel pairs:
/// arc 2k and 2k+1 are the two orientations of undirected corridor k, with
/// equal length.
struct Arc {
  std::int32_t from = 0;
  std::int32_t to = 0;
  Length len = 0;
};

/// Per-tree discretized routing network.
struct GridGraph {
  std::string tree_id;
  std::int32_t tree_index = 0;  // position in Instance::forest
  std::vector<Point3> vertices;  // sorted lexicographically
  std::vector<Arc> arcs;         // 2 per corridor
  // CSR adjacency over outgoing arcs; incoming arcs of v are the reverses of
  // the outgoing ones.
  std::vector<std::int32_t> out_begin;
  std::vector<std::int32_t> out_arc;
  // node id -> sorted admissible vertex indices (root: on-pipeline anchors,
  // leaf: singleton).
  std::map<std::string, std::vector<std::int32_t>> admissible;

  std::int32_t corridor_count() const { return static_cast<std::int32_t>(arcs.size() / 2); }
  static std::int32_t corridor_of(std::int32_t arc) { return arc / 2; }
  static std::int32_t reverse_of(std::int32_t arc) { return arc ^ 1; }
  Segment3 corridor_segment(std::int32_t corridor) const {
    const Arc& a = arcs[2 * corridor];
    return Segment3{vertices[a.from], vertices[a.to]};
  }
};

/// Raised when discretization proves the instance infeasible before any
/// optimization runs.
class DiscretizationError : public std::runtime_error {
 public:
  enum class Kind { empty_admissible_set, disconnected_required_pair };

  DiscretizationError(Kind kind, std::string entity, std::string what)
      : std::runtime_error(std::move(what)), kind_(kind), entity_(std::move(entity)) {}

  Kind kind() const { return kind_; }
  const std::string& entity() const { return entity_; }

 private:
  Kind kind_;
  std::string entity_;
};

/// Collects the per-axis Hanan coordinates of a parent-children group.
AxisCoords hanan_points(const std::vector<Box3>& boxes, const std::vector<Point3>& points);

/// Cartesian-product grid over the axis coordinate lists, with edges between
/// vertices at consecutive coordinates along one axis.
GroupGrid build_group_grid(const AxisCoords& coords);

/// Builds the reduced per-tree graph: union of parent-children group grids,
/// pipeline anchoring for the root group, obstacle clipping, and admissible
/// vertex sets. Throws DiscretizationError on an infeasibility certificate.
GridGraph assemble_tree_graph(const Instance& inst, const WiringTree& tree);

/// Convenience: all per-tree graphs of an instance, in forest order.
std::vector<GridGraph> assemble_all(const Instance& inst);

}  // namespace wirelayr::gridgen
