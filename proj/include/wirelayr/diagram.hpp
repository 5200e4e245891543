#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wirelayr/geometry.hpp"

namespace wirelayr::diagram {

using geometry::Box3;
using geometry::Coord;
using geometry::Length;
using geometry::Obstacle;
using geometry::Point3;

/// Pre-existing main line; an axis-aligned polyline. Roots of the trees
/// assigned to it must tap it somewhere along its trace.
struct Pipeline {
  std::string id;
  std::vector<Point3> polyline;
};

enum class NodeRole { root, intermediate, leaf };

struct TreeNode {
  std::string id;
  NodeRole role = NodeRole::intermediate;
  Box3 region;   // intermediate only
  Point3 point;  // leaf only
  std::vector<std::string> children;  // derived from tree edges on load
};

/// One branch of the installation: a rooted tree whose root taps a pipeline,
/// whose leaves are fixed terminals, and whose intermediate nodes must be
/// placed inside their admissible boxes.
struct WiringTree {
  std::string id;
  std::string pipeline_id;
  std::string root_id;
  std::vector<TreeNode> nodes;
  std::vector<std::pair<std::string, std::string>> tree_edges;  // (parent, child)

  const TreeNode* find_node(const std::string& node_id) const;
  TreeNode* find_node(const std::string& node_id);
};

struct InstanceMeta {
  std::uint64_t seed = 0;
  std::map<std::string, std::int64_t> generator_params;
};

/// Complete problem statement.
struct Instance {
  Box3 region;
  std::vector<Pipeline> pipelines;
  std::vector<WiringTree> forest;
  std::vector<Obstacle> obstacles;
  Length delta = 0;               // minimum branch-to-branch separation
  Length pipeline_clearance = 0;  // minimum branch-to-foreign-pipeline separation
  InstanceMeta meta;

  const Pipeline* find_pipeline(const std::string& id) const;
};

struct StructuralError {
  std::string code;    // e.g. "arborescence", "containment", "axis_alignment"
  std::string entity;  // offending id or path
  std::string message;

  std::string str() const { return code + " [" + entity + "]: " + message; }
};

/// Checks every type invariant of the instance. Empty result means valid.
std::vector<StructuralError> validate_instance(const Instance& inst);

struct TreeStats {
  std::string tree_id;
  int nodes = 0;
  int leaves = 0;
  int intermediates = 0;
  int depth = 0;  // edges on the longest root-to-leaf path
};

/// Per-tree counts; requires a structurally valid instance.
std::vector<TreeStats> tree_statistics(const Instance& inst);

/// Rebuilds every node's children list from the tree edge list.
void rebuild_children(WiringTree& tree);

}  // namespace wirelayr::diagram
