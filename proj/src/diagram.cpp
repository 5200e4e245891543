#include "wirelayr/diagram.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace wirelayr::diagram {

const TreeNode* WiringTree::find_node(const std::string& node_id) const {
  for (const TreeNode& n : nodes) {
    if (n.id == node_id) return &n;
  }
  return nullptr;
}

TreeNode* WiringTree::find_node(const std::string& node_id) {
  for (TreeNode& n : nodes) {
    if (n.id == node_id) return &n;
  }
  return nullptr;
}

const Pipeline* Instance::find_pipeline(const std::string& id) const {
  for (const Pipeline& p : pipelines) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

void rebuild_children(WiringTree& tree) {
  for (TreeNode& n : tree.nodes) n.children.clear();
  for (const auto& [parent, child] : tree.tree_edges) {
    if (TreeNode* p = tree.find_node(parent)) p->children.push_back(child);
  }
}

namespace {

void check_pipeline(const Pipeline& p, std::vector<StructuralError>& out) {
  if (p.polyline.size() < 2) {
    out.push_back({"polyline_size", p.id, "pipeline needs at least 2 points"});
    return;
  }
  for (std::size_t i = 0; i + 1 < p.polyline.size(); ++i) {
    const Point3& a = p.polyline[i];
    const Point3& b = p.polyline[i + 1];
    int differing = (a.x != b.x) + (a.y != b.y) + (a.z != b.z);
    if (differing != 1) {
      out.push_back({"axis_alignment", p.id,
                     "polyline step " + std::to_string(i) + " must change exactly one coordinate"});
    }
  }
}

void check_tree(const Instance& inst, const WiringTree& t, std::vector<StructuralError>& out) {
  if (!inst.find_pipeline(t.pipeline_id)) {
    out.push_back({"pipeline_ref", t.id, "unknown pipeline '" + t.pipeline_id + "'"});
  }

  int roots = 0;
  for (const TreeNode& n : t.nodes) {
    if (n.role == NodeRole::root) ++roots;
    if (n.role == NodeRole::leaf && !n.children.empty()) {
      out.push_back({"leaf_children", n.id, "leaf has children"});
    }
    if (n.role == NodeRole::intermediate) {
      if (!n.region.valid()) {
        out.push_back({"region_box", n.id, "region min exceeds max"});
      } else if (!inst.region.contains_box(n.region)) {
        out.push_back({"containment", n.id, "admissible region outside instance region"});
      }
    }
    if (n.role == NodeRole::leaf && !inst.region.contains(n.point)) {
      out.push_back({"containment", n.id, "leaf point outside instance region"});
    }
  }
  if (roots != 1) {
    out.push_back({"root_count", t.id, "tree must have exactly one root node"});
  }
  const TreeNode* root = t.find_node(t.root_id);
  if (!root || root->role != NodeRole::root) {
    out.push_back({"root_ref", t.id, "root_id does not name a root node"});
    return;
  }

  // Arborescence: every non-root has exactly one parent, root has none, and
  // all nodes are reachable from the root.
  std::map<std::string, int> indegree;
  for (const TreeNode& n : t.nodes) indegree[n.id] = 0;
  for (const auto& [parent, child] : t.tree_edges) {
    if (!t.find_node(parent) || !t.find_node(child)) {
      out.push_back({"edge_ref", t.id, "edge (" + parent + "," + child + ") names unknown node"});
      continue;
    }
    indegree[child] += 1;
  }
  if (indegree[t.root_id] != 0) {
    out.push_back({"arborescence", t.root_id, "root has a parent edge"});
  }
  for (const TreeNode& n : t.nodes) {
    if (n.id != t.root_id && indegree[n.id] != 1) {
      out.push_back({"arborescence", n.id,
                     "node has " + std::to_string(indegree[n.id]) + " parent edges (expected 1)"});
    }
  }
  std::set<std::string> seen{t.root_id};
  std::deque<std::string> queue{t.root_id};
  while (!queue.empty()) {
    const TreeNode* n = t.find_node(queue.front());
    queue.pop_front();
    if (!n) continue;
    for (const std::string& c : n->children) {
      if (seen.insert(c).second) queue.push_back(c);
    }
  }
  if (seen.size() != t.nodes.size()) {
    out.push_back({"arborescence", t.id, "tree is not connected from its root"});
  }
}

void check_obstacle(const Obstacle& o, std::size_t idx, std::vector<StructuralError>& out) {
  std::string ent = "obstacle#" + std::to_string(idx);
  if (o.clearance < 0) out.push_back({"clearance", ent, "clearance must be >= 0"});
  if (o.kind == Obstacle::Kind::solid_box) {
    if (!o.box.valid()) out.push_back({"obstacle_box", ent, "box min exceeds max"});
    return;
  }
  if (!o.slab.valid()) out.push_back({"obstacle_box", ent, "slab min exceeds max"});
  for (std::size_t i = 0; i < o.openings.size(); ++i) {
    const Box3& a = o.openings[i];
    if (!a.valid()) {
      out.push_back({"opening_box", ent, "opening " + std::to_string(i) + " min exceeds max"});
      continue;
    }
    if (!o.slab.contains_box(a)) {
      out.push_back({"opening_containment", ent, "opening " + std::to_string(i) + " not inside slab"});
    }
    for (std::size_t j = i + 1; j < o.openings.size(); ++j) {
      if (a.intersects(o.openings[j])) {
        out.push_back({"opening_overlap", ent,
                       "openings " + std::to_string(i) + " and " + std::to_string(j) + " intersect"});
      }
    }
  }
}

}  // namespace

std::vector<StructuralError> validate_instance(const Instance& inst) {
  std::vector<StructuralError> out;

  if (!inst.region.valid()) out.push_back({"region_box", "region", "region min exceeds max"});
  if (inst.delta < 0) out.push_back({"delta", "delta", "safety distance must be >= 0"});
  if (inst.pipeline_clearance < 0) {
    out.push_back({"delta", "pipeline_clearance", "pipeline clearance must be >= 0"});
  }

  std::set<std::string> pipeline_ids;
  for (const Pipeline& p : inst.pipelines) {
    if (!pipeline_ids.insert(p.id).second) {
      out.push_back({"duplicate_id", p.id, "duplicate pipeline id"});
    }
    check_pipeline(p, out);
  }

  std::set<std::string> tree_ids;
  std::set<std::string> node_ids;
  for (const WiringTree& t : inst.forest) {
    if (!tree_ids.insert(t.id).second) {
      out.push_back({"duplicate_id", t.id, "duplicate tree id"});
    }
    for (const TreeNode& n : t.nodes) {
      if (!node_ids.insert(n.id).second) {
        out.push_back({"duplicate_id", n.id, "node id not globally unique"});
      }
    }
    check_tree(inst, t, out);
  }

  for (std::size_t i = 0; i < inst.obstacles.size(); ++i) {
    check_obstacle(inst.obstacles[i], i, out);
  }
  return out;
}

std::vector<TreeStats> tree_statistics(const Instance& inst) {
  std::vector<TreeStats> out;
  for (const WiringTree& t : inst.forest) {
    TreeStats s;
    s.tree_id = t.id;
    s.nodes = static_cast<int>(t.nodes.size());
    for (const TreeNode& n : t.nodes) {
      if (n.role == NodeRole::leaf) ++s.leaves;
      if (n.role == NodeRole::intermediate) ++s.intermediates;
    }
    // BFS depth from the root.
    std::deque<std::pair<std::string, int>> queue{{t.root_id, 0}};
    while (!queue.empty()) {
      auto [id, d] = queue.front();
      queue.pop_front();
      s.depth = std::max(s.depth, d);
      const TreeNode* n = t.find_node(id);
      if (!n) continue;
      for (const std::string& c : n->children) queue.push_back({c, d + 1});
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace wirelayr::diagram
