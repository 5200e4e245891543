#include "wirelayr/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "wirelayr/geometry.hpp"

namespace wirelayr::validate {

using diagram::NodeRole;
using diagram::Pipeline;
using diagram::TreeNode;
using diagram::WiringTree;
using geometry::l1_point_distance;
using geometry::l1_segment_distance;
using geometry::l1_segment_polyline_distance;
using geometry::Point3;
using geometry::point_on_polyline;
using geometry::Segment3;
using geometry::segment_hits_obstacle;

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::placement_outside_region: return "placement_outside_region";
    case ViolationKind::path_disconnected: return "path_disconnected";
    case ViolationKind::obstacle_hit: return "obstacle_hit";
    case ViolationKind::branch_separation: return "branch_separation";
    case ViolationKind::pipeline_separation: return "pipeline_separation";
    case ViolationKind::leaf_degree: return "leaf_degree";
    case ViolationKind::bend_spacing: return "bend_spacing";
  }
  return "unknown";
}

namespace {

struct PathSegment {
  int tree;        // index into inst.forest
  int edge;        // index into tree_edges
  Segment3 seg;
};

bool edges_share_node(const WiringTree& t, int e1, int e2) {
  const auto& [p1, c1] = t.tree_edges[e1];
  const auto& [p2, c2] = t.tree_edges[e2];
  return p1 == p2 || p1 == c2 || c1 == p2 || c1 == c2;
}

// Collapse colinear runs of an axis-aligned path to its bend points.
std::vector<Point3> bend_points(const std::vector<Point3>& path) {
  std::vector<Point3> out;
  for (const Point3& p : path) {
    if (out.size() >= 2) {
      const Point3& a = out[out.size() - 2];
      const Point3& b = out.back();
      int ax1 = Segment3{a, b}.axis();
      int ax2 = Segment3{b, p}.axis();
      bool same_dir = ax1 == ax2 && ax1 >= 0 &&
                      ((b[ax1] - a[ax1]) > 0) == ((p[ax1] - b[ax1]) > 0);
      if (same_dir) {
        out.back() = p;
        continue;
      }
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

ViolationReport check_layout(const Instance& inst, const Layout& layout, Length min_bend_gap,
                             bool enforce_bend_gap) {
  ViolationReport report;
  auto add = [&](ViolationKind kind, std::string entities, Length measured, Length threshold) {
    report.violations.push_back({kind, std::move(entities), measured, threshold});
  };

  // (a) placements inside their admissible geometry.
  for (std::size_t ti = 0; ti < inst.forest.size(); ++ti) {
    const WiringTree& tree = inst.forest[ti];
    const Pipeline* pipe = inst.find_pipeline(tree.pipeline_id);
    for (const TreeNode& n : tree.nodes) {
      auto it = layout.placements.find(n.id);
      if (it == layout.placements.end()) {
        add(ViolationKind::placement_outside_region, n.id + " (missing)", 0, 0);
        continue;
      }
      const Point3& p = it->second;
      switch (n.role) {
        case NodeRole::root:
          if (!pipe || !point_on_polyline(p, pipe->polyline)) {
            add(ViolationKind::placement_outside_region, n.id + " off pipeline", 0, 0);
          }
          break;
        case NodeRole::intermediate:
          if (!n.region.contains(p)) {
            add(ViolationKind::placement_outside_region, n.id, 0, 0);
          }
          break;
        case NodeRole::leaf:
          if (p != n.point) {
            add(ViolationKind::placement_outside_region, n.id + " moved terminal", 0, 0);
          }
          break;
      }
    }
  }

  // (b) per-edge paths: axis-aligned chains connecting the two placements.
  std::vector<PathSegment> segments;
  std::map<std::pair<std::string, std::string>, const EdgeRoute*> route_of;
  for (const EdgeRoute& r : layout.routes) route_of[{r.parent, r.child}] = &r;

  for (std::size_t ti = 0; ti < inst.forest.size(); ++ti) {
    const WiringTree& tree = inst.forest[ti];
    for (std::size_t e = 0; e < tree.tree_edges.size(); ++e) {
      const auto& [parent, child] = tree.tree_edges[e];
      auto rit = route_of.find({parent, child});
      if (rit == route_of.end()) {
        add(ViolationKind::path_disconnected, parent + "->" + child + " (missing route)", 0, 0);
        continue;
      }
      const EdgeRoute& r = *rit->second;
      auto pit = layout.placements.find(parent);
      auto cit = layout.placements.find(child);
      if (r.path.empty() || pit == layout.placements.end() || cit == layout.placements.end() ||
          r.path.front() != pit->second || r.path.back() != cit->second) {
        add(ViolationKind::path_disconnected, parent + "->" + child + " (endpoints)", 0, 0);
        continue;
      }
      Length len = 0;
      bool ok = true;
      for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
        Segment3 s{r.path[i], r.path[i + 1]};
        if (!s.axis_aligned() || s.a == s.b) {
          add(ViolationKind::path_disconnected,
              parent + "->" + child + " step " + std::to_string(i), 0, 0);
          ok = false;
          break;
        }
        len += s.length();
        segments.push_back({static_cast<int>(ti), static_cast<int>(e), s});
      }
      if (ok && len != r.length) {
        add(ViolationKind::path_disconnected, parent + "->" + child + " (length mismatch)", len,
            r.length);
      }
    }
  }

  // (c) obstacle avoidance (clearance-inflated, closed intersection).
  for (const PathSegment& ps : segments) {
    for (std::size_t oi = 0; oi < inst.obstacles.size(); ++oi) {
      if (segment_hits_obstacle(ps.seg, inst.obstacles[oi])) {
        add(ViolationKind::obstacle_hit,
            inst.forest[ps.tree].id + " edge " + std::to_string(ps.edge) + " obstacle#" +
                std::to_string(oi),
            0, 0);
      }
    }
  }

  // (d) branch separation; same scoping as the optimizer: segments of tree
  // edges sharing a node are exempt.
  const Length delta = inst.delta;
  if (delta > 0) {
    for (std::size_t i = 0; i < segments.size(); ++i) {
      for (std::size_t j = i + 1; j < segments.size(); ++j) {
        const PathSegment& a = segments[i];
        const PathSegment& b = segments[j];
        if (a.tree == b.tree) {
          if (a.edge == b.edge) continue;
          if (edges_share_node(inst.forest[a.tree], a.edge, b.edge)) continue;
        }
        Length d = l1_segment_distance(a.seg, b.seg);
        if (d < delta) {
          add(ViolationKind::branch_separation,
              inst.forest[a.tree].id + " edge " + std::to_string(a.edge) + " vs " +
                  inst.forest[b.tree].id + " edge " + std::to_string(b.edge),
              d, delta);
        }
      }
    }
  }

  // (e) clearance from foreign pipelines.
  if (inst.pipeline_clearance > 0) {
    for (const PathSegment& ps : segments) {
      const std::string& own = inst.forest[ps.tree].pipeline_id;
      for (const Pipeline& pipe : inst.pipelines) {
        if (pipe.id == own) continue;
        Length d = l1_segment_polyline_distance(ps.seg, pipe.polyline);
        if (d < inst.pipeline_clearance) {
          add(ViolationKind::pipeline_separation,
              inst.forest[ps.tree].id + " edge " + std::to_string(ps.edge) + " vs " + pipe.id, d,
              inst.pipeline_clearance);
        }
      }
    }
  }

  // (f) each terminal is served by exactly one installed segment of its tree.
  for (const WiringTree& tree : inst.forest) {
    auto inst_it = layout.installed.find(tree.id);
    for (const TreeNode& n : tree.nodes) {
      if (n.role != NodeRole::leaf) continue;
      int incident = 0;
      if (inst_it != layout.installed.end()) {
        for (const Segment3& s : inst_it->second) {
          if (s.a == n.point || s.b == n.point) ++incident;
        }
      }
      if (incident != 1) {
        add(ViolationKind::leaf_degree, n.id, incident, 1);
      }
    }
  }

  // (g) bend spacing; advisory unless promoted.
  for (const EdgeRoute& r : layout.routes) {
    std::vector<Point3> bends = bend_points(r.path);
    for (std::size_t i = 1; i + 2 < bends.size(); ++i) {
      Length gap = l1_point_distance(bends[i], bends[i + 1]);
      if (gap < min_bend_gap) {
        Violation v{ViolationKind::bend_spacing, r.parent + "->" + r.child, gap, min_bend_gap};
        if (enforce_bend_gap) {
          report.violations.push_back(v);
        } else {
          report.advisories.push_back(v);
        }
      }
    }
  }

  for (const auto& [tree_id, segs] : layout.installed) {
    for (const Segment3& s : segs) report.recomputed_total += s.length();
  }
  return report;
}

}  // namespace wirelayr::validate
