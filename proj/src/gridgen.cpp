#include "wirelayr/gridgen.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "wirelayr/geometry.hpp"

namespace wirelayr::gridgen {

using diagram::NodeRole;
using diagram::Obstacle;
using diagram::Pipeline;
using diagram::TreeNode;
using geometry::point_hits_obstacle;
using geometry::point_on_polyline;
using geometry::segment_hits_obstacle;

void AxisCoords::add_point(const Point3& p) {
  for (int ax = 0; ax < 3; ++ax) axis[ax].push_back(p[ax]);
}

void AxisCoords::add_box(const Box3& b) {
  add_point(b.min);
  add_point(b.max);
}

void AxisCoords::finalize() {
  for (int ax = 0; ax < 3; ++ax) {
    std::sort(axis[ax].begin(), axis[ax].end());
    axis[ax].erase(std::unique(axis[ax].begin(), axis[ax].end()), axis[ax].end());
  }
}

AxisCoords hanan_points(const std::vector<Box3>& boxes, const std::vector<Point3>& points) {
  AxisCoords coords;
  for (const Box3& b : boxes) coords.add_box(b);
  for (const Point3& p : points) coords.add_point(p);
  coords.finalize();
  return coords;
}

GroupGrid build_group_grid(const AxisCoords& coords) {
  GroupGrid grid;
  const auto& xs = coords.axis[0];
  const auto& ys = coords.axis[1];
  const auto& zs = coords.axis[2];
  const std::int32_t ny = static_cast<std::int32_t>(ys.size());
  const std::int32_t nz = static_cast<std::int32_t>(zs.size());

  grid.vertices.reserve(coords.vertex_count());
  for (Coord x : xs) {
    for (Coord y : ys) {
      for (Coord z : zs) {
        grid.vertices.push_back({x, y, z});
      }
    }
  }
  auto index = [&](std::int32_t i, std::int32_t j, std::int32_t k) {
    return (i * ny + j) * nz + k;
  };
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(xs.size()); ++i) {
    for (std::int32_t j = 0; j < ny; ++j) {
      for (std::int32_t k = 0; k < nz; ++k) {
        if (i + 1 < static_cast<std::int32_t>(xs.size())) {
          grid.edges.push_back({index(i, j, k), index(i + 1, j, k)});
        }
        if (j + 1 < ny) grid.edges.push_back({index(i, j, k), index(i, j + 1, k)});
        if (k + 1 < nz) grid.edges.push_back({index(i, j, k), index(i, j, k + 1)});
      }
    }
  }
  return grid;
}

namespace {

// Group geometry of one non-leaf tree node: its own region (or pipeline
// anchoring for the root) plus the regions/points of its children.
AxisCoords group_coords(const Instance& inst, const WiringTree& tree, const TreeNode& parent) {
  AxisCoords coords;
  if (parent.role == NodeRole::root) {
    // Pipeline extremities and direction-change points. Together with the
    // children's coordinates these generate, in the product grid, the
    // orthogonal projections of every grid plane onto the pipeline, which
    // become the root's candidate tap points.
    const Pipeline* p = inst.find_pipeline(tree.pipeline_id);
    if (p) {
      for (const Point3& v : p->polyline) coords.add_point(v);
    }
  } else {
    coords.add_box(parent.region);
  }
  for (const std::string& child_id : parent.children) {
    const TreeNode* child = tree.find_node(child_id);
    if (!child) continue;
    if (child->role == NodeRole::leaf) {
      coords.add_point(child->point);
    } else {
      coords.add_box(child->region);
    }
  }
  coords.finalize();
  return coords;
}

struct CoordEdge {
  Point3 a;
  Point3 b;
  friend auto operator<=>(const CoordEdge&, const CoordEdge&) = default;
};

}  // namespace

GridGraph assemble_tree_graph(const Instance& inst, const WiringTree& tree) {
  std::set<Point3> vertex_set;
  std::set<CoordEdge> edge_set;

  for (const TreeNode& node : tree.nodes) {
    if (node.role == NodeRole::leaf) continue;
    GroupGrid grid = build_group_grid(group_coords(inst, tree, node));
    for (const Point3& v : grid.vertices) vertex_set.insert(v);
    for (auto [u, v] : grid.edges) {
      Point3 a = grid.vertices[u];
      Point3 b = grid.vertices[v];
      if (b < a) std::swap(a, b);
      edge_set.insert({a, b});
    }
  }

  // Obstacle clipping: drop vertices and edges intersecting any inflated
  // obstacle (closed intersection).
  std::set<Point3> removed;
  for (const Point3& v : vertex_set) {
    for (const Obstacle& o : inst.obstacles) {
      if (point_hits_obstacle(v, o)) {
        removed.insert(v);
        break;
      }
    }
  }

  GridGraph g;
  g.tree_id = tree.id;
  std::map<Point3, std::int32_t> vertex_index;
  for (const Point3& v : vertex_set) {
    if (removed.count(v)) continue;
    vertex_index.emplace(v, static_cast<std::int32_t>(g.vertices.size()));
    g.vertices.push_back(v);
  }

  std::vector<std::pair<std::int32_t, std::int32_t>> corridors;
  for (const CoordEdge& e : edge_set) {
    auto ia = vertex_index.find(e.a);
    auto ib = vertex_index.find(e.b);
    if (ia == vertex_index.end() || ib == vertex_index.end()) continue;
    bool hit = false;
    for (const Obstacle& o : inst.obstacles) {
      if (segment_hits_obstacle(Segment3{e.a, e.b}, o)) {
        hit = true;
        break;
      }
    }
    if (hit) continue;
    corridors.push_back({std::min(ia->second, ib->second), std::max(ia->second, ib->second)});
  }
  std::sort(corridors.begin(), corridors.end());

  g.arcs.reserve(corridors.size() * 2);
  for (auto [u, v] : corridors) {
    Length len = geometry::l1_point_distance(g.vertices[u], g.vertices[v]);
    g.arcs.push_back({u, v, len});
    g.arcs.push_back({v, u, len});
  }

  // CSR over outgoing arcs.
  const std::int32_t n = static_cast<std::int32_t>(g.vertices.size());
  std::vector<std::int32_t> degree(n, 0);
  for (const Arc& a : g.arcs) ++degree[a.from];
  g.out_begin.assign(n + 1, 0);
  for (std::int32_t v = 0; v < n; ++v) g.out_begin[v + 1] = g.out_begin[v] + degree[v];
  g.out_arc.resize(g.arcs.size());
  std::vector<std::int32_t> cursor(g.out_begin.begin(), g.out_begin.end() - 1);
  for (std::int32_t a = 0; a < static_cast<std::int32_t>(g.arcs.size()); ++a) {
    g.out_arc[cursor[g.arcs[a].from]++] = a;
  }

  // Admissible sets over the clipped graph.
  const Pipeline* pipe = inst.find_pipeline(tree.pipeline_id);
  for (const TreeNode& node : tree.nodes) {
    std::vector<std::int32_t>& set = g.admissible[node.id];
    switch (node.role) {
      case NodeRole::root:
        for (std::int32_t v = 0; v < n; ++v) {
          if (pipe && point_on_polyline(g.vertices[v], pipe->polyline)) set.push_back(v);
        }
        break;
      case NodeRole::intermediate:
        for (std::int32_t v = 0; v < n; ++v) {
          if (node.region.contains(g.vertices[v])) set.push_back(v);
        }
        break;
      case NodeRole::leaf: {
        auto it = vertex_index.find(node.point);
        if (it != vertex_index.end()) set.push_back(it->second);
        break;
      }
    }
    if (set.empty()) {
      throw DiscretizationError(DiscretizationError::Kind::empty_admissible_set, node.id,
                                "admissible vertex set of '" + node.id +
                                    "' is empty after obstacle clipping");
    }
  }

  // Early infeasibility certificate: each tree edge must connect some
  // admissible vertex of the parent to one of the child.
  for (const auto& [parent, child] : tree.tree_edges) {
    const std::vector<std::int32_t>& sources = g.admissible.at(parent);
    const std::vector<std::int32_t>& targets = g.admissible.at(child);
    std::vector<char> reached(n, 0);
    std::deque<std::int32_t> queue;
    for (std::int32_t v : sources) {
      reached[v] = 1;
      queue.push_back(v);
    }
    while (!queue.empty()) {
      std::int32_t v = queue.front();
      queue.pop_front();
      for (std::int32_t i = g.out_begin[v]; i < g.out_begin[v + 1]; ++i) {
        std::int32_t w = g.arcs[g.out_arc[i]].to;
        if (!reached[w]) {
          reached[w] = 1;
          queue.push_back(w);
        }
      }
    }
    bool ok = std::any_of(targets.begin(), targets.end(), [&](std::int32_t v) { return reached[v] != 0; });
    if (!ok) {
      throw DiscretizationError(DiscretizationError::Kind::disconnected_required_pair,
                                parent + "," + child,
                                "no surviving path between admissible vertices of '" + parent +
                                    "' and '" + child + "'");
    }
  }
  return g;
}

std::vector<GridGraph> assemble_all(const Instance& inst) {
  std::vector<GridGraph> out;
  out.reserve(inst.forest.size());
  for (std::size_t i = 0; i < inst.forest.size(); ++i) {
    GridGraph g = assemble_tree_graph(inst, inst.forest[i]);
    g.tree_index = static_cast<std::int32_t>(i);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace wirelayr::gridgen
