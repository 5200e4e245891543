#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace wirelayr::test_support {

using diagram::NodeRole;
using diagram::Pipeline;
using diagram::TreeNode;
using diagram::WiringTree;
using gridgen::GridGraph;

Length sampled_segment_distance(const Segment3& s, const Segment3& t) {
  auto points_of = [](const Segment3& seg) {
    std::vector<Point3> pts;
    Point3 cur = seg.a;
    pts.push_back(cur);
    int ax = seg.axis();
    if (ax >= 0) {
      std::int64_t step = seg.b[ax] > seg.a[ax] ? 1 : -1;
      while (cur[ax] != seg.b[ax]) {
        cur[ax] += step;
        pts.push_back(cur);
      }
    }
    return pts;
  };
  Length best = -1;
  for (const Point3& p : points_of(s)) {
    for (const Point3& q : points_of(t)) {
      Length d = geometry::l1_point_distance(p, q);
      if (best < 0 || d < best) best = d;
    }
  }
  return best;
}

namespace {

struct OraclePath {
  std::vector<Segment3> segments;
  Length length = 0;
};

// All simple paths between two vertices, as segment chains.
std::vector<OraclePath> enumerate_paths(const GridGraph& g, std::int32_t src, std::int32_t dst,
                                        std::size_t cap) {
  std::vector<OraclePath> out;
  if (src == dst) {
    out.push_back({});
    return out;
  }
  std::vector<char> visited(g.vertices.size(), 0);
  std::vector<std::int32_t> stack_arcs;

  auto emit = [&]() {
    OraclePath p;
    for (std::int32_t a : stack_arcs) {
      p.segments.push_back({g.vertices[g.arcs[a].from], g.vertices[g.arcs[a].to]});
      p.length += g.arcs[a].len;
    }
    out.push_back(std::move(p));
    if (out.size() > cap) throw std::runtime_error("path enumeration cap exceeded");
  };

  std::function<void(std::int32_t)> dfs = [&](std::int32_t v) {
    if (v == dst) {
      emit();
      return;
    }
    visited[v] = 1;
    for (std::int32_t i = g.out_begin[v]; i < g.out_begin[v + 1]; ++i) {
      std::int32_t a = g.out_arc[i];
      if (visited[g.arcs[a].to]) continue;
      stack_arcs.push_back(a);
      dfs(g.arcs[a].to);
      stack_arcs.pop_back();
    }
    visited[v] = 0;
  };
  dfs(src);
  std::sort(out.begin(), out.end(),
            [](const OraclePath& a, const OraclePath& b) { return a.length < b.length; });
  return out;
}

struct OracleEdge {
  int tree;
  int edge_index;
  std::string parent;
  std::string child;
  std::vector<OraclePath> paths;  // sorted by length
};

bool edges_share_node(const WiringTree& t, int e1, int e2) {
  const auto& [p1, c1] = t.tree_edges[e1];
  const auto& [p2, c2] = t.tree_edges[e2];
  return p1 == p2 || p1 == c2 || c1 == p2 || c1 == c2;
}

bool paths_conflict(const OraclePath& a, const OraclePath& b, Length delta) {
  for (const Segment3& sa : a.segments) {
    for (const Segment3& sb : b.segments) {
      if (geometry::l1_segment_distance(sa, sb) < delta) return true;
    }
  }
  return false;
}

bool path_clears_pipelines(const OraclePath& p, const Instance& inst,
                           const std::string& own_pipeline) {
  if (inst.pipeline_clearance <= 0) return true;
  for (const Pipeline& pipe : inst.pipelines) {
    if (pipe.id == own_pipeline) continue;
    for (const Segment3& s : p.segments) {
      if (geometry::l1_segment_polyline_distance(s, pipe.polyline) < inst.pipeline_clearance) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

BruteForceResult brute_force_solve(const Instance& inst, const std::vector<GridGraph>& graphs,
                                   std::size_t path_cap) {
  // Gather per-tree placement slots (non-leaf nodes).
  struct Slot {
    int tree;
    std::string node;
    std::vector<std::int32_t> options;
  };
  std::vector<Slot> slots;
  for (std::size_t t = 0; t < inst.forest.size(); ++t) {
    for (const TreeNode& n : inst.forest[t].nodes) {
      if (n.role == NodeRole::leaf) continue;
      slots.push_back({static_cast<int>(t), n.id, graphs[t].admissible.at(n.id)});
    }
  }

  BruteForceResult best;
  std::map<std::pair<int, std::string>, std::int32_t> placed;

  std::function<void(std::size_t)> enum_placements = [&](std::size_t si) {
    if (si == slots.size()) {
      // Build per-edge path candidate lists under this placement.
      std::vector<OracleEdge> edges;
      for (std::size_t t = 0; t < inst.forest.size(); ++t) {
        const WiringTree& tree = inst.forest[t];
        for (std::size_t e = 0; e < tree.tree_edges.size(); ++e) {
          const auto& [parent, child] = tree.tree_edges[e];
          std::int32_t src = placed.at({static_cast<int>(t), parent});
          std::int32_t dst;
          const TreeNode* cn = tree.find_node(child);
          if (cn->role == NodeRole::leaf) {
            dst = graphs[t].admissible.at(child)[0];
          } else {
            dst = placed.at({static_cast<int>(t), child});
          }
          OracleEdge oe;
          oe.tree = static_cast<int>(t);
          oe.edge_index = static_cast<int>(e);
          oe.parent = parent;
          oe.child = child;
          oe.paths = enumerate_paths(graphs[t], src, dst, path_cap);
          // Pipeline clearance is a per-path filter.
          std::vector<OraclePath> kept;
          for (OraclePath& p : oe.paths) {
            if (path_clears_pipelines(p, inst, tree.pipeline_id)) kept.push_back(std::move(p));
          }
          oe.paths = std::move(kept);
          edges.push_back(std::move(oe));
        }
      }

      // Pick one path per edge, cheapest total, under pairwise separation.
      std::vector<const OraclePath*> chosen(edges.size(), nullptr);
      std::function<void(std::size_t, Length)> pick = [&](std::size_t ei, Length acc) {
        if (best.feasible && acc >= best.objective) return;
        if (ei == edges.size()) {
          best.feasible = true;
          best.objective = acc;
          return;
        }
        for (const OraclePath& p : edges[ei].paths) {
          if (best.feasible && acc + p.length >= best.objective) break;  // sorted
          bool ok = true;
          for (std::size_t ej = 0; ej < ei && ok; ++ej) {
            bool in_scope =
                edges[ei].tree != edges[ej].tree ||
                !edges_share_node(inst.forest[edges[ei].tree], edges[ei].edge_index,
                                  edges[ej].edge_index);
            if (in_scope && inst.delta > 0 && paths_conflict(p, *chosen[ej], inst.delta)) {
              ok = false;
            }
          }
          if (!ok) continue;
          chosen[ei] = &p;
          pick(ei + 1, acc + p.length);
        }
      };
      pick(0, 0);
      return;
    }
    for (std::int32_t v : slots[si].options) {
      placed[{slots[si].tree, slots[si].node}] = v;
      enum_placements(si + 1);
    }
    placed.erase({slots[si].tree, slots[si].node});
  };
  enum_placements(0);
  return best;
}

Length placement_enumeration_optimum(const Instance& inst,
                                     const std::vector<GridGraph>& graphs) {
  // Per tree independently: enumerate placements, sum per-edge shortest paths.
  Length total = 0;
  for (std::size_t t = 0; t < inst.forest.size(); ++t) {
    const WiringTree& tree = inst.forest[t];
    const GridGraph& g = graphs[t];

    // All-pairs shortest paths by repeated Dijkstra-free Bellman (graphs are
    // tiny here); plain |V| x |V| Floyd-Warshall keeps this oracle separate
    // from the engine's search code.
    const std::size_t n = g.vertices.size();
    constexpr Length inf = std::numeric_limits<Length>::max() / 4;
    std::vector<std::vector<Length>> dist(n, std::vector<Length>(n, inf));
    for (std::size_t v = 0; v < n; ++v) dist[v][v] = 0;
    for (const gridgen::Arc& a : g.arcs) {
      dist[a.from][a.to] = std::min(dist[a.from][a.to], a.len);
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (dist[i][k] >= inf) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (dist[k][j] >= inf) continue;
          dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
        }
      }
    }

    std::vector<const TreeNode*> nonleaf;
    for (const TreeNode& node : tree.nodes) {
      if (node.role != NodeRole::leaf) nonleaf.push_back(&node);
    }
    std::map<std::string, std::int32_t> placed;
    Length best = inf;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == nonleaf.size()) {
        Length sum = 0;
        for (const auto& [parent, child] : tree.tree_edges) {
          std::int32_t src = placed.at(parent);
          const TreeNode* cn = tree.find_node(child);
          std::int32_t dst = cn->role == NodeRole::leaf ? g.admissible.at(child)[0]
                                                        : placed.at(child);
          Length d = dist[src][dst];
          if (d >= inf) return;
          sum += d;
        }
        best = std::min(best, sum);
        return;
      }
      for (std::int32_t v : g.admissible.at(nonleaf[i]->id)) {
        placed[nonleaf[i]->id] = v;
        rec(i + 1);
      }
      placed.erase(nonleaf[i]->id);
    };
    rec(0);
    if (best >= inf) throw std::runtime_error("oracle: tree unroutable");
    total += best;
  }
  return total;
}

MpsModel parse_mps(const std::string& text) {
  MpsModel model;
  std::map<std::string, int> row_index;
  std::map<std::string, int> col_index;
  std::istringstream in(text);
  std::string line;
  enum Section { none, rows, columns, rhs, bounds } section = none;

  auto col_of = [&](const std::string& name) {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    int idx = static_cast<int>(model.columns.size());
    col_index[name] = idx;
    model.columns.push_back(name);
    model.objective.push_back(0.0);
    return idx;
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] != ' ') {
      std::string head;
      ls >> head;
      if (head == "ROWS") section = rows;
      else if (head == "COLUMNS") section = columns;
      else if (head == "RHS") section = rhs;
      else if (head == "BOUNDS") section = bounds;
      else if (head == "ENDATA") break;
      continue;
    }
    if (section == rows) {
      std::string sense, name;
      ls >> sense >> name;
      if (sense == "N") continue;  // objective row
      row_index[name] = static_cast<int>(model.rows.size());
      model.rows.push_back({sense[0], {}, 0.0});
    } else if (section == columns) {
      std::string col, row;
      double coeff;
      ls >> col;
      if (col == "MARKER") continue;
      while (ls >> row >> coeff) {
        if (row == "COST") {
          model.objective[col_of(col)] = coeff;
        } else {
          model.rows[row_index.at(row)].terms.push_back({col_of(col), coeff});
        }
      }
    } else if (section == rhs) {
      std::string tag, row;
      double value;
      ls >> tag;
      while (ls >> row >> value) model.rows[row_index.at(row)].rhs = value;
    }
  }
  return model;
}

std::optional<double> enumerate_binary_optimum(const MpsModel& model) {
  const std::size_t n = model.columns.size();
  if (n > 24) throw std::runtime_error("model too large for exhaustive enumeration");
  std::optional<double> best;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    bool ok = true;
    for (const MpsModel::Row& row : model.rows) {
      double lhs = 0.0;
      for (auto [c, coeff] : row.terms) {
        if (mask & (1ULL << c)) lhs += coeff;
      }
      if (row.sense == 'L' && lhs > row.rhs + 1e-9) ok = false;
      if (row.sense == 'G' && lhs < row.rhs - 1e-9) ok = false;
      if (row.sense == 'E' && std::abs(lhs - row.rhs) > 1e-9) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;
    double obj = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (mask & (1ULL << c)) obj += model.objective[c];
    }
    if (!best || obj < *best) best = obj;
  }
  return best;
}

}  // namespace wirelayr::test_support
