#include "wirelayr/milp.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "wirelayr/geometry.hpp"

namespace wirelayr::milp {

using diagram::NodeRole;
using diagram::Pipeline;
using diagram::TreeNode;
using diagram::WiringTree;
using geometry::l1_segment_distance;
using geometry::l1_segment_polyline_distance;
using geometry::Segment3;

std::int32_t MilpModel::install_col(std::int32_t tree, std::int32_t arc) const {
  return trees[tree].install_base + arc;
}

std::int32_t MilpModel::flow_col(std::int32_t tree, std::int32_t edge, std::int32_t arc) const {
  return trees[tree].flow_base + edge * trees[tree].n_arcs + arc;
}

std::int32_t MilpModel::place_col(std::int32_t tree, std::int32_t node_ord,
                                  std::int32_t position) const {
  return trees[tree].place_base + trees[tree].place_off[node_ord] + position;
}

VarRef MilpModel::var_of(std::int32_t col) const {
  for (std::int32_t t = 0; t < static_cast<std::int32_t>(trees.size()); ++t) {
    const TreeVars& tv = trees[t];
    if (col >= tv.install_base && col < tv.install_base + tv.n_arcs) {
      return {VarRef::Kind::install, t, -1, col - tv.install_base, -1, -1};
    }
    if (col >= tv.flow_base && col < tv.flow_base + tv.n_edges * tv.n_arcs) {
      std::int32_t rel = col - tv.flow_base;
      return {VarRef::Kind::flow, t, rel / tv.n_arcs, rel % tv.n_arcs, -1, -1};
    }
    std::int32_t place_count = tv.place_off.empty()
                                   ? 0
                                   : tv.place_off.back() +
                                         static_cast<std::int32_t>(tv.place_verts.back().size());
    if (col >= tv.place_base && col < tv.place_base + place_count) {
      std::int32_t rel = col - tv.place_base;
      for (std::int32_t n = 0; n < static_cast<std::int32_t>(tv.place_off.size()); ++n) {
        std::int32_t lo = tv.place_off[n];
        std::int32_t hi = lo + static_cast<std::int32_t>(tv.place_verts[n].size());
        if (rel >= lo && rel < hi) return {VarRef::Kind::place, t, -1, -1, n, rel - lo};
      }
    }
  }
  throw std::out_of_range("column out of range: " + std::to_string(col));
}

std::string MilpModel::column_name(std::int32_t col) const {
  VarRef v = var_of(col);
  switch (v.kind) {
    case VarRef::Kind::install:
      return "x" + std::to_string(v.tree) + "_" + std::to_string(v.arc);
    case VarRef::Kind::flow:
      return "f" + std::to_string(v.tree) + "_" + std::to_string(v.edge) + "_" +
             std::to_string(v.arc);
    case VarRef::Kind::place:
      return "y" + std::to_string(v.tree) + "_" + std::to_string(v.node) + "_" +
             std::to_string(v.position);
  }
  return "?";
}

namespace {

struct TreeIndex {
  const WiringTree* tree;
  const GridGraph* graph;
  std::vector<const TreeNode*> nodes;                       // tree node order
  std::vector<std::int32_t> node_ord;                       // into `nodes`
  std::vector<std::pair<std::int32_t, std::int32_t>> edges; // node ordinals
  std::vector<std::int32_t> nonleaf;                        // node ordinals
  std::vector<std::int32_t> leaves;                         // node ordinals

  std::int32_t ord_of(const std::string& id) const {
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(nodes.size()); ++i) {
      if (nodes[i]->id == id) return i;
    }
    throw std::runtime_error("unknown node id " + id);
  }
};

TreeIndex index_tree(const WiringTree& t, const GridGraph& g) {
  TreeIndex ti;
  ti.tree = &t;
  ti.graph = &g;
  for (const TreeNode& n : t.nodes) ti.nodes.push_back(&n);
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(ti.nodes.size()); ++i) {
    if (ti.nodes[i]->role == NodeRole::leaf) {
      ti.leaves.push_back(i);
    } else {
      ti.nonleaf.push_back(i);
    }
  }
  for (const auto& [p, c] : t.tree_edges) ti.edges.push_back({ti.ord_of(p), ti.ord_of(c)});
  return ti;
}

}  // namespace

MilpModel build_core_model(const std::vector<GridGraph>& graphs, const Instance& inst) {
  MilpModel model;
  std::vector<TreeIndex> idx;
  for (std::size_t t = 0; t < inst.forest.size(); ++t) {
    idx.push_back(index_tree(inst.forest[t], graphs[t]));
  }

  // Column layout, family-major.
  std::int32_t col = 0;
  model.trees.resize(idx.size());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    MilpModel::TreeVars& tv = model.trees[t];
    tv.n_arcs = static_cast<std::int32_t>(idx[t].graph->arcs.size());
    tv.n_edges = static_cast<std::int32_t>(idx[t].edges.size());
    tv.install_base = col;
    col += tv.n_arcs;
  }
  for (std::size_t t = 0; t < idx.size(); ++t) {
    model.trees[t].flow_base = col;
    col += model.trees[t].n_edges * model.trees[t].n_arcs;
  }
  for (std::size_t t = 0; t < idx.size(); ++t) {
    MilpModel::TreeVars& tv = model.trees[t];
    tv.place_base = col;
    std::int32_t off = 0;
    for (std::int32_t ord : idx[t].nonleaf) {
      const TreeNode* n = idx[t].nodes[ord];
      tv.place_nodes.push_back(n->id);
      tv.place_off.push_back(off);
      tv.place_verts.push_back(idx[t].graph->admissible.at(n->id));
      off += static_cast<std::int32_t>(tv.place_verts.back().size());
    }
    col += off;
  }
  model.num_cols = col;
  model.objective.assign(col, 0);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    for (std::int32_t a = 0; a < model.trees[t].n_arcs; ++a) {
      model.objective[model.install_col(static_cast<std::int32_t>(t), a)] =
          idx[t].graph->arcs[a].len;
    }
    model.big_m += model.trees[t].n_arcs;
  }

  auto place_ord_of_node = [&](std::size_t t, std::int32_t node_ord) {
    const TreeIndex& ti = idx[t];
    std::int32_t k = 0;
    for (std::int32_t ord : ti.nonleaf) {
      if (ord == node_ord) return k;
      ++k;
    }
    return -1;  // leaf
  };

  // (1) placement rows.
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const MilpModel::TreeVars& tv = model.trees[t];
    for (std::int32_t n = 0; n < static_cast<std::int32_t>(tv.place_nodes.size()); ++n) {
      LinearConstraint row;
      row.tag = RowTag::placement;
      row.sense = Sense::eq;
      row.rhs = 1;
      for (std::int32_t p = 0; p < static_cast<std::int32_t>(tv.place_verts[n].size()); ++p) {
        row.terms.push_back({model.place_col(static_cast<std::int32_t>(t), n, p), 1});
      }
      model.rows.push_back(std::move(row));
    }
  }

  // (2)-(4) flow balance, one row per (tree edge, vertex). One unit of flow
  // leaves the parent's chosen vertex and arrives at the child's; overlapping
  // source and sink memberships combine in one row.
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const TreeIndex& ti = idx[t];
    const GridGraph& g = *ti.graph;
    const std::int32_t nv = static_cast<std::int32_t>(g.vertices.size());
    for (std::int32_t e = 0; e < static_cast<std::int32_t>(ti.edges.size()); ++e) {
      auto [s_ord, c_ord] = ti.edges[e];
      const TreeNode* c = ti.nodes[c_ord];
      std::int32_t s_place = place_ord_of_node(t, s_ord);
      std::int32_t c_place = place_ord_of_node(t, c_ord);
      const bool child_leaf = (c->role == NodeRole::leaf);
      const std::int32_t leaf_vertex = child_leaf ? g.admissible.at(c->id)[0] : -1;

      // vertex -> placement position maps for the two endpoints.
      std::vector<std::int32_t> s_pos(nv, -1), c_pos(nv, -1);
      {
        const auto& verts = model.trees[t].place_verts[s_place];
        for (std::int32_t p = 0; p < static_cast<std::int32_t>(verts.size()); ++p) {
          s_pos[verts[p]] = p;
        }
      }
      if (!child_leaf) {
        const auto& verts = model.trees[t].place_verts[c_place];
        for (std::int32_t p = 0; p < static_cast<std::int32_t>(verts.size()); ++p) {
          c_pos[verts[p]] = p;
        }
      }

      for (std::int32_t v = 0; v < nv; ++v) {
        LinearConstraint row;
        row.tag = RowTag::flow_balance;
        row.sense = Sense::eq;
        row.rhs = (child_leaf && v == leaf_vertex) ? 1 : 0;
        for (std::int32_t i = g.out_begin[v]; i < g.out_begin[v + 1]; ++i) {
          std::int32_t a = g.out_arc[i];
          row.terms.push_back({model.flow_col(static_cast<std::int32_t>(t), e, a), -1});
          row.terms.push_back(
              {model.flow_col(static_cast<std::int32_t>(t), e, GridGraph::reverse_of(a)), 1});
        }
        if (s_pos[v] >= 0) {
          row.terms.push_back({model.place_col(static_cast<std::int32_t>(t), s_place, s_pos[v]), 1});
        }
        if (!child_leaf && c_pos[v] >= 0) {
          row.terms.push_back(
              {model.place_col(static_cast<std::int32_t>(t), c_place, c_pos[v]), -1});
        }
        model.rows.push_back(std::move(row));
      }
    }
  }

  // (5) coupling: routing only on installed arcs.
  for (std::size_t t = 0; t < idx.size(); ++t) {
    for (std::int32_t e = 0; e < model.trees[t].n_edges; ++e) {
      for (std::int32_t a = 0; a < model.trees[t].n_arcs; ++a) {
        LinearConstraint row;
        row.tag = RowTag::coupling;
        row.sense = Sense::le;
        row.rhs = 0;
        row.terms.push_back({model.flow_col(static_cast<std::int32_t>(t), e, a), 1});
        row.terms.push_back({model.install_col(static_cast<std::int32_t>(t), a), -1});
        model.rows.push_back(std::move(row));
      }
    }
  }

  // (6) leaf degree: exactly one incoming installed arc, none outgoing.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const TreeIndex& ti = idx[t];
      const GridGraph& g = *ti.graph;
      for (std::int32_t leaf_ord : ti.leaves) {
        std::int32_t lv = g.admissible.at(ti.nodes[leaf_ord]->id)[0];
        LinearConstraint row;
        row.tag = pass == 0 ? RowTag::leaf_in : RowTag::leaf_out;
        row.sense = Sense::eq;
        row.rhs = pass == 0 ? 1 : 0;
        for (std::int32_t i = g.out_begin[lv]; i < g.out_begin[lv + 1]; ++i) {
          std::int32_t a = g.out_arc[i];
          std::int32_t arc = pass == 0 ? GridGraph::reverse_of(a) : a;
          row.terms.push_back({model.install_col(static_cast<std::int32_t>(t), arc), 1});
        }
        model.rows.push_back(std::move(row));
      }
    }
  }

  // (7) antiparallel exclusion per tree edge and corridor.
  for (std::size_t t = 0; t < idx.size(); ++t) {
    for (std::int32_t e = 0; e < model.trees[t].n_edges; ++e) {
      for (std::int32_t c = 0; c < model.trees[t].n_arcs / 2; ++c) {
        LinearConstraint row;
        row.tag = RowTag::unidir;
        row.sense = Sense::le;
        row.rhs = 1;
        row.terms.push_back({model.flow_col(static_cast<std::int32_t>(t), e, 2 * c), 1});
        row.terms.push_back({model.flow_col(static_cast<std::int32_t>(t), e, 2 * c + 1), 1});
        model.rows.push_back(std::move(row));
      }
    }
  }
  return model;
}

namespace {

// Uniform-cell spatial index over corridor bounding boxes.
class SegmentBuckets {
 public:
  SegmentBuckets(const GridGraph& g, std::int64_t cell) : graph_(g), cell_(cell) {
    for (std::int32_t c = 0; c < g.corridor_count(); ++c) {
      visit_cells(g.corridor_segment(c), 0, [&](std::tuple<std::int64_t, std::int64_t, std::int64_t> key) {
        buckets_[key].push_back(c);
      });
    }
  }

  template <typename Fn>
  void for_near(const Segment3& seg, std::int64_t radius, Fn&& fn) const {
    last_seen_.assign(graph_.corridor_count(), 0);
    ++stamp_;
    visit_cells(seg, radius, [&](std::tuple<std::int64_t, std::int64_t, std::int64_t> key) {
      auto it = buckets_.find(key);
      if (it == buckets_.end()) return;
      for (std::int32_t c : it->second) {
        if (last_seen_[c] == stamp_) continue;
        last_seen_[c] = stamp_;
        fn(c);
      }
    });
  }

 private:
  template <typename Fn>
  void visit_cells(const Segment3& seg, std::int64_t radius, Fn&& fn) const {
    std::int64_t lo[3], hi[3];
    for (int ax = 0; ax < 3; ++ax) {
      std::int64_t a = std::min(seg.a[ax], seg.b[ax]) - radius;
      std::int64_t b = std::max(seg.a[ax], seg.b[ax]) + radius;
      lo[ax] = a >= 0 ? a / cell_ : (a - cell_ + 1) / cell_;
      hi[ax] = b >= 0 ? b / cell_ : (b - cell_ + 1) / cell_;
    }
    for (std::int64_t x = lo[0]; x <= hi[0]; ++x) {
      for (std::int64_t y = lo[1]; y <= hi[1]; ++y) {
        for (std::int64_t z = lo[2]; z <= hi[2]; ++z) {
          fn(std::tuple{x, y, z});
        }
      }
    }
  }

  const GridGraph& graph_;
  std::int64_t cell_;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::vector<std::int32_t>> buckets_;
  mutable std::vector<std::uint32_t> last_seen_;
  mutable std::uint32_t stamp_ = 0;
};

}  // namespace

bool ConflictCatalog::same_tree_conflict(std::int32_t tree, std::int32_t ca, std::int32_t cb) const {
  if (tree >= static_cast<std::int32_t>(same_tree_sets.size())) return false;
  auto key = std::minmax(ca, cb);
  return same_tree_sets[tree].count({key.first, key.second}) > 0;
}

ConflictCatalog build_conflict_catalog(const std::vector<GridGraph>& graphs, const Instance& inst) {
  ConflictCatalog cat;
  cat.same_tree_sets.resize(graphs.size());
  const Length delta = inst.delta;
  const std::int64_t cell = std::max<std::int64_t>(4 * std::max<Length>(delta, 1), 32);

  if (delta > 0) {
    std::vector<SegmentBuckets> buckets;
    buckets.reserve(graphs.size());
    for (const GridGraph& g : graphs) buckets.emplace_back(g, cell);

    for (std::size_t tb = 0; tb < graphs.size(); ++tb) {
      for (std::int32_t cb = 0; cb < graphs[tb].corridor_count(); ++cb) {
        Segment3 seg_b = graphs[tb].corridor_segment(cb);
        // Cross-tree pairs against every earlier tree.
        for (std::size_t ta = 0; ta < tb; ++ta) {
          std::vector<std::int32_t> near;
          buckets[ta].for_near(seg_b, delta, [&](std::int32_t ca) { near.push_back(ca); });
          std::sort(near.begin(), near.end());
          for (std::int32_t ca : near) {
            if (l1_segment_distance(graphs[ta].corridor_segment(ca), seg_b) < delta) {
              cat.cross_pairs.push_back({{static_cast<std::int32_t>(ta), ca},
                                         {static_cast<std::int32_t>(tb), cb}});
            }
          }
        }
        // Same-tree pairs (corridor identity excluded; scoping to node-disjoint
        // tree edges happens at enforcement time).
        std::vector<std::int32_t> near;
        buckets[tb].for_near(seg_b, delta, [&](std::int32_t ca) {
          if (ca < cb) near.push_back(ca);
        });
        std::sort(near.begin(), near.end());
        for (std::int32_t ca : near) {
          if (l1_segment_distance(graphs[tb].corridor_segment(ca), seg_b) < delta) {
            cat.same_tree_pairs.push_back({static_cast<std::int32_t>(tb), ca, cb});
            cat.same_tree_sets[tb].insert({ca, cb});
          }
        }
      }
    }
  }

  for (const auto& [a, b] : cat.cross_pairs) {
    cat.cross_neighbors[a].push_back(b);
    cat.cross_neighbors[b].push_back(a);
  }
  for (auto& [ref, list] : cat.cross_neighbors) std::sort(list.begin(), list.end());

  // Constraint (9): arcs of trees anchored to a different pipeline must keep
  // the pipeline clearance from every foreign pipeline.
  const Length clearance = inst.pipeline_clearance;
  if (clearance > 0) {
    for (std::size_t t = 0; t < graphs.size(); ++t) {
      const std::string& own = inst.forest[t].pipeline_id;
      for (std::int32_t c = 0; c < graphs[t].corridor_count(); ++c) {
        Segment3 seg = graphs[t].corridor_segment(c);
        for (const Pipeline& pipe : inst.pipelines) {
          if (pipe.id == own) continue;
          if (l1_segment_polyline_distance(seg, pipe.polyline) < clearance) {
            cat.pipeline_forbidden.push_back({static_cast<std::int32_t>(t), c});
            break;
          }
        }
      }
    }
  }
  return cat;
}

std::vector<std::pair<std::pair<std::int32_t, std::int32_t>, std::pair<std::int32_t, std::int32_t>>>
ConflictCatalog::directed_arc_pairs(const std::vector<GridGraph>&) const {
  std::vector<std::pair<std::pair<std::int32_t, std::int32_t>, std::pair<std::int32_t, std::int32_t>>>
      out;
  auto expand = [&](std::int32_t ta, std::int32_t ca, std::int32_t tb, std::int32_t cb) {
    for (std::int32_t da = 0; da < 2; ++da) {
      for (std::int32_t db = 0; db < 2; ++db) {
        out.push_back({{ta, 2 * ca + da}, {tb, 2 * cb + db}});
      }
    }
  };
  for (const auto& [a, b] : cross_pairs) expand(a.tree, a.corridor, b.tree, b.corridor);
  for (const auto& [t, ca, cb] : same_tree_pairs) expand(t, ca, t, cb);
  return out;
}

std::optional<LinearConstraint> materialize_arc_safety_row(const MilpModel& model,
                                                           const ConflictCatalog& catalog,
                                                           std::int32_t tree, std::int32_t arc) {
  CorrRef ref{tree, GridGraph::corridor_of(arc)};
  auto it = catalog.cross_neighbors.find(ref);
  if (it == catalog.cross_neighbors.end() || it->second.empty()) return std::nullopt;
  LinearConstraint row;
  row.tag = RowTag::safety_arc;
  row.sense = Sense::le;
  row.rhs = model.big_m;
  for (const CorrRef& nb : it->second) {
    row.terms.push_back({model.install_col(nb.tree, 2 * nb.corridor), 1});
    row.terms.push_back({model.install_col(nb.tree, 2 * nb.corridor + 1), 1});
  }
  row.terms.push_back({model.install_col(tree, arc), model.big_m});
  return row;
}

LinearConstraint materialize_pipeline_fixing(const MilpModel& model, std::int32_t tree,
                                             std::int32_t arc) {
  LinearConstraint row;
  row.tag = RowTag::safety_pipeline;
  row.sense = Sense::eq;
  row.rhs = 0;
  row.terms.push_back({model.install_col(tree, arc), 1});
  return row;
}

void add_all_safety_rows(MilpModel& model, const ConflictCatalog& catalog,
                         const std::vector<GridGraph>& graphs, const Instance& inst) {
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    for (std::int32_t a = 0; a < static_cast<std::int32_t>(graphs[t].arcs.size()); ++a) {
      if (auto row = materialize_arc_safety_row(model, catalog, static_cast<std::int32_t>(t), a)) {
        model.rows.push_back(std::move(*row));
      }
    }
  }

  // Same-tree enforcement is flow-based: for tree edges that share no node,
  // conflicting corridors (including the same corridor in either orientation)
  // exclude each other.
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    const WiringTree& wt = inst.forest[t];
    std::vector<std::pair<std::int32_t, std::int32_t>> disjoint;
    for (std::size_t i = 0; i < wt.tree_edges.size(); ++i) {
      for (std::size_t j = i + 1; j < wt.tree_edges.size(); ++j) {
        const auto& [p1, c1] = wt.tree_edges[i];
        const auto& [p2, c2] = wt.tree_edges[j];
        if (p1 != p2 && p1 != c2 && c1 != p2 && c1 != c2) {
          disjoint.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
        }
      }
    }
    auto emit = [&](std::int32_t e1, std::int32_t c1, std::int32_t e2, std::int32_t c2) {
      for (std::int32_t d1 = 0; d1 < 2; ++d1) {
        for (std::int32_t d2 = 0; d2 < 2; ++d2) {
          LinearConstraint row;
          row.tag = RowTag::safety_arc;
          row.sense = Sense::le;
          row.rhs = 1;
          row.terms.push_back(
              {model.flow_col(static_cast<std::int32_t>(t), e1, 2 * c1 + d1), 1});
          row.terms.push_back(
              {model.flow_col(static_cast<std::int32_t>(t), e2, 2 * c2 + d2), 1});
          model.rows.push_back(std::move(row));
        }
      }
    };
    for (auto [e1, e2] : disjoint) {
      for (std::int32_t c = 0; c < graphs[t].corridor_count(); ++c) emit(e1, c, e2, c);
      for (const auto& [tt, ca, cb] : catalog.same_tree_pairs) {
        if (tt != static_cast<std::int32_t>(t)) continue;
        emit(e1, ca, e2, cb);
        emit(e1, cb, e2, ca);
      }
    }
  }

  for (const CorrRef& ref : catalog.pipeline_forbidden) {
    model.rows.push_back(materialize_pipeline_fixing(model, ref.tree, 2 * ref.corridor));
    model.rows.push_back(materialize_pipeline_fixing(model, ref.tree, 2 * ref.corridor + 1));
  }
}

namespace {

const char* row_prefix(RowTag tag) {
  switch (tag) {
    case RowTag::placement: return "PL";
    case RowTag::flow_balance: return "FB";
    case RowTag::coupling: return "CP";
    case RowTag::leaf_in: return "LI";
    case RowTag::leaf_out: return "LO";
    case RowTag::unidir: return "UD";
    case RowTag::safety_arc: return "SA";
    case RowTag::safety_pipeline: return "SQ";
  }
  return "RW";
}

std::vector<std::string> row_names(const MilpModel& model) {
  std::vector<std::string> names;
  names.reserve(model.rows.size());
  std::map<RowTag, int> counters;
  for (const LinearConstraint& row : model.rows) {
    names.push_back(std::string(row_prefix(row.tag)) + std::to_string(counters[row.tag]++));
  }
  return names;
}

void write_mps(const MilpModel& model, std::ostream& out) {
  std::vector<std::string> rnames = row_names(model);
  out << "NAME          WIRELAYR\n";
  out << "ROWS\n";
  out << " N  COST\n";
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    char sense = model.rows[r].sense == Sense::le ? 'L' : (model.rows[r].sense == Sense::ge ? 'G' : 'E');
    out << " " << sense << "  " << rnames[r] << "\n";
  }

  // Transpose to column-major entries.
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> by_col(model.num_cols);
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    for (const auto& [c, coeff] : model.rows[r].terms) by_col[c].push_back({r, coeff});
  }

  out << "COLUMNS\n";
  out << "    MARKER                 'MARKER'                 'INTORG'\n";
  auto entry = [&](const std::string& col, const std::string& row, std::int64_t coeff) {
    out << "    " << col;
    for (std::size_t i = col.size(); i < 10; ++i) out << ' ';
    out << row;
    for (std::size_t i = row.size(); i < 10; ++i) out << ' ';
    out << coeff << "\n";
  };
  for (std::int32_t c = 0; c < model.num_cols; ++c) {
    std::string name = model.column_name(c);
    if (model.objective[c] != 0) entry(name, "COST", model.objective[c]);
    for (const auto& [r, coeff] : by_col[c]) entry(name, rnames[r], coeff);
  }
  out << "    MARKER                 'MARKER'                 'INTEND'\n";

  out << "RHS\n";
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    if (model.rows[r].rhs != 0) entry("RHS", rnames[r], model.rows[r].rhs);
  }
  out << "BOUNDS\n";
  for (std::int32_t c = 0; c < model.num_cols; ++c) {
    out << " BV BND       " << model.column_name(c) << "\n";
  }
  out << "ENDATA\n";
}

void write_lp(const MilpModel& model, std::ostream& out) {
  std::vector<std::string> rnames = row_names(model);
  out << "Minimize\n obj:";
  {
    std::size_t line = 5;
    bool first = true;
    for (std::int32_t c = 0; c < model.num_cols; ++c) {
      if (model.objective[c] == 0) continue;
      std::string term = (first ? " " : " + ") + std::to_string(model.objective[c]) + " " +
                         model.column_name(c);
      first = false;
      if (line + term.size() > 200) {
        out << "\n  ";
        line = 2;
      }
      out << term;
      line += term.size();
    }
  }
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    const LinearConstraint& row = model.rows[r];
    out << " " << rnames[r] << ":";
    std::size_t line = rnames[r].size() + 2;
    bool first = true;
    for (const auto& [c, coeff] : row.terms) {
      std::string term;
      if (coeff >= 0) {
        term = (first ? " " : " + ") + (coeff == 1 ? "" : std::to_string(coeff) + " ") +
               model.column_name(c);
      } else {
        term = " - " + (coeff == -1 ? "" : std::to_string(-coeff) + " ") + model.column_name(c);
      }
      first = false;
      if (line + term.size() > 200) {
        out << "\n  ";
        line = 2;
      }
      out << term;
      line += term.size();
    }
    const char* rel = row.sense == Sense::le ? " <= " : (row.sense == Sense::ge ? " >= " : " = ");
    out << rel << row.rhs << "\n";
  }
  out << "Binaries\n";
  {
    std::size_t line = 0;
    for (std::int32_t c = 0; c < model.num_cols; ++c) {
      std::string name = model.column_name(c);
      if (line + name.size() + 1 > 200) {
        out << "\n";
        line = 0;
      }
      out << " " << name;
      line += name.size() + 1;
    }
  }
  out << "\nEnd\n";
}

}  // namespace

void export_model(const MilpModel& model, ModelFormat format, std::ostream& out) {
  if (format == ModelFormat::mps) {
    write_mps(model, out);
  } else {
    write_lp(model, out);
  }
}

void export_model_file(const MilpModel& model, ModelFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  export_model(model, format, out);
}

}  // namespace wirelayr::milp
