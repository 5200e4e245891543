#include "wirelayr/engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace wirelayr::engine {

using diagram::NodeRole;
using diagram::TreeNode;
using diagram::WiringTree;
using milp::CorrRef;

namespace {

struct TimeUp {};

class Clock {
 public:
  explicit Clock(double limit_s) : unlimited_(limit_s <= 0) {
    if (!unlimited_) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(limit_s));
    }
  }

  bool expired() const { return !unlimited_ && std::chrono::steady_clock::now() >= deadline_; }

 private:
  bool unlimited_;
  std::chrono::steady_clock::time_point deadline_;
};

Length sat_add(Length a, Length b) {
  if (a >= kInfLength || b >= kInfLength) return kInfLength;
  return a + b;
}

// ---------------------------------------------------------------------------
// Tree topology resolved to node ordinals.

struct Topo {
  const WiringTree* tree = nullptr;
  const GridGraph* graph = nullptr;
  std::vector<const TreeNode*> nodes;
  std::vector<std::vector<std::int32_t>> adm;            // admissible vertices per ordinal
  std::vector<std::pair<int, int>> edges;                // (parent, child) ordinals
  std::vector<std::vector<int>> edges_from;              // parent ordinal -> edge ids
  std::vector<int> nonleaf;
  std::vector<int> bfs_order;                            // ordinals, root first
  std::vector<int> bfs_edges;
  std::vector<std::pair<int, int>> disjoint_edge_pairs;  // tree edges sharing no node
  std::set<std::pair<int, int>> disjoint_set;
  int root = -1;

  int ord_of(const std::string& id) const {
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      if (nodes[i]->id == id) return i;
    }
    throw std::runtime_error("unknown node id " + id);
  }

  bool disjoint(int e1, int e2) const {
    auto key = std::minmax(e1, e2);
    return disjoint_set.count({key.first, key.second}) > 0;
  }
};

Topo build_topo(const WiringTree& t, const GridGraph& g) {
  Topo topo;
  topo.tree = &t;
  topo.graph = &g;
  for (const TreeNode& n : t.nodes) topo.nodes.push_back(&n);
  topo.adm.resize(topo.nodes.size());
  topo.edges_from.resize(topo.nodes.size());
  for (int i = 0; i < static_cast<int>(topo.nodes.size()); ++i) {
    topo.adm[i] = g.admissible.at(topo.nodes[i]->id);
    if (topo.nodes[i]->role != NodeRole::leaf) topo.nonleaf.push_back(i);
    if (topo.nodes[i]->role == NodeRole::root) topo.root = i;
  }
  for (const auto& [p, c] : t.tree_edges) {
    int e = static_cast<int>(topo.edges.size());
    topo.edges.push_back({topo.ord_of(p), topo.ord_of(c)});
    topo.edges_from[topo.edges.back().first].push_back(e);
  }
  std::deque<int> queue{topo.root};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    topo.bfs_order.push_back(v);
    for (int e : topo.edges_from[v]) {
      topo.bfs_edges.push_back(e);
      queue.push_back(topo.edges[e].second);
    }
  }
  for (std::size_t i = 0; i < topo.edges.size(); ++i) {
    for (std::size_t j = i + 1; j < topo.edges.size(); ++j) {
      auto [p1, c1] = topo.edges[i];
      auto [p2, c2] = topo.edges[j];
      if (p1 != p2 && p1 != c2 && c1 != p2 && c1 != c2) {
        topo.disjoint_edge_pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
        topo.disjoint_set.insert({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return topo;
}

// ---------------------------------------------------------------------------
// Deterministic Dijkstra with corridor bans; ties resolved by vertex index
// and first-found parent.

struct PathFinder {
  const GridGraph* g = nullptr;
  std::vector<Length> dist;
  std::vector<std::int32_t> parent_arc;

  void init(const GridGraph& graph) {
    g = &graph;
    dist.assign(graph.vertices.size(), kInfLength);
    parent_arc.assign(graph.vertices.size(), -1);
  }

  void run(std::int32_t src, const std::vector<char>& banned) {
    std::vector<std::int32_t> sources{src};
    run_multi(sources, banned);
  }

  void run_multi(const std::vector<std::int32_t>& sources, const std::vector<char>& banned) {
    std::fill(dist.begin(), dist.end(), kInfLength);
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    using Item = std::pair<Length, std::int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (std::int32_t s : sources) {
      dist[s] = 0;
      pq.push({0, s});
    }
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d != dist[v]) continue;
      for (std::int32_t i = g->out_begin[v]; i < g->out_begin[v + 1]; ++i) {
        std::int32_t a = g->out_arc[i];
        if (!banned.empty() && banned[GridGraph::corridor_of(a)]) continue;
        const gridgen::Arc& arc = g->arcs[a];
        Length nd = d + arc.len;
        if (nd < dist[arc.to]) {
          dist[arc.to] = nd;
          parent_arc[arc.to] = a;
          pq.push({nd, arc.to});
        }
      }
    }
  }

  bool path_to(std::int32_t src, std::int32_t dst, std::vector<std::int32_t>& arcs) const {
    arcs.clear();
    if (dist[dst] >= kInfLength) return false;
    std::int32_t cur = dst;
    while (cur != src) {
      std::int32_t a = parent_arc[cur];
      arcs.push_back(a);
      cur = g->arcs[a].from;
    }
    std::reverse(arcs.begin(), arcs.end());
    return true;
  }

  // Path back to whichever multi-source vertex reached dst.
  bool path_to_any(std::int32_t dst, std::vector<std::int32_t>& arcs, std::int32_t& src) const {
    arcs.clear();
    if (dist[dst] >= kInfLength) return false;
    std::int32_t cur = dst;
    while (parent_arc[cur] >= 0) {
      std::int32_t a = parent_arc[cur];
      arcs.push_back(a);
      cur = g->arcs[a].from;
    }
    src = cur;
    std::reverse(arcs.begin(), arcs.end());
    return true;
  }
};

// ---------------------------------------------------------------------------
// Mutable search state per tree.

struct EdgeData {
  std::vector<char> banned;                // per corridor
  std::vector<std::vector<Length>> table;  // [src pos][tgt pos] over admissible lists
  bool dirty = true;
};

struct TreeState {
  int global_index = 0;
  Topo topo;
  std::vector<EdgeData> edges;
  std::vector<std::vector<std::int32_t>> cand;  // per ordinal: positions into adm
  std::uint64_t version = 1;
  std::uint64_t dp_version = 0;
  Length dp_value = 0;
  PathFinder finder;
};

TreeState make_tree_state(int global_index, const WiringTree& tree, const GridGraph& graph) {
  TreeState ts;
  ts.global_index = global_index;
  ts.topo = build_topo(tree, graph);
  ts.edges.resize(ts.topo.edges.size());
  for (EdgeData& e : ts.edges) e.banned.assign(graph.corridor_count(), 0);
  ts.finder.init(graph);
  ts.cand.assign(ts.topo.nodes.size(), {});
  for (std::size_t ord = 0; ord < ts.topo.nodes.size(); ++ord) {
    ts.cand[ord].resize(ts.topo.adm[ord].size());
    for (std::int32_t p = 0; p < static_cast<std::int32_t>(ts.topo.adm[ord].size()); ++p) {
      ts.cand[ord][p] = p;
    }
  }
  return ts;
}

void ensure_table(TreeState& ts, int e) {
  EdgeData& ed = ts.edges[e];
  if (!ed.dirty) return;
  auto [s_ord, t_ord] = ts.topo.edges[e];
  const auto& src = ts.topo.adm[s_ord];
  const auto& tgt = ts.topo.adm[t_ord];
  ed.table.assign(src.size(), std::vector<Length>(tgt.size(), kInfLength));
  for (std::size_t sp = 0; sp < src.size(); ++sp) {
    ts.finder.run(src[sp], ed.banned);
    for (std::size_t tp = 0; tp < tgt.size(); ++tp) {
      ed.table[sp][tp] = ts.finder.dist[tgt[tp]];
    }
  }
  ed.dirty = false;
}

// Tree relaxation bound: cheapest joint placement and routing of the tree,
// ignoring safety interactions. Dynamic program over the rooted tree; tighter
// than (never below) the per-edge set-to-set shortest path sum.
Length tree_dp(TreeState& ts, std::vector<std::int32_t>* chosen_vertex = nullptr) {
  if (!chosen_vertex && ts.dp_version == ts.version) return ts.dp_value;
  for (std::size_t e = 0; e < ts.edges.size(); ++e) ensure_table(ts, static_cast<int>(e));

  const std::size_t n = ts.topo.nodes.size();
  std::vector<std::vector<Length>> cost(n);
  std::vector<std::vector<std::vector<std::int32_t>>> pick;
  if (chosen_vertex) pick.assign(n, {});

  for (auto it = ts.topo.bfs_order.rbegin(); it != ts.topo.bfs_order.rend(); ++it) {
    int ord = *it;
    const auto& cands = ts.cand[ord];
    cost[ord].assign(cands.size(), 0);
    if (chosen_vertex) {
      pick[ord].assign(cands.size(), std::vector<std::int32_t>(ts.topo.edges_from[ord].size(), -1));
    }
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      Length total = 0;
      int k = 0;
      for (int e : ts.topo.edges_from[ord]) {
        int child = ts.topo.edges[e].second;
        const auto& row = ts.edges[e].table[cands[ci]];
        Length best = kInfLength;
        std::int32_t best_tj = -1;
        for (std::size_t tj = 0; tj < ts.cand[child].size(); ++tj) {
          Length v = sat_add(row[ts.cand[child][tj]], cost[child][tj]);
          if (v < best) {
            best = v;
            best_tj = static_cast<std::int32_t>(tj);
          }
        }
        total = sat_add(total, best);
        if (chosen_vertex) pick[ord][ci][k] = best_tj;
        ++k;
      }
      cost[ord][ci] = total;
    }
  }

  Length bound = kInfLength;
  std::int32_t root_ci = -1;
  for (std::size_t ci = 0; ci < ts.cand[ts.topo.root].size(); ++ci) {
    if (cost[ts.topo.root][ci] < bound) {
      bound = cost[ts.topo.root][ci];
      root_ci = static_cast<std::int32_t>(ci);
    }
  }

  if (chosen_vertex) {
    chosen_vertex->assign(n, -1);
    if (root_ci >= 0 && bound < kInfLength) {
      std::deque<std::pair<int, std::int32_t>> queue{{ts.topo.root, root_ci}};
      while (!queue.empty()) {
        auto [ord, ci] = queue.front();
        queue.pop_front();
        (*chosen_vertex)[ord] = ts.topo.adm[ord][ts.cand[ord][ci]];
        int k = 0;
        for (int e : ts.topo.edges_from[ord]) {
          queue.push_back({ts.topo.edges[e].second, pick[ord][ci][k]});
          ++k;
        }
      }
    }
  } else {
    ts.dp_version = ts.version;
    ts.dp_value = bound;
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Integral candidates and the geometric violation scan.

struct Candidate {
  std::vector<std::vector<std::int32_t>> placement;           // [tree][ordinal] -> vertex
  std::vector<std::vector<std::vector<std::int32_t>>> paths;  // [tree][edge] -> arcs
  std::vector<std::vector<Length>> path_len;
  Length total = 0;

  void init(std::size_t n_trees) {
    placement.assign(n_trees, {});
    paths.assign(n_trees, {});
    path_len.assign(n_trees, {});
    total = 0;
  }

  bool has_tree(std::size_t t) const { return !placement[t].empty(); }
};

struct UsageMaps {
  std::vector<std::vector<char>> installed;                    // [tree][corridor]
  std::vector<std::vector<std::vector<std::int32_t>>> per_edge;  // [tree][edge] corridors
};

UsageMaps usage_of(const Candidate& cand, const std::vector<GridGraph>& graphs) {
  UsageMaps u;
  u.installed.resize(graphs.size());
  u.per_edge.resize(graphs.size());
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    if (!cand.has_tree(t)) continue;
    u.installed[t].assign(graphs[t].corridor_count(), 0);
    u.per_edge[t].resize(cand.paths[t].size());
    for (std::size_t e = 0; e < cand.paths[t].size(); ++e) {
      std::set<std::int32_t> used;
      for (std::int32_t a : cand.paths[t][e]) used.insert(GridGraph::corridor_of(a));
      u.per_edge[t][e].assign(used.begin(), used.end());
      for (std::int32_t c : used) u.installed[t][c] = 1;
    }
  }
  return u;
}

struct ScanHit {
  int kind = 0;  // 0 pipeline fixing, 1 cross-tree pair, 2 same-tree pair
  CorrRef a;
  CorrRef b;
  int e1 = -1;
  int e2 = -1;
  Length depth = 0;  // delta - distance

  friend bool operator<(const ScanHit& x, const ScanHit& y) {
    // pipeline fixings first, then deepest violations
    return std::tuple(x.kind == 0 ? 0 : 1, -x.depth, x.kind, x.a, x.b, x.e1, x.e2) <
           std::tuple(y.kind == 0 ? 0 : 1, -y.depth, y.kind, y.a, y.b, y.e1, y.e2);
  }
};

std::vector<ScanHit> scan_candidate(const Candidate& cand, const UsageMaps& usage,
                                    const std::vector<const Topo*>& topos,
                                    const std::vector<GridGraph>& graphs,
                                    const milp::ConflictCatalog& catalog, Length delta) {
  std::vector<ScanHit> hits;

  for (const CorrRef& ref : catalog.pipeline_forbidden) {
    if (!usage.installed[ref.tree].empty() && usage.installed[ref.tree][ref.corridor]) {
      hits.push_back({0, ref, ref, -1, -1, 0});
    }
  }
  for (const auto& [a, b] : catalog.cross_pairs) {
    if (usage.installed[a.tree].empty() || usage.installed[b.tree].empty()) continue;
    if (usage.installed[a.tree][a.corridor] && usage.installed[b.tree][b.corridor]) {
      Length d = geometry::l1_segment_distance(graphs[a.tree].corridor_segment(a.corridor),
                                               graphs[b.tree].corridor_segment(b.corridor));
      hits.push_back({1, a, b, -1, -1, delta - d});
    }
  }
  for (std::size_t t = 0; t < topos.size(); ++t) {
    if (usage.per_edge[t].empty() || !topos[t]) continue;
    const Topo& topo = *topos[t];
    for (auto [e1, e2] : topo.disjoint_edge_pairs) {
      for (std::int32_t u : usage.per_edge[t][e1]) {
        for (std::int32_t v : usage.per_edge[t][e2]) {
          bool conflict = (u == v);
          if (!conflict) conflict = catalog.same_tree_conflict(static_cast<std::int32_t>(t), u, v);
          if (!conflict) continue;
          Length d = (u == v) ? 0
                              : geometry::l1_segment_distance(graphs[t].corridor_segment(u),
                                                              graphs[t].corridor_segment(v));
          hits.push_back({2,
                          {static_cast<std::int32_t>(t), u},
                          {static_cast<std::int32_t>(t), v},
                          e1,
                          e2,
                          delta - d});
        }
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

// ---------------------------------------------------------------------------
// Materialized lazy rows.

struct FRow {
  std::int32_t tree = 0;
  std::int32_t e1 = 0;
  std::int32_t c1 = 0;
  std::int32_t e2 = 0;
  std::int32_t c2 = 0;
  friend auto operator<=>(const FRow&, const FRow&) = default;
};

struct Rows {
  std::vector<CorrRef> cross;  // aggregated big-M rows, one per corridor side
  std::set<CorrRef> cross_set;
  std::vector<FRow> frows;  // flow exclusion rows, same tree
  std::set<FRow> frow_set;
  std::set<CorrRef> pipe;  // constraint (9) fixings, applied as permanent bans
};

struct BanUndo {
  TreeState* ts;
  int edge;
  std::int32_t corridor;
  std::vector<std::vector<Length>> old_table;
  bool was_dirty;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-independent 128-bit signature of a ban set (per tree, edge, corridor).
struct BanHash {
  std::uint64_t h1 = 0x243f6a8885a308d3ULL;
  std::uint64_t h2 = 0x13198a2e03707344ULL;

  void toggle(std::int32_t tree, std::int32_t edge, std::int32_t corridor) {
    std::uint64_t base = (static_cast<std::uint64_t>(tree) << 42) ^
                         (static_cast<std::uint64_t>(edge) << 24) ^
                         static_cast<std::uint64_t>(corridor);
    h1 ^= splitmix64(base);
    h2 ^= splitmix64(base ^ 0xa5a5a5a5a5a5a5a5ULL);
  }

  std::pair<std::uint64_t, std::uint64_t> key() const { return {h1, h2}; }
};

// Proven subproblem lower bounds, keyed by ban-set signature. Sound across
// separation rounds: rows only accumulate, so optima only grow.
using Memo = std::map<std::pair<std::uint64_t, std::uint64_t>, Length>;

bool apply_ban(TreeState& ts, int edge, std::int32_t corridor, std::vector<BanUndo>* undo) {
  EdgeData& ed = ts.edges[edge];
  if (ed.banned[corridor]) return false;
  if (undo) undo->push_back({&ts, edge, corridor, std::move(ed.table), ed.dirty});
  ed.banned[corridor] = 1;
  ed.dirty = true;
  ts.version++;
  return true;
}

void undo_bans(std::vector<BanUndo>& undo) {
  for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
    EdgeData& ed = it->ts->edges[it->edge];
    ed.banned[it->corridor] = 0;
    ed.table = std::move(it->old_table);
    ed.dirty = it->was_dirty;
    it->ts->version++;
  }
  undo.clear();
}

// ---------------------------------------------------------------------------
// Exact component solve: DFS branch-and-bound on placements, then conflict
// dichotomies on corridors.

struct ComponentResult {
  bool infeasible = false;
  Length value = kInfLength;
  Candidate best;  // fragment over the component's trees
};

class ComponentSolver {
 public:
  ComponentSolver(std::vector<TreeState*> trees, const std::vector<GridGraph>& graphs,
                  const milp::ConflictCatalog& catalog, const Rows& rows, bool eager,
                  Length delta, const Clock& clock, std::int64_t& nodes, Memo& memo,
                  const Candidate* greedy, Length greedy_value)
      : trees_(std::move(trees)),
        graphs_(graphs),
        catalog_(catalog),
        eager_(eager),
        delta_(delta),
        clock_(clock),
        nodes_(nodes),
        memo_(memo),
        greedy_(greedy),
        ub_(greedy ? greedy_value : kInfLength) {
    for (const CorrRef& ref : rows.cross) {
      if (in_component(ref.tree)) cross_rows_.push_back(ref);
    }
    for (const FRow& r : rows.frows) {
      if (in_component(r.tree)) frows_.push_back(r);
    }
    // Seed the signature with the component identity and the bans already in
    // force (pipeline fixings accumulate across separation rounds).
    for (const TreeState* ts : trees_) {
      hash_.toggle(ts->global_index, -1, -1);
      for (std::size_t e = 0; e < ts->edges.size(); ++e) {
        const std::vector<char>& banned = ts->edges[e].banned;
        for (std::size_t c = 0; c < banned.size(); ++c) {
          if (banned[c]) {
            hash_.toggle(ts->global_index, static_cast<int>(e), static_cast<std::int32_t>(c));
          }
        }
      }
    }
  }

  ComponentResult run() {
    dfs();
    ComponentResult res;
    if (best_found_) {
      res.value = best_value_;
      res.best = std::move(best_);
      return res;
    }
    if (greedy_) {
      // Everything else was pruned against the greedy value, so the greedy
      // solution (feasible for any row subset) is optimal for this component.
      res.value = ub_;
      res.best.init(graphs_.size());
      for (TreeState* ts : trees_) {
        int t = ts->global_index;
        res.best.placement[t] = greedy_->placement[t];
        res.best.paths[t] = greedy_->paths[t];
        res.best.path_len[t] = greedy_->path_len[t];
      }
      res.best.total = ub_;
      return res;
    }
    res.infeasible = true;
    return res;
  }

 private:
  bool in_component(std::int32_t global_tree) const {
    for (const TreeState* ts : trees_) {
      if (ts->global_index == global_tree) return true;
    }
    return false;
  }

  TreeState* state_of(std::int32_t global_tree) const {
    for (TreeState* ts : trees_) {
      if (ts->global_index == global_tree) return ts;
    }
    throw std::logic_error("tree not in component");
  }

  void dfs() {
    if (clock_.expired()) throw TimeUp{};
    auto key = hash_.key();
    {
      auto it = memo_.find(key);
      if (it != memo_.end() && it->second >= ub_) return;
    }
    dfs_body();
    // Normal completion proves the subproblem optimum is at least the
    // incumbent value now in force.
    Length& slot = memo_[key];
    slot = std::max(slot, ub_);
  }

  void dfs_body() {
    ++nodes_;

    Length bound = 0;
    for (TreeState* ts : trees_) bound = sat_add(bound, tree_dp(*ts));
    if (bound >= ub_) return;

    // The relaxation (safety rows dropped, corridor bans kept) decomposes per
    // tree and the tree DP solves it exactly, so its optimum is integral:
    // decode placements and shortest paths, then branch on a violated row.
    Candidate cand;
    cand.init(graphs_.size());
    for (TreeState* ts : trees_) {
      int t = ts->global_index;
      const Topo& topo = ts->topo;
      std::vector<std::int32_t> chosen;
      tree_dp(*ts, &chosen);
      cand.placement[t] = std::move(chosen);
      cand.paths[t].resize(topo.edges.size());
      cand.path_len[t].assign(topo.edges.size(), 0);
      for (std::size_t e = 0; e < topo.edges.size(); ++e) {
        auto [s_ord, t_ord] = topo.edges[e];
        std::int32_t src = cand.placement[t][s_ord];
        std::int32_t dst = cand.placement[t][t_ord];
        if (src == dst) continue;
        ts->finder.run(src, ts->edges[e].banned);
        if (!ts->finder.path_to(src, dst, cand.paths[t][e])) return;  // defensive; bound was finite
        cand.path_len[t][e] = ts->finder.dist[dst];
        cand.total = sat_add(cand.total, cand.path_len[t][e]);
      }
    }
    UsageMaps usage = usage_of(cand, graphs_);

    // First violated safety row, if any.
    if (!eager_) {
      for (const CorrRef& a : cross_rows_) {
        if (!usage.installed[a.tree][a.corridor]) continue;
        auto it = catalog_.cross_neighbors.find(a);
        if (it == catalog_.cross_neighbors.end()) continue;
        bool violated = false;
        for (const CorrRef& nb : it->second) {
          if (usage.installed[nb.tree][nb.corridor]) {
            violated = true;
            break;
          }
        }
        if (!violated) continue;
        branch_cross(a, it->second);
        return;
      }
      for (const FRow& r : frows_) {
        const auto& u1 = usage.per_edge[r.tree][r.e1];
        const auto& u2 = usage.per_edge[r.tree][r.e2];
        if (std::binary_search(u1.begin(), u1.end(), r.c1) &&
            std::binary_search(u2.begin(), u2.end(), r.c2)) {
          branch_frow(r);
          return;
        }
      }
    } else {
      std::vector<const Topo*> topos(graphs_.size(), nullptr);
      for (TreeState* ts : trees_) topos[ts->global_index] = &ts->topo;
      std::vector<ScanHit> hits = scan_candidate(cand, usage, topos, graphs_, catalog_, delta_);
      if (!hits.empty()) {
        const ScanHit& h = hits.front();
        if (h.kind == 1) {
          branch_cross(h.a, catalog_.cross_neighbors.at(h.a));
        } else {
          branch_frow({h.a.tree, static_cast<std::int32_t>(h.e1), h.a.corridor,
                       static_cast<std::int32_t>(h.e2), h.b.corridor});
        }
        return;
      }
    }

    if (cand.total < ub_) {
      ub_ = cand.total;
      best_value_ = cand.total;
      best_ = std::move(cand);
      best_found_ = true;
    }
  }

  bool apply_tracked(TreeState& ts, int edge, std::int32_t corridor, std::vector<BanUndo>& undo) {
    if (!apply_ban(ts, edge, corridor, &undo)) return false;
    hash_.toggle(ts.global_index, edge, corridor);
    return true;
  }

  void undo_tracked(std::vector<BanUndo>& undo) {
    for (const BanUndo& u : undo) hash_.toggle(u.ts->global_index, u.edge, u.corridor);
    undo_bans(undo);
  }

  void branch_cross(const CorrRef& a, const std::vector<CorrRef>& neighbors) {
    TreeState* ts = state_of(a.tree);
    std::vector<BanUndo> undo;
    for (std::size_t e = 0; e < ts->edges.size(); ++e) {
      apply_tracked(*ts, static_cast<int>(e), a.corridor, undo);
    }
    if (!undo.empty()) dfs();
    undo_tracked(undo);

    for (const CorrRef& nb : neighbors) {
      TreeState* nts = state_of(nb.tree);
      for (std::size_t e = 0; e < nts->edges.size(); ++e) {
        apply_tracked(*nts, static_cast<int>(e), nb.corridor, undo);
      }
    }
    if (!undo.empty()) dfs();
    undo_tracked(undo);
  }

  void branch_frow(const FRow& r) {
    TreeState* ts = state_of(r.tree);
    std::vector<BanUndo> undo;
    if (apply_tracked(*ts, r.e1, r.c1, undo)) dfs();
    undo_tracked(undo);
    if (apply_tracked(*ts, r.e2, r.c2, undo)) dfs();
    undo_tracked(undo);
  }

  std::vector<TreeState*> trees_;
  const std::vector<GridGraph>& graphs_;
  const milp::ConflictCatalog& catalog_;
  bool eager_;
  Length delta_;
  const Clock& clock_;
  std::int64_t& nodes_;
  Memo& memo_;
  BanHash hash_;
  const Candidate* greedy_;
  Length ub_;
  std::vector<CorrRef> cross_rows_;
  std::vector<FRow> frows_;
  Candidate best_;
  Length best_value_ = kInfLength;
  bool best_found_ = false;
};

// ---------------------------------------------------------------------------
// Greedy incumbent: per-tree optimal placement ignoring conflicts, then
// sequential routing in BFS order avoiding already-claimed conflict zones.
// Catalog-clean by construction, so its value upper-bounds the true optimum.

struct GreedyOut {
  Candidate cand;
  std::vector<Length> tree_total;
};

std::optional<GreedyOut> build_greedy_ordered(std::vector<TreeState>& states,
                                              const std::vector<GridGraph>& graphs,
                                              const milp::ConflictCatalog& catalog,
                                              const std::vector<std::size_t>& order) {
  GreedyOut out;
  out.cand.init(states.size());
  out.tree_total.assign(states.size(), 0);

  // Per-tree conflict partner lookups.
  std::vector<std::map<std::int32_t, std::vector<std::int32_t>>> partners(states.size());
  for (const auto& [t, ca, cb] : catalog.same_tree_pairs) {
    partners[t][ca].push_back(cb);
    partners[t][cb].push_back(ca);
  }
  std::vector<std::vector<char>> pipe_banned(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    pipe_banned[t].assign(graphs[t].corridor_count(), 0);
  }
  for (const CorrRef& ref : catalog.pipeline_forbidden) {
    pipe_banned[ref.tree][ref.corridor] = 1;
  }

  struct Claim {
    std::int32_t tree;
    std::int32_t edge;
    std::int32_t corridor;
  };
  std::vector<Claim> claims;

  for (std::size_t t : order) {
    TreeState& ts = states[t];
    const Topo& topo = ts.topo;
    // Placements are decided edge by edge: the child lands on its nearest
    // admissible vertex reachable under the current claims, which lets later
    // trees steer around zones earlier trees occupied.
    std::vector<std::int32_t> placed(topo.nodes.size(), -1);
    out.cand.paths[t].resize(topo.edges.size());
    out.cand.path_len[t].assign(topo.edges.size(), 0);

    for (int e : topo.bfs_edges) {
      std::vector<char> banned = pipe_banned[t];
      for (std::size_t c = 0; c < ts.edges[e].banned.size(); ++c) {
        if (ts.edges[e].banned[c]) banned[c] = 1;
      }
      for (const Claim& cl : claims) {
        if (cl.tree != static_cast<std::int32_t>(t)) {
          CorrRef key{cl.tree, cl.corridor};
          auto it = catalog.cross_neighbors.find(key);
          if (it == catalog.cross_neighbors.end()) continue;
          for (const CorrRef& nb : it->second) {
            if (nb.tree == static_cast<std::int32_t>(t)) banned[nb.corridor] = 1;
          }
        } else if (topo.disjoint(e, cl.edge)) {
          banned[cl.corridor] = 1;
          auto it = partners[t].find(cl.corridor);
          if (it != partners[t].end()) {
            for (std::int32_t p : it->second) banned[p] = 1;
          }
        }
      }
      auto [s_ord, c_ord] = topo.edges[e];
      std::vector<std::int32_t> sources =
          placed[s_ord] >= 0 ? std::vector<std::int32_t>{placed[s_ord]} : topo.adm[s_ord];
      ts.finder.run_multi(sources, banned);
      std::int32_t dst = -1;
      Length best = kInfLength;
      for (std::int32_t v : topo.adm[c_ord]) {
        if (ts.finder.dist[v] < best) {
          best = ts.finder.dist[v];
          dst = v;
        }
      }
      if (dst < 0) return std::nullopt;
      std::int32_t src = -1;
      if (!ts.finder.path_to_any(dst, out.cand.paths[t][e], src)) return std::nullopt;
      placed[s_ord] = src;
      placed[c_ord] = dst;
      out.cand.path_len[t][e] = best;
      out.tree_total[t] = sat_add(out.tree_total[t], best);
      std::set<std::int32_t> used;
      for (std::int32_t a : out.cand.paths[t][e]) used.insert(GridGraph::corridor_of(a));
      for (std::int32_t c : used) {
        claims.push_back({static_cast<std::int32_t>(t), static_cast<std::int32_t>(e), c});
      }
    }
    // A childless root never routes; give it a deterministic anchor.
    if (placed[topo.root] < 0 && !topo.adm[topo.root].empty()) {
      placed[topo.root] = topo.adm[topo.root][0];
    }
    out.cand.placement[t] = placed;
    out.cand.total = sat_add(out.cand.total, out.tree_total[t]);
  }
  return out;
}

// Trees routed early can box later ones in, so retry with rotated tree
// orders before giving up on an incumbent.
std::optional<GreedyOut> build_greedy(std::vector<TreeState>& states,
                                      const std::vector<GridGraph>& graphs,
                                      const milp::ConflictCatalog& catalog) {
  const std::size_t n = states.size();
  std::optional<GreedyOut> best;
  for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = (k + i) % n;
    std::optional<GreedyOut> got = build_greedy_ordered(states, graphs, catalog, order);
    if (got && (!best || got->cand.total < best->cand.total)) best = std::move(got);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Component decomposition over trees coupled by materialized (or, in eager
// mode, cataloged) cross-tree conflicts.

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<int>> components_of(std::size_t n_trees, const Rows& rows,
                                            const milp::ConflictCatalog& catalog, bool eager) {
  UnionFind uf(static_cast<int>(n_trees));
  if (eager) {
    for (const auto& [a, b] : catalog.cross_pairs) uf.unite(a.tree, b.tree);
  } else {
    for (const CorrRef& a : rows.cross) {
      auto it = catalog.cross_neighbors.find(a);
      if (it == catalog.cross_neighbors.end()) continue;
      for (const CorrRef& nb : it->second) uf.unite(a.tree, nb.tree);
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int t = 0; t < static_cast<int>(n_trees); ++t) groups[uf.find(t)].push_back(t);
  std::vector<std::vector<int>> out;
  for (auto& [root, list] : groups) out.push_back(std::move(list));
  std::sort(out.begin(), out.end());
  return out;
}

ModelSolution solution_from_candidate(const Candidate& cand, const MilpModel& model,
                                      const std::vector<TreeState>& states) {
  ModelSolution sol;
  sol.value.assign(model.num_cols, 0);
  for (std::size_t t = 0; t < states.size(); ++t) {
    const Topo& topo = states[t].topo;
    const MilpModel::TreeVars& tv = model.trees[t];
    for (std::size_t k = 0; k < topo.nonleaf.size(); ++k) {
      std::int32_t vertex = cand.placement[t][topo.nonleaf[k]];
      const auto& verts = tv.place_verts[k];
      auto it = std::lower_bound(verts.begin(), verts.end(), vertex);
      if (it == verts.end() || *it != vertex) throw std::logic_error("placement not admissible");
      sol.value[model.place_col(static_cast<std::int32_t>(t), static_cast<std::int32_t>(k),
                                static_cast<std::int32_t>(it - verts.begin()))] = 1;
    }
    for (std::size_t e = 0; e < cand.paths[t].size(); ++e) {
      for (std::int32_t a : cand.paths[t][e]) {
        sol.value[model.flow_col(static_cast<std::int32_t>(t), static_cast<std::int32_t>(e), a)] = 1;
        sol.value[model.install_col(static_cast<std::int32_t>(t), a)] = 1;
      }
    }
  }
  return sol;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations.

SearchNode SearchNode::root_of(const Instance& inst, const std::vector<GridGraph>& graphs) {
  SearchNode node;
  node.candidates.resize(graphs.size());
  node.banned.resize(graphs.size());
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    for (const auto& [id, verts] : graphs[t].admissible) node.candidates[t][id] = verts;
    node.banned[t].assign(inst.forest[t].tree_edges.size(), {});
  }
  return node;
}

Length lower_bound(const Instance& inst, const std::vector<GridGraph>& graphs,
                   const SearchNode& node) {
  Length total = 0;
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    const GridGraph& g = graphs[t];
    PathFinder finder;
    finder.init(g);
    const auto& edges = inst.forest[t].tree_edges;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      auto src_it = node.candidates[t].find(edges[e].first);
      auto dst_it = node.candidates[t].find(edges[e].second);
      if (src_it == node.candidates[t].end() || dst_it == node.candidates[t].end() ||
          src_it->second.empty() || dst_it->second.empty()) {
        return kInfLength;
      }
      std::vector<char> banned(g.corridor_count(), 0);
      if (e < node.banned[t].size()) {
        for (std::int32_t c : node.banned[t][e]) banned[c] = 1;
      }
      finder.run_multi(src_it->second, banned);
      Length best = kInfLength;
      for (std::int32_t v : dst_it->second) best = std::min(best, finder.dist[v]);
      total = sat_add(total, best);
      if (total >= kInfLength) return kInfLength;
    }
  }
  return total;
}

ExtractResult extract_layout(const Instance& inst, const std::vector<GridGraph>& graphs,
                             const MilpModel& model, const ModelSolution& solution) {
  ExtractResult res;
  Layout& layout = res.layout;

  for (std::size_t t = 0; t < graphs.size(); ++t) {
    const WiringTree& tree = inst.forest[t];
    const GridGraph& g = graphs[t];
    const MilpModel::TreeVars& tv = model.trees[t];

    std::map<std::string, std::int32_t> vertex_of;
    for (std::size_t k = 0; k < tv.place_nodes.size(); ++k) {
      std::int32_t chosen = -1;
      for (std::int32_t p = 0; p < static_cast<std::int32_t>(tv.place_verts[k].size()); ++p) {
        if (!solution.value[model.place_col(static_cast<std::int32_t>(t),
                                            static_cast<std::int32_t>(k), p)]) {
          continue;
        }
        if (chosen >= 0) throw std::runtime_error("multiple placements for " + tv.place_nodes[k]);
        chosen = tv.place_verts[k][p];
      }
      if (chosen < 0) throw std::runtime_error("no placement for " + tv.place_nodes[k]);
      vertex_of[tv.place_nodes[k]] = chosen;
      layout.placements[tv.place_nodes[k]] = g.vertices[chosen];
    }
    for (const TreeNode& n : tree.nodes) {
      if (n.role == NodeRole::leaf) {
        vertex_of[n.id] = g.admissible.at(n.id)[0];
        layout.placements[n.id] = n.point;
      }
    }

    std::set<std::int32_t> installed_corridors;
    for (std::size_t e = 0; e < tree.tree_edges.size(); ++e) {
      const auto& [parent, child] = tree.tree_edges[e];
      std::int32_t src = vertex_of.at(parent);
      std::int32_t dst = vertex_of.at(child);

      std::vector<char> avail(g.arcs.size(), 0);
      std::size_t flow_arcs = 0;
      for (std::int32_t a = 0; a < static_cast<std::int32_t>(g.arcs.size()); ++a) {
        if (solution.value[model.flow_col(static_cast<std::int32_t>(t),
                                          static_cast<std::int32_t>(e), a)]) {
          avail[a] = 1;
          ++flow_arcs;
        }
      }

      EdgeRoute route;
      route.tree_id = tree.id;
      route.parent = parent;
      route.child = child;
      route.path.push_back(g.vertices[src]);
      std::int32_t cur = src;
      std::size_t used = 0;
      while (cur != dst) {
        std::int32_t next_arc = -1;
        for (std::int32_t i = g.out_begin[cur]; i < g.out_begin[cur + 1]; ++i) {
          std::int32_t a = g.out_arc[i];
          if (avail[a]) {
            next_arc = a;
            break;
          }
        }
        if (next_arc < 0) {
          throw std::runtime_error("flow of edge (" + parent + "," + child +
                                   ") does not reach the child placement");
        }
        avail[next_arc] = 0;
        ++used;
        route.length += g.arcs[next_arc].len;
        cur = g.arcs[next_arc].to;
        route.path.push_back(g.vertices[cur]);
        installed_corridors.insert(GridGraph::corridor_of(next_arc));
        if (used > g.arcs.size()) throw std::runtime_error("flow walk did not terminate");
      }
      if (used < flow_arcs) res.dropped_cycles = true;  // circulation ignored
      layout.routes.push_back(std::move(route));
    }

    std::vector<Segment3>& segs = layout.installed[tree.id];
    for (std::int32_t c : installed_corridors) {
      segs.push_back(g.corridor_segment(c));
      layout.total_length += g.arcs[2 * c].len;
    }
  }
  return res;
}

std::pair<std::optional<Layout>, SolveReport> solve(const Instance& inst,
                                                    const std::vector<GridGraph>& graphs,
                                                    const MilpModel& model,
                                                    const ConflictCatalog& catalog,
                                                    const SolveParams& params) {
  auto wall_start = std::chrono::steady_clock::now();
  Clock clock(params.time_limit_s);
  SolveReport rep;
  rep.threads = 1;  // search is sequential; bench parallelism is per instance
  rep.seed = params.seed;

  auto finish = [&](std::optional<Layout> layout) {
    rep.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return std::pair<std::optional<Layout>, SolveReport>{std::move(layout), rep};
  };

  std::vector<TreeState> states;
  states.reserve(graphs.size());
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    states.push_back(make_tree_state(static_cast<int>(t), inst.forest[t], graphs[t]));
  }

  Rows rows;
  if (params.eager_safety) {
    for (const CorrRef& ref : catalog.pipeline_forbidden) {
      rows.pipe.insert(ref);
      for (std::size_t e = 0; e < states[ref.tree].edges.size(); ++e) {
        apply_ban(states[ref.tree], static_cast<int>(e), ref.corridor, nullptr);
      }
    }
  }

  std::optional<GreedyOut> greedy = build_greedy(states, graphs, catalog);

  auto build_layout = [&](const Candidate& cand) {
    ModelSolution sol = solution_from_candidate(cand, model, states);
    ExtractResult ex = extract_layout(inst, graphs, model, sol);
    return ex.layout;
  };

  Length global_bound = 0;
  std::map<std::vector<int>, ComponentResult> cache;
  Memo memo;

  try {
    while (true) {
      ++rep.iterations;
      std::vector<std::vector<int>> comps =
          components_of(graphs.size(), rows, catalog, params.eager_safety);

      Candidate cand;
      cand.init(graphs.size());
      Length total = 0;
      for (const std::vector<int>& comp : comps) {
        auto it = cache.find(comp);
        if (it == cache.end()) {
          std::vector<TreeState*> comp_states;
          for (int t : comp) comp_states.push_back(&states[t]);
          Length greedy_value = 0;
          if (greedy) {
            for (int t : comp) greedy_value = sat_add(greedy_value, greedy->tree_total[t]);
          }
          ComponentSolver solver(comp_states, graphs, catalog, rows, params.eager_safety,
                                 inst.delta, clock, rep.nodes, memo,
                                 greedy ? &greedy->cand : nullptr, greedy_value);
          it = cache.emplace(comp, solver.run()).first;
        }
        const ComponentResult& res = it->second;
        if (res.infeasible) {
          rep.status = SolveStatus::infeasible;
          rep.certificate = "search exhausted: no conflict-free routing exists for trees in a "
                            "coupled component";
          rep.bound = kInfLength;
          return finish(std::nullopt);
        }
        for (int t : comp) {
          cand.placement[t] = res.best.placement[t];
          cand.paths[t] = res.best.paths[t];
          cand.path_len[t] = res.best.path_len[t];
        }
        total = sat_add(total, res.value);
      }
      cand.total = total;
      global_bound = std::max(global_bound, total);

      UsageMaps usage = usage_of(cand, graphs);
      std::vector<const Topo*> topos(states.size());
      for (std::size_t t = 0; t < states.size(); ++t) topos[t] = &states[t].topo;
      std::vector<ScanHit> hits = scan_candidate(cand, usage, topos, graphs, catalog, inst.delta);

      if (hits.empty()) {
        rep.status = SolveStatus::optimal;
        rep.objective = total;
        rep.bound = total;
        rep.gap = 0.0;
        return finish(build_layout(cand));
      }

      // Materialize all currently violated rows; each round adds at least one.
      std::set<int> touched;
      int added = 0;
      for (const ScanHit& h : hits) {
        if (h.kind == 0) {
          if (rows.pipe.insert(h.a).second) {
            ++added;
            for (std::size_t e = 0; e < states[h.a.tree].edges.size(); ++e) {
              apply_ban(states[h.a.tree], static_cast<int>(e), h.a.corridor, nullptr);
            }
            touched.insert(h.a.tree);
          }
        } else if (h.kind == 1) {
          for (const CorrRef& side : {h.a, h.b}) {
            if (rows.cross_set.insert(side).second) {
              rows.cross.push_back(side);
              ++added;
              touched.insert(side.tree);
              auto nb = catalog.cross_neighbors.find(side);
              if (nb != catalog.cross_neighbors.end()) {
                for (const CorrRef& ref : nb->second) touched.insert(ref.tree);
              }
            }
          }
        } else {
          FRow row{h.a.tree, static_cast<std::int32_t>(h.e1), h.a.corridor,
                   static_cast<std::int32_t>(h.e2), h.b.corridor};
          if (rows.frow_set.insert(row).second) {
            rows.frows.push_back(row);
            ++added;
            touched.insert(row.tree);
          }
        }
      }
      if (added == 0) {
        throw std::logic_error("separation loop made no progress");
      }
      rep.lazy_rows += added;
      for (auto it = cache.begin(); it != cache.end();) {
        bool stale = false;
        for (int t : it->first) {
          if (touched.count(t)) {
            stale = true;
            break;
          }
        }
        it = stale ? cache.erase(it) : std::next(it);
      }
    }
  } catch (const TimeUp&) {
    rep.bound = global_bound;
    if (greedy) {
      rep.status = SolveStatus::feasible;
      rep.objective = greedy->cand.total;
      Length obj = *rep.objective;
      rep.gap = static_cast<double>(obj - rep.bound) / static_cast<double>(std::max<Length>(1, obj));
      return finish(build_layout(greedy->cand));
    }
    rep.status = SolveStatus::time_limit;
    rep.gap = 1.0;
    return finish(std::nullopt);
  }
}

}  // namespace wirelayr::engine

namespace wirelayr {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::time_limit: return "time_limit";
  }
  return "unknown";
}

}  // namespace wirelayr
