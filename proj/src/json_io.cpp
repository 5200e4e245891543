#include "wirelayr/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace wirelayr::json_io {

using diagram::Box3;
using diagram::NodeRole;
using diagram::Obstacle;
using diagram::Pipeline;
using diagram::Point3;
using diagram::TreeNode;
using diagram::WiringTree;
using geometry::Segment3;

namespace {

json point_to_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

Point3 point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("point must be [x,y,z]");
  return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>()};
}

json box_to_json(const Box3& b) {
  return json{{"min", point_to_json(b.min)}, {"max", point_to_json(b.max)}};
}

Box3 box_from_json(const json& j) {
  return {point_from_json(j.at("min")), point_from_json(j.at("max"))};
}

json obstacle_to_json(const Obstacle& o) {
  json j;
  j["clearance"] = o.clearance;
  if (o.kind == Obstacle::Kind::solid_box) {
    j["kind"] = "solid_box";
    j["box"] = box_to_json(o.box);
  } else {
    j["kind"] = "wall_with_openings";
    j["slab"] = box_to_json(o.slab);
    json openings = json::array();
    for (const Box3& b : o.openings) openings.push_back(box_to_json(b));
    j["openings"] = openings;
  }
  return j;
}

Obstacle obstacle_from_json(const json& j) {
  Obstacle o;
  o.clearance = j.value("clearance", std::int64_t{0});
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "solid_box") {
    o.kind = Obstacle::Kind::solid_box;
    o.box = box_from_json(j.at("box"));
  } else if (kind == "wall_with_openings") {
    o.kind = Obstacle::Kind::wall_with_openings;
    o.slab = box_from_json(j.at("slab"));
    for (const json& b : j.at("openings")) o.openings.push_back(box_from_json(b));
  } else {
    throw std::runtime_error("unknown obstacle kind '" + kind + "'");
  }
  return o;
}

const char* role_name(NodeRole r) {
  switch (r) {
    case NodeRole::root: return "root";
    case NodeRole::intermediate: return "intermediate";
    case NodeRole::leaf: return "leaf";
  }
  return "?";
}

NodeRole role_from(const std::string& s) {
  if (s == "root") return NodeRole::root;
  if (s == "intermediate") return NodeRole::intermediate;
  if (s == "leaf") return NodeRole::leaf;
  throw std::runtime_error("unknown node role '" + s + "'");
}

}  // namespace

json instance_to_json(const Instance& inst) {
  json j;
  j["format"] = kFormatVersion;
  j["region"] = box_to_json(inst.region);
  j["delta"] = inst.delta;
  j["pipeline_clearance"] = inst.pipeline_clearance;

  json pipelines = json::array();
  for (const Pipeline& p : inst.pipelines) {
    json poly = json::array();
    for (const Point3& v : p.polyline) poly.push_back(point_to_json(v));
    pipelines.push_back(json{{"id", p.id}, {"polyline", poly}});
  }
  j["pipelines"] = pipelines;

  json trees = json::array();
  for (const WiringTree& t : inst.forest) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes) {
      json nj{{"id", n.id}, {"role", role_name(n.role)}};
      if (n.role == NodeRole::intermediate) nj["region"] = box_to_json(n.region);
      if (n.role == NodeRole::leaf) nj["point"] = point_to_json(n.point);
      nodes.push_back(nj);
    }
    json edges = json::array();
    for (const auto& [p, c] : t.tree_edges) edges.push_back(json::array({p, c}));
    trees.push_back(json{{"id", t.id},
                         {"pipeline", t.pipeline_id},
                         {"root", t.root_id},
                         {"nodes", nodes},
                         {"edges", edges}});
  }
  j["trees"] = trees;

  json obstacles = json::array();
  for (const Obstacle& o : inst.obstacles) obstacles.push_back(obstacle_to_json(o));
  j["obstacles"] = obstacles;

  json meta;
  meta["seed"] = inst.meta.seed;
  json params;
  for (const auto& [k, v] : inst.meta.generator_params) params[k] = v;
  meta["generator_params"] = params;
  j["meta"] = meta;
  return j;
}

Instance instance_from_json(const json& j) {
  int version = j.value("format", 0);
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported instance format " + std::to_string(version));
  }
  Instance inst;
  inst.region = box_from_json(j.at("region"));
  inst.delta = j.at("delta").get<std::int64_t>();
  inst.pipeline_clearance = j.value("pipeline_clearance", inst.delta);

  for (const json& pj : j.at("pipelines")) {
    Pipeline p;
    p.id = pj.at("id").get<std::string>();
    for (const json& v : pj.at("polyline")) p.polyline.push_back(point_from_json(v));
    inst.pipelines.push_back(std::move(p));
  }
  for (const json& tj : j.at("trees")) {
    WiringTree t;
    t.id = tj.at("id").get<std::string>();
    t.pipeline_id = tj.at("pipeline").get<std::string>();
    t.root_id = tj.at("root").get<std::string>();
    for (const json& nj : tj.at("nodes")) {
      TreeNode n;
      n.id = nj.at("id").get<std::string>();
      n.role = role_from(nj.at("role").get<std::string>());
      if (n.role == NodeRole::intermediate) n.region = box_from_json(nj.at("region"));
      if (n.role == NodeRole::leaf) n.point = point_from_json(nj.at("point"));
      t.nodes.push_back(std::move(n));
    }
    for (const json& ej : tj.at("edges")) {
      t.tree_edges.push_back({ej[0].get<std::string>(), ej[1].get<std::string>()});
    }
    diagram::rebuild_children(t);
    inst.forest.push_back(std::move(t));
  }
  if (j.contains("obstacles")) {
    for (const json& oj : j.at("obstacles")) inst.obstacles.push_back(obstacle_from_json(oj));
  }
  if (j.contains("meta")) {
    const json& meta = j.at("meta");
    inst.meta.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("generator_params")) {
      for (auto it = meta.at("generator_params").begin(); it != meta.at("generator_params").end();
           ++it) {
        inst.meta.generator_params[it.key()] = it.value().get<std::int64_t>();
      }
    }
  }
  return inst;
}

std::string dump_deterministic(const json& j) { return j.dump(2) + "\n"; }

namespace {

json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << dump_deterministic(j);
}

}  // namespace

void save_instance(const Instance& inst, const std::string& path) {
  write_file(instance_to_json(inst), path);
}

Instance load_instance(const std::string& path) { return instance_from_json(read_file(path)); }

json solution_to_json(const Layout& layout, const SolveReport& report) {
  json j;
  j["format"] = kFormatVersion;

  json placements;
  for (const auto& [id, p] : layout.placements) placements[id] = point_to_json(p);
  j["placements"] = placements;

  json routes = json::array();
  for (const EdgeRoute& r : layout.routes) {
    json path = json::array();
    for (const Point3& p : r.path) path.push_back(point_to_json(p));
    routes.push_back(json{{"tree", r.tree_id},
                          {"parent", r.parent},
                          {"child", r.child},
                          {"path", path},
                          {"length", r.length}});
  }
  j["routes"] = routes;

  json installed;
  for (const auto& [tree_id, segs] : layout.installed) {
    json arr = json::array();
    for (const Segment3& s : segs) {
      arr.push_back(json::array({point_to_json(s.a), point_to_json(s.b)}));
    }
    installed[tree_id] = arr;
  }
  j["installed"] = installed;
  j["total_length"] = layout.total_length;

  json rep;
  rep["status"] = to_string(report.status);
  if (report.objective) rep["objective"] = *report.objective;
  rep["bound"] = report.bound;
  rep["gap"] = report.gap;
  rep["lazy_rows"] = report.lazy_rows;
  rep["nodes"] = report.nodes;
  rep["iterations"] = report.iterations;
  rep["threads"] = report.threads;
  rep["seed"] = report.seed;
  if (!report.certificate.empty()) rep["certificate"] = report.certificate;
  j["report"] = rep;
  return j;
}

void save_solution(const Layout& layout, const SolveReport& report, const std::string& path) {
  write_file(solution_to_json(layout, report), path);
}

std::pair<Layout, SolveReport> load_solution(const std::string& path) {
  json j = read_file(path);
  int version = j.value("format", 0);
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported solution format " + std::to_string(version));
  }
  Layout layout;
  for (auto it = j.at("placements").begin(); it != j.at("placements").end(); ++it) {
    layout.placements[it.key()] = point_from_json(it.value());
  }
  for (const json& rj : j.at("routes")) {
    EdgeRoute r;
    r.tree_id = rj.at("tree").get<std::string>();
    r.parent = rj.at("parent").get<std::string>();
    r.child = rj.at("child").get<std::string>();
    for (const json& p : rj.at("path")) r.path.push_back(point_from_json(p));
    r.length = rj.at("length").get<std::int64_t>();
    layout.routes.push_back(std::move(r));
  }
  for (auto it = j.at("installed").begin(); it != j.at("installed").end(); ++it) {
    std::vector<Segment3>& segs = layout.installed[it.key()];
    for (const json& sj : it.value()) {
      segs.push_back({point_from_json(sj[0]), point_from_json(sj[1])});
    }
  }
  layout.total_length = j.at("total_length").get<std::int64_t>();

  SolveReport rep;
  const json& rj = j.at("report");
  std::string status = rj.at("status").get<std::string>();
  if (status == "optimal") rep.status = SolveStatus::optimal;
  else if (status == "feasible") rep.status = SolveStatus::feasible;
  else if (status == "infeasible") rep.status = SolveStatus::infeasible;
  else rep.status = SolveStatus::time_limit;
  if (rj.contains("objective")) rep.objective = rj.at("objective").get<std::int64_t>();
  rep.bound = rj.value("bound", std::int64_t{0});
  rep.gap = rj.value("gap", 0.0);
  rep.lazy_rows = rj.value("lazy_rows", std::int64_t{0});
  rep.nodes = rj.value("nodes", std::int64_t{0});
  rep.iterations = rj.value("iterations", 0);
  rep.threads = rj.value("threads", 1);
  rep.seed = rj.value("seed", std::uint64_t{0});
  return {std::move(layout), rep};
}

json graph_to_json(const gridgen::GridGraph& g) {
  json j;
  j["tree"] = g.tree_id;
  json verts = json::array();
  for (const Point3& v : g.vertices) verts.push_back(point_to_json(v));
  j["vertices"] = verts;
  json arcs = json::array();
  for (const gridgen::Arc& a : g.arcs) {
    arcs.push_back(json{{"from", a.from}, {"to", a.to}, {"length", a.len}});
  }
  j["arcs"] = arcs;
  json adm;
  for (const auto& [id, verts_of] : g.admissible) adm[id] = verts_of;
  j["admissible"] = adm;
  return j;
}

void save_graphs(const std::vector<gridgen::GridGraph>& graphs, const std::string& path) {
  json j;
  j["format"] = kFormatVersion;
  json arr = json::array();
  for (const gridgen::GridGraph& g : graphs) arr.push_back(graph_to_json(g));
  j["graphs"] = arr;
  write_file(j, path);
}

}  // namespace wirelayr::json_io
