#include "wirelayr/scene.hpp"

#include <array>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace wirelayr::scene {

using diagram::Box3;
using diagram::NodeRole;
using diagram::Obstacle;
using diagram::Pipeline;
using diagram::Point3;
using diagram::TreeNode;
using diagram::WiringTree;
using geometry::Segment3;

namespace {

std::array<Segment3, 12> box_edges(const Box3& b) {
  const Point3& l = b.min;
  const Point3& h = b.max;
  auto p = [&](int cx, int cy, int cz) {
    return Point3{cx ? h.x : l.x, cy ? h.y : l.y, cz ? h.z : l.z};
  };
  return {{{p(0, 0, 0), p(1, 0, 0)}, {p(0, 1, 0), p(1, 1, 0)},
           {p(0, 0, 1), p(1, 0, 1)}, {p(0, 1, 1), p(1, 1, 1)},
           {p(0, 0, 0), p(0, 1, 0)}, {p(1, 0, 0), p(1, 1, 0)},
           {p(0, 0, 1), p(0, 1, 1)}, {p(1, 0, 1), p(1, 1, 1)},
           {p(0, 0, 0), p(0, 0, 1)}, {p(1, 0, 0), p(1, 0, 1)},
           {p(0, 1, 0), p(0, 1, 1)}, {p(1, 1, 0), p(1, 1, 1)}}};
}

class ObjWriter {
 public:
  explicit ObjWriter(std::ostream& out) : out_(out) {}

  int vertex(const Point3& p) {
    out_ << "v " << p.x << " " << p.y << " " << p.z << "\n";
    return ++count_;
  }

  void polyline(const std::vector<Point3>& pts) {
    if (pts.size() < 2) return;
    out_ << "l";
    for (const Point3& p : pts) out_ << " " << vertex_deferred(p);
    out_ << "\n";
  }

  void segment(const Segment3& s) { polyline({s.a, s.b}); }

  void point(const Point3& p) { out_ << "p " << vertex_deferred(p) << "\n"; }

  void object(const std::string& name) { out_ << "o " << name << "\n"; }

 private:
  int vertex_deferred(const Point3& p) { return vertex(p); }

  std::ostream& out_;
  int count_ = 0;
};

void write_obj(const Instance& inst, const Layout* layout, std::ostream& out) {
  ObjWriter w(out);
  w.object("region");
  for (const Segment3& s : box_edges(inst.region)) w.segment(s);
  for (std::size_t i = 0; i < inst.obstacles.size(); ++i) {
    const Obstacle& o = inst.obstacles[i];
    w.object("obstacle_" + std::to_string(i));
    if (o.kind == Obstacle::Kind::solid_box) {
      for (const Segment3& s : box_edges(o.box)) w.segment(s);
    } else {
      for (const Segment3& s : box_edges(o.slab)) w.segment(s);
      for (const Box3& op : o.openings) {
        for (const Segment3& s : box_edges(op)) w.segment(s);
      }
    }
  }
  for (const Pipeline& p : inst.pipelines) {
    w.object("pipeline_" + p.id);
    w.polyline(p.polyline);
  }
  for (const WiringTree& t : inst.forest) {
    w.object("regions_" + t.id);
    for (const TreeNode& n : t.nodes) {
      if (n.role == NodeRole::intermediate) {
        for (const Segment3& s : box_edges(n.region)) w.segment(s);
      }
      if (n.role == NodeRole::leaf) w.point(n.point);
    }
  }
  if (layout) {
    for (const EdgeRoute& r : layout->routes) {
      w.object("route_" + r.parent + "_" + r.child);
      w.polyline(r.path);
    }
    w.object("placements");
    for (const auto& [id, p] : layout->placements) w.point(p);
  }
}

void write_csv(const Instance& inst, const Layout* layout, std::ostream& out) {
  out << "kind,owner,ax,ay,az,bx,by,bz,length\n";
  auto row = [&](const std::string& kind, const std::string& owner, const Segment3& s) {
    out << kind << "," << owner << "," << s.a.x << "," << s.a.y << "," << s.a.z << "," << s.b.x
        << "," << s.b.y << "," << s.b.z << "," << s.length() << "\n";
  };
  for (const Pipeline& p : inst.pipelines) {
    for (std::size_t i = 0; i + 1 < p.polyline.size(); ++i) {
      row("pipeline", p.id, {p.polyline[i], p.polyline[i + 1]});
    }
  }
  if (layout) {
    for (const auto& [tree_id, segs] : layout->installed) {
      for (const Segment3& s : segs) row("branch", tree_id, s);
    }
  }
}

}  // namespace

void export_scene(const Instance& inst, const Layout* layout, SceneFormat format,
                  std::ostream& out) {
  if (format == SceneFormat::obj_polylines) {
    write_obj(inst, layout, out);
  } else {
    write_csv(inst, layout, out);
  }
}

void export_scene_file(const Instance& inst, const Layout* layout, SceneFormat format,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  export_scene(inst, layout, format, out);
}

}  // namespace wirelayr::scene
