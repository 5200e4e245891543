#include "wirelayr/geometry.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace wirelayr::geometry {

namespace {

struct AxisRange {
  Coord lo;
  Coord hi;
};

AxisRange segment_range(const Segment3& s, int axis) {
  return {std::min(s.a[axis], s.b[axis]), std::max(s.a[axis], s.b[axis])};
}

Length range_gap(AxisRange a, AxisRange b) {
  Coord g = std::max(a.lo, b.lo) - std::min(a.hi, b.hi);
  return g > 0 ? g : 0;
}

bool ranges_overlap(AxisRange a, AxisRange b) {
  return std::max(a.lo, b.lo) <= std::min(a.hi, b.hi);
}

void require_axis_aligned(const Segment3& s) {
  if (!s.axis_aligned()) {
    throw std::invalid_argument("segment is not axis-aligned: " + to_string(s.a) + " - " +
                                to_string(s.b));
  }
}

// Closed intersection of an axis-aligned segment (given as per-axis ranges)
// with an inflated box.
bool ranges_hit_box(const AxisRange r[3], const Box3& box) {
  for (int ax = 0; ax < 3; ++ax) {
    if (!ranges_overlap(r[ax], {box.min[ax], box.max[ax]})) return false;
  }
  return true;
}

bool hits_wall(const AxisRange r[3], const Obstacle& o) {
  Box3 slab = o.slab.inflated(o.clearance);
  AxisRange clipped[3];
  for (int ax = 0; ax < 3; ++ax) {
    clipped[ax] = {std::max(r[ax].lo, slab.min[ax]), std::min(r[ax].hi, slab.max[ax])};
    if (clipped[ax].lo > clipped[ax].hi) return false;  // no slab contact at all
  }
  // The slab is touched. Not a hit only if the whole contact region lies
  // strictly inside a single clearance-deflated opening. Openings are pairwise
  // disjoint, so one opening must cover the connected contact region alone.
  for (const Box3& op : o.openings) {
    bool covers = true;
    for (int ax = 0; ax < 3; ++ax) {
      // An opening axis that spans the full slab extent is a pass-through
      // direction (the wall material does not bound it); no shrink applies.
      if (op.min[ax] <= o.slab.min[ax] && op.max[ax] >= o.slab.max[ax]) continue;
      Coord lo = op.min[ax] + o.clearance;
      Coord hi = op.max[ax] - o.clearance;
      if (!(lo < clipped[ax].lo && clipped[ax].hi < hi)) {
        covers = false;
        break;
      }
    }
    if (covers) return false;
  }
  return true;
}

bool ranges_hit_obstacle(const AxisRange r[3], const Obstacle& o) {
  switch (o.kind) {
    case Obstacle::Kind::solid_box:
      return ranges_hit_box(r, o.box.inflated(o.clearance));
    case Obstacle::Kind::wall_with_openings:
      return hits_wall(r, o);
  }
  return false;
}

}  // namespace

bool Segment3::axis_aligned() const {
  int differing = (a.x != b.x) + (a.y != b.y) + (a.z != b.z);
  return differing <= 1;
}

int Segment3::axis() const {
  if (a.x != b.x) return 0;
  if (a.y != b.y) return 1;
  if (a.z != b.z) return 2;
  return -1;
}

Length Segment3::length() const { return l1_point_distance(a, b); }

bool Box3::valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }

bool Box3::contains(const Point3& p) const {
  return min.x <= p.x && p.x <= max.x && min.y <= p.y && p.y <= max.y && min.z <= p.z &&
         p.z <= max.z;
}

bool Box3::contains_box(const Box3& o) const { return contains(o.min) && contains(o.max); }

bool Box3::intersects(const Box3& o) const {
  for (int ax = 0; ax < 3; ++ax) {
    if (std::max(min[ax], o.min[ax]) > std::min(max[ax], o.max[ax])) return false;
  }
  return true;
}

Box3 Box3::inflated(Length c) const {
  return {{min.x - c, min.y - c, min.z - c}, {max.x + c, max.y + c, max.z + c}};
}

Length l1_point_distance(const Point3& p, const Point3& q) {
  return std::llabs(p.x - q.x) + std::llabs(p.y - q.y) + std::llabs(p.z - q.z);
}

Length l1_segment_distance(const Segment3& s, const Segment3& t) {
  require_axis_aligned(s);
  require_axis_aligned(t);
  Length d = 0;
  for (int ax = 0; ax < 3; ++ax) {
    d += range_gap(segment_range(s, ax), segment_range(t, ax));
  }
  return d;
}

Length l1_segment_polyline_distance(const Segment3& s, const std::vector<Point3>& polyline) {
  if (polyline.size() < 2) {
    throw std::invalid_argument("polyline needs at least 2 points");
  }
  Length best = 0;
  bool first = true;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    Length d = l1_segment_distance(s, Segment3{polyline[i], polyline[i + 1]});
    if (first || d < best) {
      best = d;
      first = false;
    }
  }
  return best;
}

bool segment_hits_obstacle(const Segment3& s, const Obstacle& o) {
  require_axis_aligned(s);
  AxisRange r[3];
  for (int ax = 0; ax < 3; ++ax) r[ax] = segment_range(s, ax);
  return ranges_hit_obstacle(r, o);
}

bool point_hits_obstacle(const Point3& p, const Obstacle& o) {
  AxisRange r[3] = {{p.x, p.x}, {p.y, p.y}, {p.z, p.z}};
  return ranges_hit_obstacle(r, o);
}

bool point_on_polyline(const Point3& p, const std::vector<Point3>& polyline) {
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Point3& a = polyline[i];
    const Point3& b = polyline[i + 1];
    bool on = true;
    for (int ax = 0; ax < 3; ++ax) {
      Coord lo = std::min(a[ax], b[ax]);
      Coord hi = std::max(a[ax], b[ax]);
      if (p[ax] < lo || p[ax] > hi) {
        on = false;
        break;
      }
    }
    if (on) return true;
  }
  return false;
}

Length l1_box_distance(const Box3& a, const Box3& b) {
  Length d = 0;
  for (int ax = 0; ax < 3; ++ax) {
    d += range_gap({a.min[ax], a.max[ax]}, {b.min[ax], b.max[ax]});
  }
  return d;
}

std::string to_string(const Point3& p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + "," + std::to_string(p.z) + ")";
}

}  // namespace wirelayr::geometry
