#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace wirelayr::geometry {

// All coordinates are exact integers in instance length units. Every
// predicate below is evaluated without tolerances.
using Coord = std::int64_t;
using Length = std::int64_t;

struct Point3 {
  Coord x = 0;
  Coord y = 0;
  Coord z = 0;

  friend auto operator<=>(const Point3&, const Point3&) = default;

  Coord operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  Coord& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
};

/// Axis-aligned segment: endpoints differ in at most one coordinate.
struct Segment3 {
  Point3 a;
  Point3 b;

  friend auto operator<=>(const Segment3&, const Segment3&) = default;

  bool axis_aligned() const;
  /// Varying axis index, or -1 for a degenerate (single point) segment.
  int axis() const;
  Length length() const;
};

struct Box3 {
  Point3 min;
  Point3 max;

  friend auto operator<=>(const Box3&, const Box3&) = default;

  bool valid() const;
  bool contains(const Point3& p) const;        // closed containment
  bool contains_box(const Box3& o) const;      // closed containment
  bool intersects(const Box3& o) const;        // closed intersection
  Box3 inflated(Length c) const;               // l_inf inflation
  bool degenerate() const { return min == max; }
};

/// Obstructing geometry. A wall_with_openings is a solid slab minus a set of
/// rectangular openings contained in the slab; routes may pass only through
/// the openings. `clearance` inflates the solid material (box inflation of the
/// obstacle, matching shrinkage of each opening in its constrained axes).
struct Obstacle {
  enum class Kind { solid_box, wall_with_openings };

  Kind kind = Kind::solid_box;
  Box3 box;                    // solid_box
  Box3 slab;                   // wall_with_openings
  std::vector<Box3> openings;  // wall_with_openings
  Length clearance = 0;
};

Length l1_point_distance(const Point3& p, const Point3& q);

/// Minimum l1 distance over all point pairs of two axis-aligned segments.
/// Equals the sum over axes of the interval gaps. Throws std::invalid_argument
/// if either segment is not axis-aligned.
Length l1_segment_distance(const Segment3& s, const Segment3& t);

/// Minimum l1 distance from a segment to any edge of an axis-aligned polyline.
/// Throws std::invalid_argument for polylines with fewer than 2 points.
Length l1_segment_polyline_distance(const Segment3& s, const std::vector<Point3>& polyline);

/// Closed-set intersection test of a segment against a clearance-inflated
/// obstacle. Touching counts as a hit. For walls, passing strictly inside a
/// clearance-deflated opening is not a hit.
bool segment_hits_obstacle(const Segment3& s, const Obstacle& o);

/// Same test for a single point (degenerate segment).
bool point_hits_obstacle(const Point3& p, const Obstacle& o);

/// Exact point-on-polyline test (polyline edges must be axis-aligned).
bool point_on_polyline(const Point3& p, const std::vector<Point3>& polyline);

/// Analytic minimum l1 distance between two boxes (sum of per-axis gaps).
Length l1_box_distance(const Box3& a, const Box3& b);

std::string to_string(const Point3& p);

}  // namespace wirelayr::geometry
