#pragma once

#include <iosfwd>
#include <string>

#include "wirelayr/diagram.hpp"
#include "wirelayr/layout.hpp"

namespace wirelayr::scene {

using diagram::Instance;

enum class SceneFormat { obj_polylines, csv_segments };

/// Offline 3D scene dump: obstacles and admissible regions as box wireframes,
/// pipelines and routed branches as polylines, placements as points. The CSV
/// variant lists one segment per row; branch rows are the installed segments,
/// so their length column sums to the layout total. Ordering is deterministic.
void export_scene(const Instance& inst, const Layout* layout, SceneFormat format,
                  std::ostream& out);

void export_scene_file(const Instance& inst, const Layout* layout, SceneFormat format,
                       const std::string& path);

}  // namespace wirelayr::scene
