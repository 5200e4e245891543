#pragma once

#include <string>

#include "json.hpp"
#include "wirelayr/diagram.hpp"
#include "wirelayr/gridgen.hpp"
#include "wirelayr/layout.hpp"

namespace wirelayr::json_io {

using diagram::Instance;
using nlohmann::json;

// All on-disk formats carry a versioned "format" field (currently 1) and use
// alphabetically ordered keys, making serialization byte-deterministic.
inline constexpr int kFormatVersion = 1;

json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

/// Solution file: placements, per-edge paths, installed segments, objective,
/// and the solve report (wall time excluded to keep files run-deterministic).
json solution_to_json(const Layout& layout, const SolveReport& report);
void save_solution(const Layout& layout, const SolveReport& report, const std::string& path);
std::pair<Layout, SolveReport> load_solution(const std::string& path);

/// Discretization dump for inspection.
json graph_to_json(const gridgen::GridGraph& g);
void save_graphs(const std::vector<gridgen::GridGraph>& graphs, const std::string& path);

std::string dump_deterministic(const json& j);

}  // namespace wirelayr::json_io
