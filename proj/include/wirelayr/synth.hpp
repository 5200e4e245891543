#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wirelayr/diagram.hpp"

namespace wirelayr::synth {

using diagram::Instance;
using diagram::Length;

/// Synthetic benchmark generator. Pipelines run across one face of a cubic
/// region on a coarse grid whose resolution enforces the minimum bend-to-bend
/// spacing; branches are chains of intermediate valve boxes routed toward
/// terminals on the opposite face. Deterministic for a fixed seed.
struct GeneratorParams {
  std::uint64_t seed = 0;
  Length cube_edge = 100;          // region is [0,cube]^3; grid step is min_bend_gap
  int num_pipelines = 1;           // #c
  int branches_per_pipeline = 1;   // #b
  int nodes_per_branch = 3;        // #n, chain: root + (#n-2) valves + terminal
  Length region_edge = 6;          // admissible box edge, centered in one grid cell
  Length delta = 1;                // safety distance
  Length min_bend_gap = 10;
  Length min_pipeline_separation = 6;
};

class PlacementOverflow : public std::runtime_error {
 public:
  explicit PlacementOverflow(const std::string& what) : std::runtime_error(what) {}
};

/// Throws std::invalid_argument on bad parameters and PlacementOverflow when
/// the requested admissible boxes cannot be packed without overlap.
Instance generate(const GeneratorParams& params);

struct SuiteConfig {
  std::vector<int> pipelines{1, 2};
  std::vector<int> branches{1, 3, 5};
  std::vector<int> nodes{3, 5, 10, 15};
  std::vector<Length> deltas{1, 3, 5};
  int instances_per_cell = 10;
  std::uint64_t base_seed = 1000;
  GeneratorParams base;  // cube size, region edge, spacing defaults
};

struct SuiteInstanceRef {
  std::uint64_t seed = 0;
  std::string file;
};

struct SuiteCell {
  int pipelines = 0;
  int branches = 0;
  int nodes = 0;
  Length delta = 0;
  std::vector<SuiteInstanceRef> instances;
};

struct SuiteManifest {
  std::vector<SuiteCell> cells;

  std::size_t instance_count() const {
    std::size_t n = 0;
    for (const SuiteCell& c : cells) n += c.instances.size();
    return n;
  }
};

/// Writes one instance JSON per (cell, seed) into out_dir plus manifest.json;
/// all seeds are distinct.
SuiteManifest generate_suite(const SuiteConfig& config, const std::string& out_dir);

void save_manifest(const SuiteManifest& manifest, const std::string& path);
SuiteManifest load_manifest(const std::string& path);

}  // namespace wirelayr::synth
