#include "wirelayr/synth.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "wirelayr/json_io.hpp"

namespace wirelayr::synth {

using diagram::Box3;
using diagram::NodeRole;
using diagram::Pipeline;
using diagram::Point3;
using diagram::TreeNode;
using diagram::WiringTree;

namespace {

// SplitMix64; self-contained so generated instances are identical across
// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

struct Cell {
  Length x, y, z;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

void check_params(const GeneratorParams& p) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (p.num_pipelines < 1 || p.branches_per_pipeline < 1) fail("counts must be >= 1");
  if (p.nodes_per_branch < 2) fail("a branch needs at least a root and a terminal");
  if (p.delta < 0) fail("delta must be >= 0");
  if (p.min_bend_gap < 2) fail("bend grid too fine");
  if (p.region_edge < 1 || p.region_edge > p.min_bend_gap) {
    fail("region edge must lie in [1, bend grid step]");
  }
  if (p.cube_edge < 6 * p.min_bend_gap) fail("cube too small for the layered layout");
  if (p.cube_edge % p.min_bend_gap != 0) fail("cube edge must be a multiple of the bend grid");
  const Length grid_positions = p.cube_edge / p.min_bend_gap;  // z values {0,G,...,E-G}
  if (p.num_pipelines > grid_positions) fail("more pipelines than grid planes");
  if (p.branches_per_pipeline + 2 > grid_positions) fail("terminal fan does not fit the cube");
}

}  // namespace

Instance generate(const GeneratorParams& p) {
  check_params(p);
  Rng rng(p.seed * 0x100000001b3ULL + 0xcbf29ce484222325ULL);

  const Length G = p.min_bend_gap;
  const Length E = p.cube_edge;
  const Length PX = E / 2;       // pipeline plane
  const Length TX = E - G;       // terminal plane
  const Length off = (G - p.region_edge) / 2;

  Instance inst;
  inst.region = {{0, 0, 0}, {E, E, E}};
  inst.delta = p.delta;
  inst.pipeline_clearance = p.delta;
  inst.meta.seed = p.seed;
  inst.meta.generator_params = {
      {"branches_per_pipeline", p.branches_per_pipeline},
      {"cube_edge", p.cube_edge},
      {"delta", p.delta},
      {"min_bend_gap", p.min_bend_gap},
      {"min_pipeline_separation", p.min_pipeline_separation},
      {"nodes_per_branch", p.nodes_per_branch},
      {"num_pipelines", p.num_pipelines},
      {"region_edge", p.region_edge},
  };

  // Pipeline planes: z drawn without replacement from the grid planes. The
  // minimum-length route between the fixed endpoints on the bend grid is the
  // straight run, and distinct grid planes keep pipelines at least one grid
  // step apart (>= min_pipeline_separation by parameter validation).
  std::vector<Length> zs;
  for (Length z = 0; z <= E - G; z += G) zs.push_back(z);
  rng.shuffle(zs);
  zs.resize(p.num_pipelines);

  std::set<Cell> occupied;
  std::set<std::pair<Length, Length>> taken_leaf_yz;

  const int m = p.nodes_per_branch - 2;  // intermediates per branch
  std::vector<Length> x_cells;
  for (Length x = PX + G; x + G <= TX; x += G) x_cells.push_back(x);
  const int nx = static_cast<int>(x_cells.size());

  auto cell_free = [&](const Cell& c) {
    return c.y >= 0 && c.y <= E - G && c.z >= 0 && c.z <= E - G && !occupied.count(c);
  };

  // Deterministic outward scan around a preferred (y, z); the scan order is
  // the retry budget.
  auto claim_cell = [&](Length x, Length y_pref, Length z_pref,
                        const std::string& who) -> Cell {
    for (Length rad = 0; rad <= E; rad += G) {
      for (Length dz = -rad; dz <= rad; dz += G) {
        Length dy_abs = rad - (dz < 0 ? -dz : dz);
        for (Length dy : (dy_abs == 0 ? std::vector<Length>{0}
                                      : std::vector<Length>{-dy_abs, dy_abs})) {
          Cell c{x, y_pref + dy, z_pref + dz};
          if (cell_free(c)) {
            occupied.insert(c);
            return c;
          }
        }
      }
    }
    throw PlacementOverflow("no free admissible-region cell for " + who);
  };

  for (int pi = 0; pi < p.num_pipelines; ++pi) {
    const Length zc = zs[pi];
    Pipeline pipe;
    pipe.id = "c" + std::to_string(pi);
    pipe.polyline = {{PX, 0, zc}, {PX, E - G, zc}};
    inst.pipelines.push_back(pipe);

    const int B = p.branches_per_pipeline;
    // Terminal fan: consecutive grid lanes in permuted order.
    const Length max_u0 = E / G - 1 - B;
    const Length y0 = G * rng.range(1, std::max<Length>(1, max_u0));
    std::vector<int> perm(B);
    for (int b = 0; b < B; ++b) perm[b] = b;
    rng.shuffle(perm);
    // Shared entry column: the first valve of every branch of this pipeline
    // sits in the same (x, y) cell, stacked across neighboring z planes. All
    // branches then compete for the same pipeline tap points.
    const Length ys = std::min<Length>(y0 + G, E - 2 * G);

    for (int b = 0; b < B; ++b) {
      WiringTree tree;
      tree.id = "p" + std::to_string(pi) + "b" + std::to_string(b);
      tree.pipeline_id = pipe.id;
      tree.root_id = tree.id + ".r";
      tree.nodes.push_back({tree.root_id, NodeRole::root, {}, {}, {}});

      Length leaf_y = y0 + G * perm[b];
      Length leaf_z = zc;
      int steps = 0;  // cross-pipeline collision: shift to a free plane
      while (taken_leaf_yz.count({leaf_y, leaf_z})) {
        leaf_z = leaf_z + G > E - G ? 0 : leaf_z + G;
        if (++steps > E / G) throw PlacementOverflow("no free terminal position for " + tree.id);
      }
      taken_leaf_yz.insert({leaf_y, leaf_z});
      Point3 leaf_pt{TX, leaf_y, leaf_z};

      std::string prev = tree.root_id;
      for (int k = 0; k < m; ++k) {
        Length x = x_cells[std::min(nx - 1, k * nx / std::max(1, m))];
        Cell cell;
        if (k == 0 && B >= 2) {
          static const Length stack[] = {0, -1, 1, -2, 2, -3, 3, -4, 4};
          Length dz = stack[b % 9] * G + G * (b / 9);
          cell = claim_cell(x, ys, zc + dz, tree.id + ".v0");
        } else {
          Length t_frac_y = ys + ((leaf_y - ys) * (k + 1)) / std::max(1, m);
          Length y_pref = (t_frac_y / G) * G + G * rng.range(-1, 1);
          Length z_pref = zc + G * rng.range(-1, 0);
          cell = claim_cell(x, y_pref, z_pref, tree.id + ".v" + std::to_string(k));
        }
        TreeNode node;
        node.id = tree.id + ".v" + std::to_string(k);
        node.role = NodeRole::intermediate;
        node.region = {{cell.x + off, cell.y + off, cell.z + off},
                       {cell.x + off + p.region_edge, cell.y + off + p.region_edge,
                        cell.z + off + p.region_edge}};
        tree.nodes.push_back(node);
        tree.tree_edges.push_back({prev, node.id});
        prev = node.id;
      }

      TreeNode leaf;
      leaf.id = tree.id + ".t";
      leaf.role = NodeRole::leaf;
      leaf.point = leaf_pt;
      tree.nodes.push_back(leaf);
      tree.tree_edges.push_back({prev, leaf.id});

      diagram::rebuild_children(tree);
      inst.forest.push_back(std::move(tree));
    }
  }
  return inst;
}

SuiteManifest generate_suite(const SuiteConfig& config, const std::string& out_dir) {
  SuiteManifest manifest;
  std::uint64_t counter = 0;
  for (int c : config.pipelines) {
    for (int b : config.branches) {
      for (int n : config.nodes) {
        for (Length d : config.deltas) {
          SuiteCell cell;
          cell.pipelines = c;
          cell.branches = b;
          cell.nodes = n;
          cell.delta = d;
          for (int i = 0; i < config.instances_per_cell; ++i) {
            GeneratorParams params = config.base;
            params.num_pipelines = c;
            params.branches_per_pipeline = b;
            params.nodes_per_branch = n;
            params.delta = d;
            params.seed = config.base_seed + counter++;
            Instance inst = generate(params);
            std::string file = "inst_c" + std::to_string(c) + "_b" + std::to_string(b) + "_n" +
                               std::to_string(n) + "_d" + std::to_string(d) + "_s" +
                               std::to_string(params.seed) + ".json";
            json_io::save_instance(inst, out_dir + "/" + file);
            cell.instances.push_back({params.seed, file});
          }
          manifest.cells.push_back(std::move(cell));
        }
      }
    }
  }
  save_manifest(manifest, out_dir + "/manifest.json");
  return manifest;
}

void save_manifest(const SuiteManifest& manifest, const std::string& path) {
  nlohmann::json j;
  j["format"] = json_io::kFormatVersion;
  nlohmann::json cells = nlohmann::json::array();
  for (const SuiteCell& c : manifest.cells) {
    nlohmann::json inst = nlohmann::json::array();
    for (const SuiteInstanceRef& r : c.instances) {
      inst.push_back(nlohmann::json{{"seed", r.seed}, {"file", r.file}});
    }
    cells.push_back(nlohmann::json{{"pipelines", c.pipelines},
                                   {"branches", c.branches},
                                   {"nodes", c.nodes},
                                   {"delta", c.delta},
                                   {"instances", inst}});
  }
  j["cells"] = cells;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << json_io::dump_deterministic(j);
}

SuiteManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  SuiteManifest manifest;
  for (const nlohmann::json& cj : j.at("cells")) {
    SuiteCell cell;
    cell.pipelines = cj.at("pipelines").get<int>();
    cell.branches = cj.at("branches").get<int>();
    cell.nodes = cj.at("nodes").get<int>();
    cell.delta = cj.at("delta").get<std::int64_t>();
    for (const nlohmann::json& ij : cj.at("instances")) {
      cell.instances.push_back(
          {ij.at("seed").get<std::uint64_t>(), ij.at("file").get<std::string>()});
    }
    manifest.cells.push_back(std::move(cell));
  }
  return manifest;
}

}  // namespace wirelayr::synth
