// Copyright 2026 The sarplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: scenario runs, formula translation, grid checks.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sarplan/config.hpp"
#include "sarplan/fsa.hpp"
#include "sarplan/scltl.hpp"
#include "sarplan/sim.hpp"

#ifndef SARPLAN_CONFIG_DIR
#define SARPLAN_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

// Accepts a path, or a bare name resolved as configs/<name>.ini.
fs::path resolve_config(const std::string& name) {
  if (fs::exists(name)) return name;
  for (const fs::path dir : {fs::path("configs"), fs::path(SARPLAN_CONFIG_DIR)}) {
    const fs::path p = dir / (name + ".ini");
    if (fs::exists(p)) return p;
  }
  throw sarplan::ConfigError("--config: no such file or preset: " + name);
}

fs::path output_dir(const std::string& requested, const std::string& fallback) {
  fs::path out = requested.empty() ? fs::path("runs") / fallback : fs::path(requested);
  if (const char* root = std::getenv("SARPLAN_OUTPUT_ROOT");
      root != nullptr && *root != '\0' && out.is_relative()) {
    out = fs::path(root) / out;
  }
  return out;
}

struct RunOptions {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<int> steps;
  std::string out;
  bool disable_conflict_resolution = false;
  bool disable_slope_cost = false;
  bool disable_traversability_score = false;
  bool no_stop = false;
};

sarplan::SimConfig build_config(const RunOptions& o) {
  sarplan::SimConfig c = sarplan::load_config(resolve_config(o.config));
  if (o.seed) c.seed = *o.seed;
  if (o.steps) c.steps = *o.steps;
  if (o.disable_conflict_resolution) c.conflict_resolution = false;
  if (o.disable_slope_cost) c.mpc.slope_weight = 0.0;
  if (o.disable_traversability_score) c.biped_weights.traversability = 0.0;
  if (o.no_stop) c.stop_when_finished = false;
  c.validate();
  return c;
}

int do_run(const RunOptions& o) {
  std::vector<std::uint64_t> seeds = o.seeds;
  const sarplan::SimConfig base = build_config(o);
  if (seeds.empty()) seeds.push_back(base.seed);
  const std::string stem = fs::path(o.config).stem().string();
  const fs::path root = output_dir(
      o.out, o.seeds.empty() ? stem + "_seed" + std::to_string(seeds[0]) : stem);
  for (std::uint64_t seed : seeds) {
    sarplan::SimConfig c = base;
    c.seed = seed;
    sarplan::World world(c);
    const sarplan::RunReport rep = world.run();
    const fs::path dir = o.seeds.empty() ? root : root / ("seed_" + std::to_string(seed));
    world.write_traces(dir);
    std::cout << "seed " << seed << ": " << (rep.success ? "success" : "incomplete")
              << " steps=" << rep.steps
              << " avg_belief=" << rep.final_metrics.avg_belief
              << " avg_terrain_std=" << rep.final_metrics.avg_terrain_std;
    for (int s : rep.failed_subjects) std::cout << " failed_subject=" << s;
    std::cout << " out=" << dir.string() << "\n";
  }
  return 0;
}

int do_ltl2fsa(const std::string& formula, bool json, std::size_t cap) {
  const sarplan::scltl::FormulaPtr f = sarplan::scltl::parse(formula);
  const sarplan::Fsa fsa = sarplan::Fsa::from_formula(*f, cap);
  if (json) {
    std::cout << fsa.to_json() << "\n";
  } else {
    std::cout << "formula " << sarplan::scltl::to_string(*f) << "\n"
              << fsa.describe();
  }
  return 0;
}

int do_gridcheck(const RunOptions& o) {
  const sarplan::SimConfig c = build_config(o);
  const sarplan::World world(c);
  const auto& grid = world.metric_grid();
  double max_slope = 0.0;
  for (const auto& p : grid) max_slope = std::max(max_slope, c.terrain.gradient(p).norm());
  std::cout << "grid " << c.metric_grid << "x" << c.metric_grid << " over "
            << c.bounds.width() << "x" << c.bounds.height() << " m\n"
            << "terrain samples " << world.terrain().size()
            << " avg_std " << world.terrain().average_stddev(grid) << "\n"
            << "ground-truth max slope on grid " << max_slope << "\n"
            << "belief prior samples " << world.belief().prior_samples().size()
            << " avg_belief " << world.belief().average_belief(grid) << "\n";
  for (std::size_t s = 0; s < world.subjects().size(); ++s) {
    const auto& p = world.subjects()[s].position;
    const bool wind = std::any_of(c.wind_zones.begin(), c.wind_zones.end(),
                                  [&](const auto& z) { return z.contains(p); });
    const double slope = sarplan::max_slope_within(c.terrain, p, c.untraversable_radius);
    std::cout << "subject " << s + 1 << " at (" << p.x() << ", " << p.y()
              << ") wind=" << wind << " max_slope=" << slope
              << " untraversable=" << (slope > c.untraversable_slope) << "\n";
  }
  if (!o.out.empty()) {
    world.write_traces(output_dir(o.out, ""));
    std::cout << "wrote " << output_dir(o.out, "").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous biped and quadrotor search-and-rescue planner"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto add_common = [](CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config, "Config file or preset name")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Override sim.seed");
    cmd->add_option("--steps", o.steps, "Override the step budget");
    cmd->add_option("--out", o.out, "Output directory");
  };
  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write traces");
  add_common(run, run_opts);
  run->add_option("--seeds", run_opts.seeds, "Batch over several seeds")
      ->delimiter(',');
  run->add_flag("--disable-conflict-resolution",
                run_opts.disable_conflict_resolution);
  run->add_flag("--disable-slope-cost", run_opts.disable_slope_cost);
  run->add_flag("--disable-traversability-score",
                run_opts.disable_traversability_score);
  run->add_flag("--no-stop", run_opts.no_stop,
                "Keep stepping after every subject is resolved");

  std::string formula;
  bool json = false;
  std::size_t cap = sarplan::Fsa::kDefaultStateCap;
  CLI::App* ltl = app.add_subcommand("ltl2fsa", "Translate a formula to an automaton");
  ltl->add_option("formula", formula, "Formula text")->required();
  ltl->add_flag("--json", json, "JSON output");
  ltl->add_option("--state-cap", cap, "Subset-construction state limit");

  RunOptions grid_opts;
  CLI::App* grid = app.add_subcommand("gridcheck", "Summarize a scenario's initial fields");
  add_common(grid, grid_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return do_run(run_opts);
    if (*ltl) return do_ltl2fsa(formula, json, cap);
    if (*grid) return do_gridcheck(grid_opts);
  } catch (const sarplan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sarplan::SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
