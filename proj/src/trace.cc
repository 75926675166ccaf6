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

#include <cstdio>
#include <fstream>

#include "sarplan/sim.hpp"

namespace sarplan {
namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void World::write_traces(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);

  std::string m = "step,avg_belief,avg_terrain_std";
  for (std::size_t i = 0; i < fleet_.bipeds.size(); ++i) {
    m += ",slope_biped" + std::to_string(i + 1);
  }
  m += "\n";
  for (const MetricsRow& r : metrics_) {
    m += std::to_string(r.step) + "," + fixed(r.avg_belief) + "," +
         fixed(r.avg_terrain_std);
    for (double s : r.biped_slopes) m += "," + fixed(s);
    m += "\n";
  }
  write_file(dir / "metrics.csv", m);

  std::string t = "step,robot,task,subject\n";
  for (const TaskRow& r : task_rows_) {
    t += std::to_string(r.step) + "," + r.robot + "," + task_label(r.gamma) +
         "," + std::to_string(r.subject) + "\n";
  }
  write_file(dir / "tasks.csv", t);

  std::string p = "step,robot,x,y,z,heading\n";
  for (const PathRow& r : path_rows_) {
    p += std::to_string(r.step) + "," + r.robot + "," + fixed(r.x) + "," +
         fixed(r.y) + "," + fixed(r.z) + "," + fixed(r.heading) + "\n";
  }
  write_file(dir / "paths.csv", p);

  std::string a = "step,robot,target_x,target_y,total,s_b,s_t,s_d\n";
  for (const AssignmentRow& r : assignment_rows_) {
    a += std::to_string(r.step) + "," + r.robot + "," + fixed(r.target.x()) +
         "," + fixed(r.target.y()) + "," + fixed(r.total) + "," +
         fixed(r.parts.belief) + "," + fixed(r.parts.traversability) + "," +
         fixed(r.parts.time) + "\n";
  }
  write_file(dir / "assignments.csv", a);

  std::string e = "step,subject,valuation,outcome\n";
  for (const LoggedEvent& ev : mission_.event_log()) {
    e += std::to_string(ev.step) + "," + std::to_string(ev.subject) + ",\"" +
         ev.atoms + "\"," + ev.outcome + "\n";
  }
  write_file(dir / "events.csv", e);

  std::string l;
  for (const std::string& line : log_) l += line + "\n";
  write_file(dir / "log.txt", l);

  if (!grid_snapshots_.empty()) {
    const auto grids = dir / "grids";
    std::filesystem::create_directories(grids);
    for (const GridSnapshot& g : grid_snapshots_) {
      char name[64];
      std::snprintf(name, sizeof(name), "terrain_%05d.csv", g.step);
      write_file(grids / name, g.terrain_csv);
      std::snprintf(name, sizeof(name), "belief_%05d.csv", g.step);
      write_file(grids / name, g.belief_csv);
    }
  }
}

}  // namespace sarplan
