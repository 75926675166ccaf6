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

#include "sarplan/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sarplan {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

long long to_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

// Fixed-arity numeric tuples separated by ';'. An empty value is an empty list.
std::vector<std::vector<double>> tuples(const std::string& key,
                                        const std::string& text,
                                        std::size_t arity) {
  std::vector<std::vector<double>> out;
  if (trim(text).empty()) return out;
  const auto items = split(text, ';');
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].empty() && i + 1 == items.size()) break;  // trailing ';'
    const auto fields = split(items[i], ',');
    if (fields.size() != arity) {
      throw ConfigError(key + ": item " + std::to_string(i + 1) + " needs " +
                        std::to_string(arity) + " comma-separated numbers");
    }
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(to_double(key, f));
    out.push_back(std::move(row));
  }
  return out;
}

Vec2 to_vec2(const std::string& key, const std::string& text) {
  const auto t = tuples(key, text, 2);
  if (t.size() != 1) throw ConfigError(key + ": expected 'x,y'");
  return {t[0][0], t[0][1]};
}

class Binder {
 public:
  using Setter = std::function<void(const std::string& key, const std::string&)>;

  void add(const std::string& key, Setter s) { setters_[key] = std::move(s); }
  void number(const std::string& key, double& target) {
    add(key, [&target](const std::string& k, const std::string& v) {
      target = to_double(k, v);
    });
  }
  void integer(const std::string& key, int& target) {
    add(key, [&target](const std::string& k, const std::string& v) {
      const long long n = to_integer(k, v);
      if (n < -1000000000LL || n > 1000000000LL) {
        throw ConfigError(k + ": out of range");
      }
      target = static_cast<int>(n);
    });
  }
  void size(const std::string& key, std::size_t& target) {
    add(key, [&target](const std::string& k, const std::string& v) {
      const long long n = to_integer(k, v);
      if (n < 0) throw ConfigError(k + ": must be >= 0");
      target = static_cast<std::size_t>(n);
    });
  }
  void flag(const std::string& key, bool& target) {
    add(key, [&target](const std::string& k, const std::string& v) {
      target = to_bool(k, v);
    });
  }
  void point(const std::string& key, Vec2& target) {
    add(key, [&target](const std::string& k, const std::string& v) {
      target = to_vec2(k, v);
    });
  }

  void apply(const pt::ptree& tree) const {
    for (const auto& [section, body] : tree) {
      if (body.empty()) {
        throw ConfigError(section + ": keys must sit inside a [section]");
      }
      for (const auto& [name, value] : body) {
        const std::string key = section + "." + name;
        const auto it = setters_.find(key);
        if (it == setters_.end()) throw ConfigError(key + ": unknown key");
        it->second(key, trim(value.data()));
      }
    }
  }

 private:
  std::map<std::string, Setter> setters_;
};

void bind_kernel(Binder& b, const std::string& section, KernelParams& k) {
  b.number(section + ".signal_variance", k.signal_variance);
  b.number(section + ".lengthscale", k.lengthscale);
  b.number(section + ".noise_variance", k.noise_variance);
}

std::string spec_from(const std::string& value) {
  if (value == "quad_or_biped") return kQuadOrBipedSpec;
  if (value == "biped_only") return kBipedOnlySpec;
  return value;
}

}  // namespace

SimConfig parse_config(const std::string& ini_text) {
  pt::ptree tree;
  try {
    std::istringstream in(ini_text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("ini: line " + std::to_string(e.line()) + ": " + e.message());
  }

  SimConfig c = default_sim_config();
  double width = c.bounds.width();
  double height = c.bounds.height();
  double step_duration = c.mpc.lip.step_duration;
  double thrust_margin = c.mpc.quad.max_thrust - c.mpc.quad.gravity;
  int subject_count = static_cast<int>(c.subjects.size());
  std::map<int, std::string> subject_specs;
  std::map<int, Vec2> subject_positions;
  std::optional<std::pair<int, int>> initial_grid;
  std::optional<std::vector<Vec2>> initial_list;
  std::string orbit_mode = "fixed_rate";

  Binder b;
  b.number("world.width", width);
  b.number("world.height", height);
  b.point("world.rescue_point", c.rescue_point);

  b.add("sim.seed", [&](const std::string& k, const std::string& v) {
    const long long n = to_integer(k, v);
    if (n < 0) throw ConfigError(k + ": must be >= 0");
    c.seed = static_cast<std::uint64_t>(n);
  });
  b.integer("sim.steps", c.steps);
  b.flag("sim.stop_when_finished", c.stop_when_finished);
  b.integer("sim.metric_grid", c.metric_grid);
  b.integer("sim.grid_every", c.grid_every);

  b.point("terrain.plane", c.terrain.plane);
  b.add("terrain.hills", [&](const std::string& k, const std::string& v) {
    c.terrain.hills.clear();
    for (const auto& t : tuples(k, v, 4)) {
      if (!(t[3] > 0.0)) throw ConfigError(k + ": sigma must be > 0");
      c.terrain.hills.push_back({Vec2(t[0], t[1]), t[2], t[3]});
    }
  });
  b.add("terrain.ridges", [&](const std::string& k, const std::string& v) {
    c.terrain.ridges.clear();
    for (const auto& t : tuples(k, v, 5)) {
      if (!(t[4] > 0.0)) throw ConfigError(k + ": width must be > 0");
      c.terrain.ridges.push_back({Vec2(t[0], t[1]), t[2], t[3], t[4]});
    }
  });
  b.add("terrain.initial_grid", [&](const std::string& k, const std::string& v) {
    const auto t = tuples(k, v, 2);
    if (t.size() != 1 || t[0][0] < 1 || t[0][1] < 1 ||
        t[0][0] != std::floor(t[0][0]) || t[0][1] != std::floor(t[0][1])) {
      throw ConfigError(k + ": expected 'nx,ny' with positive integers");
    }
    initial_grid = {static_cast<int>(t[0][0]), static_cast<int>(t[0][1])};
  });
  b.add("terrain.initial_samples", [&](const std::string& k, const std::string& v) {
    std::vector<Vec2> pts;
    for (const auto& t : tuples(k, v, 2)) pts.emplace_back(t[0], t[1]);
    initial_list = std::move(pts);
  });
  bind_kernel(b, "terrain", c.terrain_field.kernel);
  b.number("terrain.bin_size", c.terrain_field.bin_size);
  b.size("terrain.cap", c.terrain_field.cap);
  b.number("terrain.min_admit_stddev", c.terrain_field.min_admit_stddev);

  b.add("belief.prior", [&](const std::string& k, const std::string& v) {
    c.prior.points.clear();
    for (const auto& t : tuples(k, v, 3)) {
      c.prior.points.push_back({Vec2(t[0], t[1]), t[2]});
    }
  });
  b.size("belief.samples_per_point", c.prior.samples_per_point);
  bind_kernel(b, "belief", c.belief_field.kernel);
  b.number("belief.bin_size", c.belief_field.bin_size);
  b.size("belief.cap", c.belief_field.cap);

  b.add("wind.zones", [&](const std::string& k, const std::string& v) {
    c.wind_zones.clear();
    for (const auto& t : tuples(k, v, 4)) {
      if (!(t[0] <= t[2] && t[1] <= t[3])) {
        throw ConfigError(k + ": zone needs min <= max");
      }
      c.wind_zones.push_back({t[0], t[1], t[2], t[3]});
    }
  });

  b.integer("subjects.count", subject_count);
  for (int i = 1; i <= 8; ++i) {
    const std::string base = "subjects.subject" + std::to_string(i);
    b.add(base + "_spec", [&, i](const std::string&, const std::string& v) {
      subject_specs[i] = spec_from(v);
    });
    b.add(base + "_position", [&, i](const std::string& k, const std::string& v) {
      subject_positions[i] = to_vec2(k, v);
    });
  }

  b.add("fleet.biped_starts", [&](const std::string& k, const std::string& v) {
    c.biped_starts.clear();
    for (const auto& t : tuples(k, v, 2)) c.biped_starts.emplace_back(t[0], t[1]);
  });
  b.add("fleet.biped_headings", [&](const std::string& k, const std::string& v) {
    c.biped_headings.clear();
    for (const auto& t : tuples(k, v, 1)) c.biped_headings.push_back(t[0]);
  });
  b.add("fleet.quad_starts", [&](const std::string& k, const std::string& v) {
    c.quad_starts.clear();
    for (const auto& t : tuples(k, v, 2)) c.quad_starts.emplace_back(t[0], t[1]);
  });
  b.number("fleet.quad_altitude", c.quad_altitude);

  b.number("sensing.biped_sensor_radius", c.biped_sensor_radius);
  b.number("sensing.quad_sensor_radius", c.quad_sensor_radius);
  b.number("sensing.biped_detection_radius", c.biped_detection_radius);
  b.number("sensing.quad_detection_radius", c.quad_detection_radius);

  b.number("rescue.pickup_radius", c.pickup_radius);
  b.number("rescue.delivery_tolerance", c.delivery_tolerance);
  b.number("rescue.pair_spacing", c.rescue.pair_spacing);

  b.number("allocation.untraversable_slope", c.untraversable_slope);
  b.number("allocation.untraversable_radius", c.untraversable_radius);

  b.integer("mpc.horizon", c.mpc.horizon);
  b.number("mpc.step_duration", step_duration);
  b.number("mpc.com_height", c.mpc.lip.com_height);
  b.number("mpc.max_foot_offset", c.mpc.lip.max_foot_offset);
  b.number("mpc.max_heading_change", c.mpc.lip.max_heading_change);
  b.number("mpc.distance_lower", c.mpc.distance_lower);
  b.number("mpc.distance_upper", c.mpc.distance_upper);
  b.number("mpc.distance_slack", c.mpc.distance_slack);
  b.number("mpc.slope_weight", c.mpc.slope_weight);
  b.number("mpc.input_weight", c.mpc.input_weight);
  b.number("mpc.state_penalty", c.mpc.state_penalty);
  b.integer("mpc.max_iters", c.mpc.max_iters);
  b.number("mpc.convergence_tol", c.mpc.convergence_tol);
  b.number("mpc.stall_tol", c.mpc.stall_tol);
  b.number("mpc.quad_attitude_time_constant", c.mpc.quad.attitude_time_constant);
  b.number("mpc.quad_max_attitude", c.mpc.quad.max_attitude);
  b.number("mpc.quad_thrust_margin", thrust_margin);

  b.integer("assignment.candidates", c.candidate_count);
  b.integer("assignment.ellipse_samples", c.biped_weights.ellipse_samples);
  b.number("assignment.alpha_b", c.biped_weights.alpha_b);
  b.number("assignment.alpha_t", c.biped_weights.alpha_t);
  b.number("assignment.biped_w_b", c.biped_weights.belief);
  b.number("assignment.biped_w_t", c.biped_weights.traversability);
  b.number("assignment.biped_w_d", c.biped_weights.time);
  b.number("assignment.biped_v_max", c.biped_weights.v_max);
  b.number("assignment.quad_w_b", c.quad_weights.belief);
  b.number("assignment.quad_w_t", c.quad_weights.traversability);
  b.number("assignment.quad_w_d", c.quad_weights.time);
  b.number("assignment.quad_v_max", c.quad_weights.v_max);
  b.number("assignment.orbit_radius", c.rescue.orbit_radius);
  b.add("assignment.orbit_mode", [&](const std::string& k, const std::string& v) {
    if (v != "fixed_rate" && v != "periodic") {
      throw ConfigError(k + ": expected fixed_rate or periodic");
    }
    orbit_mode = v;
  });
  b.integer("assignment.orbit_period", c.rescue.orbit_period);
  b.integer("assignment.epoch_steps", c.epoch_steps);
  b.number("assignment.target_reached", c.target_reached);
  b.flag("assignment.conflict_resolution", c.conflict_resolution);

  b.apply(tree);

  // Derived and shared values.
  if (!(width > 0.0)) throw ConfigError("world.width: must be > 0");
  if (!(height > 0.0)) throw ConfigError("world.height: must be > 0");
  if (!(step_duration > 0.0)) throw ConfigError("mpc.step_duration: must be > 0");
  if (thrust_margin < 0.0) throw ConfigError("mpc.quad_thrust_margin: must be >= 0");
  c.bounds = Bounds{0.0, 0.0, width, height};
  c.terrain.bounds = c.bounds;
  c.terrain_field.bounds = c.bounds;
  c.belief_field.bounds = c.bounds;
  c.mpc.bounds = c.bounds;
  c.rescue.bounds = c.bounds;
  c.rescue.rescue_point = c.rescue_point;
  c.rescue.orbit_mode =
      orbit_mode == "fixed_rate" ? OrbitMode::kFixedRate : OrbitMode::kPeriodic;
  c.mpc.lip.step_duration = step_duration;
  c.mpc.quad.step_duration = step_duration;
  c.mpc.quad.min_thrust = c.mpc.quad.gravity - thrust_margin;
  c.mpc.quad.max_thrust = c.mpc.quad.gravity + thrust_margin;
  c.mpc.biped_max_speed = c.biped_weights.v_max;
  c.mpc.quad_max_speed = c.quad_weights.v_max;
  c.quad_weights.alpha_b = c.biped_weights.alpha_b;
  c.quad_weights.alpha_t = c.biped_weights.alpha_t;
  c.quad_weights.ellipse_samples = c.biped_weights.ellipse_samples;

  if (initial_grid && initial_list) {
    throw ConfigError("terrain.initial_grid: conflicts with terrain.initial_samples");
  }
  if (initial_list) c.initial_samples = *initial_list;
  if (initial_grid) {
    c.initial_samples.clear();
    const auto [nx, ny] = *initial_grid;
    for (int ix = 0; ix < nx; ++ix) {
      for (int iy = 0; iy < ny; ++iy) {
        c.initial_samples.emplace_back(width * (ix + 0.5) / nx,
                                       height * (iy + 0.5) / ny);
      }
    }
  }

  if (subject_count < 0 || subject_count > 8) {
    throw ConfigError("subjects.count: must be in 0..8");
  }
  for (const auto& [i, _] : subject_specs) {
    if (i > subject_count) {
      throw ConfigError("subjects.subject" + std::to_string(i) +
                        "_spec: beyond subjects.count");
    }
  }
  for (const auto& [i, _] : subject_positions) {
    if (i > subject_count) {
      throw ConfigError("subjects.subject" + std::to_string(i) +
                        "_position: beyond subjects.count");
    }
  }
  c.subjects.resize(static_cast<std::size_t>(subject_count));
  for (const auto& [i, spec] : subject_specs) c.subjects[i - 1].spec = spec;
  for (const auto& [i, pos] : subject_positions) c.subjects[i - 1].position = pos;

  c.validate();
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sarplan
