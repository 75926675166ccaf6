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

#ifndef SARPLAN_CONFIG_HPP_
#define SARPLAN_CONFIG_HPP_

#include <filesystem>
#include <string>

#include "sarplan/sim.hpp"

namespace sarplan {

// INI text with one section per module; keys not present keep the values of
// default_sim_config(). List values separate items with ';' and item fields
// with ','. See configs/SCHEMA.md. Unknown sections or keys, malformed
// numbers and out-of-range values throw ConfigError naming "section.key".
SimConfig parse_config(const std::string& ini_text);
SimConfig load_config(const std::filesystem::path& path);

}  // namespace sarplan

#endif  // SARPLAN_CONFIG_HPP_
