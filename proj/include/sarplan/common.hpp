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

#ifndef SARPLAN_COMMON_HPP_
#define SARPLAN_COMMON_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sarplan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Caller supplied something outside an operation's domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factorization or solve could not be completed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A construction exceeded its configured size limit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed formula text; carries a 1-based source position.
class SyntaxError : public InputError {
 public:
  SyntaxError(const std::string& what, int line, int column)
      : InputError("line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Invalid configuration; the message names the offending field path.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// Axis-aligned rectangle in world coordinates (meters).
struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 20.0;
  double max_y = 20.0;

  bool contains(const Vec2& p) const {
    return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y &&
           p.y() <= max_y;
  }
  Vec2 clamp(const Vec2& p) const {
    return {std::clamp(p.x(), min_x, max_x), std::clamp(p.y(), min_y, max_y)};
  }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

}  // namespace sarplan

#endif  // SARPLAN_COMMON_HPP_
