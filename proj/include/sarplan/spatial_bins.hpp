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

#ifndef SARPLAN_SPATIAL_BINS_HPP_
#define SARPLAN_SPATIAL_BINS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>

#include <Eigen/Core>

#include "sarplan/common.hpp"

namespace sarplan {

// Square-binned point store: at most one value per bin, newest value wins.
// A bin's input position is anchored at the first sample that landed in it,
// so the set of GP input locations only ever grows.
class SpatialBins {
 public:
  enum class Outcome { kAdded, kReplaced, kUnchanged, kRejectedCap };

  struct Entry {
    Vec2 position;
    double value = 0.0;
    std::uint64_t sequence = 0;  // insertion counter of the latest write
  };

  using Key = std::pair<std::int64_t, std::int64_t>;

  SpatialBins(Bounds bounds, double bin_size, std::size_t cap);

  Key key_of(const Vec2& p) const;
  Outcome insert(const Vec2& p, double value);
  bool contains(const Vec2& p) const { return bins_.count(key_of(p)) > 0; }

  std::size_t size() const { return bins_.size(); }
  std::size_t cap() const { return cap_; }
  double bin_size() const { return bin_size_; }
  const std::map<Key, Entry>& entries() const { return bins_; }

  // Appends rows to (inputs, values) in key order.
  void export_rows(Eigen::MatrixXd& inputs, Eigen::VectorXd& values,
                   Eigen::Index offset) const;

 private:
  Bounds bounds_;
  double bin_size_;
  std::size_t cap_;
  std::uint64_t counter_ = 0;
  std::map<Key, Entry> bins_;
};

}  // namespace sarplan

#endif  // SARPLAN_SPATIAL_BINS_HPP_
