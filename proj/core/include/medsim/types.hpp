// Copyright 2026 The medsim Authors
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

#ifndef MEDSIM_TYPES_HPP
#define MEDSIM_TYPES_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace medsim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Node identifier. Base nodes occupy [0, n); charger dummies follow.
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  constexpr auto operator<=>(const NodeId&) const = default;
};

using EvId = std::uint32_t;

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

class NoMeetingPointError : public Error {
 public:
  using Error::Error;
};

class DeficitTooLargeError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class OracleBoundError : public Error {
 public:
  using Error::Error;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Relative tie tolerance used wherever two accumulated times are compared.
inline bool nearly_equal(double a, double b) {
  if (a == b) return true;
  if (a == kInfinity || b == kInfinity || a == -kInfinity || b == -kInfinity) return false;
  const double scale = std::max({1.0, a < 0 ? -a : a, b < 0 ? -b : b});
  const double diff = a - b;
  return (diff < 0 ? -diff : diff) <= 1e-9 * scale;
}

}  // namespace medsim

template <>
struct std::hash<medsim::NodeId> {
  std::size_t operator()(const medsim::NodeId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // MEDSIM_TYPES_HPP
