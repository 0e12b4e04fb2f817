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

#include "medsim/comms.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace medsim {

namespace {

constexpr double kNearRangeM = 130.0;
constexpr double kFarRangeM = 300.0;
constexpr double kNearSensitivity = -69.0;
constexpr double kFarSensitivity = -85.0;

struct DisjointSet {
  std::vector<std::uint32_t> parent;

  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

void RadioParams::validate() const {
  if (!(frequency_ghz > 0.0)) throw std::invalid_argument("radio frequency must be positive");
  if (sensitivity_dbm > tx_power_dbm) {
    throw std::invalid_argument("receiver sensitivity above transmit power");
  }
}

double transmission_range(const RadioParams& rp) {
  rp.validate();
  const double pth = rp.sensitivity_dbm;
  if (pth < kFarSensitivity || pth > kNearSensitivity) {
    throw std::invalid_argument(
        fmt::format("sensitivity {} dBm outside [{}, {}]", pth, kFarSensitivity, kNearSensitivity));
  }
  if (pth == kNearSensitivity) return kNearRangeM;
  if (pth == kFarSensitivity) return kFarRangeM;
  // Link budget relative to the reference radio (18 dBm at 5.9 GHz), spread
  // over the calibrated log-distance slope.
  const double budget = rp.tx_power_dbm - pth - 87.0 - 20.0 * std::log10(rp.frequency_ghz / 5.9);
  const double t = budget / (kNearSensitivity - kFarSensitivity);
  return std::pow(kNearRangeM, 1.0 - t) * std::pow(kFarRangeM, t);
}

bool reachable(Point ev_pos, Point target_pos, const RadioParams& rp, double blocked,
               std::mt19937_64& rng) {
  const double d = std::hypot(ev_pos.x_m - target_pos.x_m, ev_pos.y_m - target_pos.y_m);
  const bool dropped = std::bernoulli_distribution(std::clamp(blocked, 0.0, 1.0))(rng);
  return d <= transmission_range(rp) && !dropped;
}

void CommsParams::validate() const {
  radio.validate();
  if (block_prob < 0.0 || block_prob > 1.0) throw std::invalid_argument("block_prob outside [0, 1]");
  if (!(beacon_period_s > 0.0)) throw std::invalid_argument("beacon period must be positive");
  if (!(relay_spacing_m > 0.0)) throw std::invalid_argument("relay spacing must be positive");
}

double beacon_time(double t, double period_s) { return std::floor(t / period_s) * period_s; }

CommsModel::CommsModel(const RoadGraph& g, const CommsParams& params)
    : params_(params), range_m_(transmission_range(params.radio)) {
  params_.validate();
  const std::size_t n = g.node_count();
  DisjointSet ds(n);
  const bool relays_fit = params_.relay_spacing_m <= range_m_;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& arc : g.out_arcs(NodeId(i))) {
      if (relays_fit || arc.attr.length_m <= range_m_) ds.unite(i, arc.to.value);
    }
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const Point a = g.position(NodeId(i));
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const Point b = g.position(NodeId(j));
      if (std::hypot(a.x_m - b.x_m, a.y_m - b.y_m) <= range_m_) ds.unite(i, j);
    }
  }
  component_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    component_[i] = ds.find(i);
    if (component_[i] == i) ++components_;
  }
}

bool CommsModel::connected(NodeId a, NodeId b) const {
  return component_.at(a.value) == component_.at(b.value);
}

}  // namespace medsim
