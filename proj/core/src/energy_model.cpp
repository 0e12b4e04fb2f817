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

#include "medsim/energy_model.hpp"

#include <cmath>
#include <stdexcept>

namespace medsim {

void VehicleParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(mass_kg) || !positive(frontal_area_m2) || !positive(air_density) ||
      !positive(battery_capacity_kwh)) {
    throw std::invalid_argument("vehicle mass, area, air density and capacity must be positive");
  }
  // mu = 0 is accepted as the frictionless limit.
  if (!std::isfinite(rolling_coeff) || rolling_coeff < 0.0) {
    throw std::invalid_argument("rolling coefficient must be non-negative");
  }
  if (!(drag_coeff >= 0.2 && drag_coeff <= 1.0)) {
    throw std::invalid_argument("drag coefficient must lie in [0.2, 1.0]");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("efficiency must lie in (0, 1]");
  }
}

void InductionParams::validate() const {
  if (!(coeff >= 0.0 && coeff <= 1.0)) {
    throw std::invalid_argument("induction coefficient must lie in [0, 1]");
  }
  if (!std::isfinite(power_kw) || power_kw < 0.0) {
    throw std::invalid_argument("induction power must be non-negative");
  }
}

double rolling_force(const VehicleParams& vp) { return vp.rolling_coeff * vp.mass_kg * kGravity; }

double air_force(const VehicleParams& vp, double speed_mps) {
  if (speed_mps < 0.0) throw std::invalid_argument("speed must be non-negative");
  return 0.5 * vp.frontal_area_m2 * vp.drag_coeff * vp.air_density * speed_mps * speed_mps;
}

double drive_power(const VehicleParams& vp, double speed_mps) {
  return vp.efficiency * (rolling_force(vp) + air_force(vp, speed_mps)) * speed_mps;
}

double segment_energy(const VehicleParams& vp, double speed_mps, double dwell_s) {
  if (!(dwell_s > 0.0)) throw std::invalid_argument("segment dwell time must be positive");
  return drive_power(vp, speed_mps) * dwell_s / kJoulesPerKwh;
}

double induced_energy(double contact_s, const InductionParams& ip) {
  if (contact_s < 0.0) throw std::invalid_argument("contact time must be non-negative");
  return contact_s / 3600.0 * ip.coeff * ip.power_kw;
}

double driving_range_miles(double energy_kwh, double kwh_per_100mi) {
  if (!(kwh_per_100mi > 0.0)) throw std::invalid_argument("consumption rating must be positive");
  return energy_kwh * 100.0 / kwh_per_100mi;
}

double net_segment_energy(const VehicleParams& vp, double speed_mps, double dwell_s,
                          bool attached, const InductionParams& ip) {
  const double used = segment_energy(vp, speed_mps, dwell_s);
  return attached ? used - induced_energy(dwell_s, ip) : used;
}

void resolve_arc_energy(GraphSpec& spec, const VehicleParams& vp) {
  for (auto& arc : spec.arcs) {
    if (arc.has_energy) continue;
    arc.attr.energy_kwh = segment_energy(vp, arc.attr.speed_mps(), arc.attr.drive_time_s);
    arc.has_energy = true;
  }
}

}  // namespace medsim
