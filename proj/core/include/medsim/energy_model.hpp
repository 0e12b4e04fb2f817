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

#ifndef MEDSIM_ENERGY_MODEL_HPP
#define MEDSIM_ENERGY_MODEL_HPP

#include "medsim/road_graph.hpp"

namespace medsim {

inline constexpr double kGravity = 9.8;          // m/s^2
inline constexpr double kJoulesPerKwh = 3.6e6;

/// Longitudinal vehicle constants for the steady-speed consumption model.
struct VehicleParams {
  double mass_kg = 1500.0;
  double rolling_coeff = 0.01;
  double drag_coeff = 0.35;
  double frontal_area_m2 = 2.0;
  double air_density = 1.2;
  double efficiency = 0.75;
  double battery_capacity_kwh = 24.0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Inductive transfer between a MED and an attached EV.
struct InductionParams {
  double coeff = 0.75;
  double power_kw = 40.0;

  void validate() const;
};

/// mu * m * g, in newtons.
double rolling_force(const VehicleParams& vp);

/// 0.5 * A * C * rho * u^2, in newtons. Throws on negative speed.
double air_force(const VehicleParams& vp, double speed_mps);

/// Steady-speed traction power n * (F_roll + F_air) * u, in watts.
///
/// The efficiency factor multiplies the road-load power; it is not a
/// drivetrain loss divisor.
double drive_power(const VehicleParams& vp, double speed_mps);

/// Energy in kWh to hold `speed_mps` for `dwell_s` seconds (dwell > 0).
double segment_energy(const VehicleParams& vp, double speed_mps, double dwell_s);

/// Energy in kWh induced during `contact_s` seconds of contact.
double induced_energy(double contact_s, const InductionParams& ip);

/// Miles an EV rated at `kwh_per_100mi` can drive on `energy_kwh`.
double driving_range_miles(double energy_kwh, double kwh_per_100mi = 35.0);

/// Consumption minus induction on a segment. Negative means a net gain.
double net_segment_energy(const VehicleParams& vp, double speed_mps, double dwell_s,
                          bool attached, const InductionParams& ip);

/// Fills energy_kwh on every arc whose energy was not given explicitly,
/// using the arc's mean speed (length / drive time).
void resolve_arc_energy(GraphSpec& spec, const VehicleParams& vp);

}  // namespace medsim

#endif  // MEDSIM_ENERGY_MODEL_HPP
