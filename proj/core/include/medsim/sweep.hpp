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

#ifndef MEDSIM_SWEEP_HPP
#define MEDSIM_SWEEP_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "medsim/simulation.hpp"

namespace medsim {

struct SweepSpec {
  std::vector<int> ev_counts = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<Level> levels = {Level::L1, Level::L2, Level::L3};
  std::vector<Mode> modes = {Mode::Scs, Mode::ScsMed};
  std::vector<std::uint64_t> seeds = {1};

  /// Throws ScenarioError on an empty list or a negative EV count.
  void validate() const;
};

struct SweepRow {
  Mode mode = Mode::ScsMed;
  Level level = Level::L1;
  int ev_count = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

/// Runs every (mode, level, ev_count, seed) cell of `spec` on top of `base`
/// with up to `jobs` worker threads. Rows come back sorted by mode, level,
/// EV count and seed whatever the thread count. The first failing cell, in
/// that order, is rethrown as Error with the cell in the message.
std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec, int jobs = 1);

inline constexpr const char* kSweepCsvHeader =
    "mode,level,ev_count,seed,mean_travel_time_s,mean_wait_s,med_share,stranded";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace medsim

#endif  // MEDSIM_SWEEP_HPP
