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

#include "medsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <ostream>
#include <thread>
#include <tuple>

#include <fmt/format.h>

namespace medsim {

void SweepSpec::validate() const {
  if (ev_counts.empty() || levels.empty() || modes.empty() || seeds.empty()) {
    throw ScenarioError("sweep lists must be non-empty");
  }
  for (int n : ev_counts) {
    if (n < 0) throw ScenarioError("sweep EV counts must be non-negative");
  }
}

std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec, int jobs) {
  spec.validate();
  std::vector<SweepRow> cells;
  for (Mode mode : spec.modes) {
    for (Level level : spec.levels) {
      for (int n : spec.ev_counts) {
        for (std::uint64_t seed : spec.seeds) cells.push_back({mode, level, n, seed, {}});
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.mode, a.level, a.ev_count, a.seed) <
           std::tie(b.mode, b.level, b.ev_count, b.seed);
  });

  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        Scenario s = base;
        s.mode = cells[i].mode;
        s.level = cells[i].level;
        s.ev_count = cells[i].ev_count;
        s.seed = cells[i].seed;
        cells[i].metrics = run(s).metrics;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp<int>(jobs, 1, 256));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, cells.size()); ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw Error(fmt::format("sweep cell mode={} level={} ev_count={} seed={}: {}",
                            to_string(cells[i].mode), to_string(cells[i].level),
                            cells[i].ev_count, cells[i].seed, what));
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{}\n", to_string(r.mode),
                       to_string(r.level), r.ev_count, r.seed, r.metrics.mean_travel_time_s,
                       r.metrics.mean_wait_s, r.metrics.med_share, r.metrics.stranded);
  }
}

}  // namespace medsim
