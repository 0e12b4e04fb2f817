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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "generators.hpp"
#include "medsim/comms.hpp"
#include "medsim/energy_model.hpp"
#include "medsim/exact_oracle.hpp"
#include "medsim/router.hpp"
#include "medsim/simulation.hpp"
#include "medsim/sweep.hpp"

using namespace medsim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
  fmt::print("{} criterion {}: {}\n", ok ? "PASS" : "FAIL", id, detail);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Invariants of a completed route, checked from the raw assignment fields.
std::string route_problem(const RoadGraph& g, const RouteAssignment& a) {
  constexpr double tol = 1e-6;
  const double q = a.capacity_kwh;
  for (double e : a.energy_trace) {
    if (e < -tol || e > q + tol) return fmt::format("energy {} outside [0, {}]", e, q);
  }
  for (const ChargeStop& s : a.stops) {
    if (s.energy_out_kwh < -tol || s.energy_out_kwh > q + tol) return "charger output out of range";
  }
  const std::multiset<ArcRef> x(a.x_arcs.begin(), a.x_arcs.end());
  std::multiset<ArcRef> y(a.y_arcs.begin(), a.y_arcs.end());
  for (const ArcRef& arc : y) {
    if (x.count(arc) < y.count(arc)) return "attached arc not traversed";
  }
  for (const ChargeStop& s : a.stops) {
    if (s.kind != ChargerKind::Scs) continue;
    if (std::abs(s.energy_out_kwh - q) > tol) return "left a station below full charge";
    if (!g.is_scs(a.walk.at(s.walk_index))) return "station stop off a station node";
  }
  if (a.walk.empty() || a.walk.front() != a.source || a.walk.back() != a.dest) {
    return "walk does not join source and destination";
  }
  if (a.x_arcs.size() + 1 != a.walk.size()) return "walk and arcs disagree";
  std::map<NodeId, int> balance;
  for (std::size_t k = 0; k < a.x_arcs.size(); ++k) {
    const ArcRef& arc = a.x_arcs[k];
    if (arc.from != a.walk[k] || arc.to != a.walk[k + 1]) return "arcs do not follow the walk";
    if (!g.arc(arc.from, arc.to)) return "arc missing from the road network";
    ++balance[arc.from];
    --balance[arc.to];
  }
  for (const auto& [node, b] : balance) {
    const int expected = node == a.source ? 1 : node == a.dest ? -1 : 0;
    if (a.source != a.dest && b != expected) return fmt::format("flow not conserved at {}", node.value);
  }
  return {};
}

RoadGraph scenario_graph(const Scenario& s) {
  GraphSpec spec = s.graph;
  spec.scs.clear();
  for (const StationConfig& st : s.scs) spec.scs.push_back(st.node);
  spec.med_cycle = s.meds.empty() ? std::vector<NodeId>{} : s.meds.front().cycle;
  spec.visit_limit = s.visit_limit;
  resolve_arc_energy(spec, s.vehicle);
  return build_graph(std::move(spec));
}

void feasibility_suite() {
  constexpr int kTarget = 1000;
  const auto t0 = Clock::now();
  std::atomic<std::uint64_t> next_seed{1};
  std::atomic<int> done{0};
  std::atomic<int> skipped{0};
  std::atomic<long> routes{0};
  std::atomic<long> stranded{0};
  std::mutex mu;
  std::vector<std::string> problems;

  auto work = [&] {
    while (done.load() < kTarget) {
      const std::uint64_t seed = next_seed.fetch_add(1);
      const Scenario s = testing::random_scenario(seed);
      RunResult r;
      try {
        r = run(s, {true, true});
      } catch (const CalibrationError&) {
        ++skipped;
        continue;
      }
      if (done.fetch_add(1) >= kTarget) break;
      const RoadGraph g = scenario_graph(s);
      std::vector<std::string> local;
      if (r.route_violations > 0 || r.occupancy_violations > 0) {
        local.push_back(fmt::format("seed {}: {}", seed, r.first_violation));
      }
      for (std::size_t i = 0; i < r.evs.size(); ++i) {
        if (r.evs[i].stranded || r.evs[i].status != RouteStatus::Ok) {
          ++stranded;
          continue;
        }
        ++routes;
        const std::string p = route_problem(g, r.routes.at(i));
        if (!p.empty()) local.push_back(fmt::format("seed {} ev {}: {}", seed, i, p));
      }
      if (!local.empty()) {
        std::lock_guard lock(mu);
        problems.insert(problems.end(), local.begin(), local.end());
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers(); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  const double elapsed = seconds_since(t0);
  const bool ok = problems.empty() && elapsed < 120.0;
  report(1, ok,
         fmt::format("{} random scenarios ({} redrawn after calibration failure), {} routes checked, "
                     "{} stranded, {} violations, {:.1f} s{}",
                     kTarget, skipped.load(), routes.load(), stranded.load(), problems.size(),
                     elapsed, problems.empty() ? "" : "; first: " + problems.front()));
}

void oracle_equivalence() {
  constexpr std::uint64_t kInstances = 400;
  const auto t0 = Clock::now();
  std::atomic<std::uint64_t> next{1};
  std::atomic<int> routed{0}, direct{0}, charged{0}, router_stranded{0}, oracle_only{0};
  std::mutex mu;
  std::vector<std::string> problems;

  auto work = [&] {
    for (std::uint64_t seed = next.fetch_add(1); seed <= kInstances; seed = next.fetch_add(1)) {
      const OracleInstance inst = testing::random_instance(seed);
      const ShortestPaths paths(inst.graph);
      const Router router(paths);
      const RouteResult r = router.find_shortest_path(inst.request, frozen_view(inst));
      const OracleSolution exact = solve_exact(inst);
      std::vector<std::string> local;

      const auto& dpath = paths.path(inst.request.source, inst.request.dest);
      const bool direct_ok = !dpath.empty() && route_feasible(inst.graph, dpath, inst.request.energy_kwh);
      if (!r.ok()) {
        ++router_stranded;
        if (exact.feasible()) ++oracle_only;
        if (direct_ok) local.push_back(fmt::format("seed {}: router failed on a feasible direct route", seed));
      } else {
        ++routed;
        const Verdict v = verify(inst, r.route);
        if (!v) local.push_back(fmt::format("seed {}: verify ({}) {}", seed, v.constraint, v.detail));
        const double obj = evaluate_objective(inst, r.route);
        if (!exact.feasible()) {
          local.push_back(fmt::format("seed {}: router found a route the oracle missed", seed));
        } else if (obj < exact.objective - 1e-6) {
          local.push_back(fmt::format("seed {}: router {} below oracle {}", seed, obj, exact.objective));
        }
        if (direct_ok) {
          ++direct;
          if (exact.feasible() && std::abs(obj - exact.objective) > 1e-6) {
            local.push_back(fmt::format("seed {}: direct route {} differs from oracle {}", seed, obj,
                                        exact.objective));
          }
        } else {
          ++charged;
        }
      }
      if (!local.empty()) {
        std::lock_guard lock(mu);
        problems.insert(problems.end(), local.begin(), local.end());
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers(); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  const double elapsed = seconds_since(t0);
  report(2, problems.empty() && routed.load() >= 200 && elapsed < 600.0,
         fmt::format("{} instances: {} routed ({} direct, {} with charging), {} router failures "
                     "({} solvable by the oracle), {} violations, {:.1f} s{}",
                     kInstances, routed.load(), direct.load(), charged.load(),
                     router_stranded.load(), oracle_only.load(), problems.size(), elapsed,
                     problems.empty() ? "" : "; first: " + problems.front()));
}

void trend_sweep() {
  const auto t0 = Clock::now();
  SweepSpec spec;
  spec.ev_counts = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  spec.seeds = {1, 2, 3, 4, 5};
  const auto rows = run_sweep(default_scenario(), spec, static_cast<int>(workers()));

  using Cell = std::tuple<Level, int, std::uint64_t>;
  std::map<Cell, std::array<const SweepRow*, 2>> paired;
  for (const SweepRow& r : rows) {
    paired[{r.level, r.ev_count, r.seed}][r.mode == Mode::Scs ? 0 : 1] = &r;
  }
  int bad_pairs = 0;
  std::string first_bad;
  std::map<Level, std::array<double, 2>> travel;
  std::map<Level, double> share;
  std::map<Level, int> cells;
  for (const auto& [cell, pair] : paired) {
    const double scs = pair[0]->metrics.mean_travel_time_s;
    const double med = pair[1]->metrics.mean_travel_time_s;
    if (med > scs) {
      if (first_bad.empty()) {
        first_bad = fmt::format("{} n={} seed={}: {:.1f} > {:.1f}", to_string(std::get<0>(cell)),
                                std::get<1>(cell), std::get<2>(cell), med, scs);
      }
      ++bad_pairs;
    }
    const Level level = std::get<0>(cell);
    travel[level][0] += scs;
    travel[level][1] += med;
    share[level] += pair[1]->metrics.med_share;
    ++cells[level];
  }
  auto ratio = [&](Level l) { return travel[l][0] / travel[l][1]; };
  const double r1 = ratio(Level::L1), r2 = ratio(Level::L2), r3 = ratio(Level::L3);
  report(3, bad_pairs == 0 && r3 > r1 && r1 > 1.0,
         fmt::format("{} paired cells, {} with SCS+MED slower{}; SCS/(SCS+MED) ratio L1 {:.3f}, "
                     "L2 {:.3f}, L3 {:.3f} ({:.1f} s)",
                     paired.size(), bad_pairs, first_bad.empty() ? "" : " (" + first_bad + ")", r1,
                     r2, r3, seconds_since(t0)));
  const double s1 = share[Level::L1] / cells[Level::L1];
  const double s2 = share[Level::L2] / cells[Level::L2];
  const double s3 = share[Level::L3] / cells[Level::L3];
  report(4, s3 > s1,
         fmt::format("MED selection share L1 {:.3f}, L2 {:.3f}, L3 {:.3f}", s1, s2, s3));
}

void energy_anchors() {
  const double e50 = induced_energy(600.0, {1.0, 50.0});
  const double miles = driving_range_miles(8.0);
  const double e20 = induced_energy(600.0, {1.0, 20.0});
  const bool ok = std::abs(e50 - 25.0 / 3.0) <= 1e-9 && std::abs(e50 - 8.333) < 5e-4 &&
                  std::abs(miles - 22.857) < 5e-4 && std::abs(miles - 22.85) <= 0.05 &&
                  std::abs(e20 - 3.333) < 5e-4 && e20 >= 3.0 && e20 <= 8.0;
  report(5, ok,
         fmt::format("10 min at 50 kW gives {:.9f} kWh, 8 kWh drives {:.3f} mi, 10 min at 20 kW "
                     "gives {:.3f} kWh",
                     e50, miles, e20));
}

void radio_calibration() {
  RadioParams rp;
  rp.sensitivity_dbm = -69.0;
  const double near = transmission_range(rp);
  rp.sensitivity_dbm = -85.0;
  const double far = transmission_range(rp);
  std::mt19937_64 rng(2026);
  std::vector<double> pth(100);
  for (double& p : pth) p = std::uniform_real_distribution<double>(-85.0, -69.0)(rng);
  std::sort(pth.begin(), pth.end(), std::greater<>());
  int breaks = 0;
  double previous = near;
  for (double p : pth) {
    rp.sensitivity_dbm = p;
    const double r = transmission_range(rp);
    if (r < previous || r < near || r > far) ++breaks;
    previous = r;
  }
  report(6, near == 130.0 && far == 300.0 && breaks == 0,
         fmt::format("range(-69 dBm) = {} m, range(-85 dBm) = {} m, {} of 100 samples out of order",
                     near, far, breaks));
}

void determinism() {
  std::vector<std::string> differing;
  std::vector<Scenario> cases = {default_scenario(), testing::random_scenario(77)};
  cases[0].ev_count = 100;
  cases[0].level = Level::L3;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    std::ostringstream a, b;
    write_ev_csv(a, run(cases[c]));
    write_ev_csv(b, run(cases[c]));
    if (a.str() != b.str()) differing.push_back(fmt::format("run {}", c));
  }
  SweepSpec spec;
  spec.ev_counts = {20, 50};
  spec.seeds = {3};
  std::ostringstream a, b;
  write_sweep_csv(a, run_sweep(default_scenario(), spec, 1));
  write_sweep_csv(b, run_sweep(default_scenario(), spec, static_cast<int>(workers())));
  if (a.str() != b.str()) differing.push_back("sweep");
  report(7, differing.empty(),
         differing.empty() ? "per-EV and sweep CSV byte-identical across repeated runs"
                           : fmt::format("{} outputs differ", differing.size()));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  try {
    feasibility_suite();
    oracle_equivalence();
    trend_sweep();
    energy_anchors();
    radio_calibration();
    determinism();
  } catch (const std::exception& e) {
    fmt::print("FAIL acceptance aborted: {}\n", e.what());
    return 1;
  }
  fmt::print("{} of 7 criteria failed ({:.1f} s)\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
