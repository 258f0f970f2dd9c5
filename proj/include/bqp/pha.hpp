// Copyright 2026 The pelletflow Authors
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
//
// Progressive hedging on the depot-opening variables, with two optional
// accelerators: heuristic fixing of variables that stay in consensus for a
// number of consecutive iterations, and scenario bundling (one subproblem
// per bundle instead of per scenario).

#ifndef BQP_PHA_HPP
#define BQP_PHA_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "bqp/branch_bound.hpp"
#include "bqp/instance.hpp"
#include "bqp/model.hpp"
#include "bqp/scenario_gen.hpp"

namespace bqp {

struct PhaConfig {
  double rho_init = 0.0;  // 0 selects max(1, mean |investment cost|)
  double rho_growth = 1.25;
  double rho_cap_factor = 100.0;  // cap = factor * initial penalty

  double consensus_tol = 1e-9;
  double gap_tol = 0.01;  // relative incumbent-vs-dual-estimate gap
  int max_iterations = 50;
  double time_limit = 1800.0;  // seconds

  bool enable_hr = false;  // consensus-streak variable fixing
  int fix_after = 3;

  bool enable_sb = false;  // scenario bundling
  int n_bundles = 0;       // 0 selects ceil(|Omega|/2)
  BundleMethod bundle_method = BundleMethod::SupplyKmeans;
  std::uint64_t bundle_seed = 0;

  BuildOptions build;
};

enum class PhaStop : std::uint8_t { Continue, ConsensusMet, GapMet, IterLimit, TimeLimit };

struct PhaIterRecord {
  int iter = 0;
  double consensus_residual = 0.0;
  double bound = 0.0;       // best dual estimate so far
  double incumbent = 0.0;   // best evaluated first-stage cost so far
  int fixed_count = 0;
  double rho_pen = 0.0;
  double multiplier_residual = 0.0;  // max_j |sum_k mass_k w_kj|
  double wall_ms = 0.0;
};

struct PhaState {
  // One subproblem per group; member probabilities are renormalized so each
  // group objective is a conditional expectation, weighted by `mass`.
  std::vector<std::vector<Scenario>> groups;
  std::vector<double> mass;

  std::vector<std::vector<double>> w;   // multipliers, per group per Y column
  std::vector<std::vector<double>> ys;  // latest group solutions
  std::vector<double> ybar;

  double rho_pen = 0.0;
  double rho_cap = 0.0;

  std::vector<int> streak;       // consecutive iterations of cross-group agreement
  std::vector<double> agreed;    // value behind each streak
  std::vector<int> fixed;        // -1 unfixed, else 0/1
  bool fixing_rolled_back = false;

  int iter = 0;
  double last_residual = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();

  std::vector<std::uint8_t> best_y;
  double best_value = std::numeric_limits<double>::infinity();
  std::set<std::vector<std::uint8_t>> evaluated;

  std::chrono::steady_clock::time_point t0;
  std::vector<PhaIterRecord> trace;
};

struct PhaResult {
  FirstStageDecision y;
  double objective = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  PhaStop stop = PhaStop::Continue;
  std::vector<PhaIterRecord> trace;
};

namespace detail {

inline double pha_elapsed(const PhaState& st) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - st.t0).count();
}

inline std::vector<double> extract_y(const MilpSolution& sol, int ny) {
  std::vector<double> y(ny);
  for (int k = 0; k < ny; ++k) y[k] = sol.x[k];
  return y;
}

// Rounds a fractional consensus point to a feasible opening plan: columns in
// descending ybar (ties by index) are opened while ybar >= 0.5 and the depot
// site is still free.
inline std::vector<std::uint8_t> round_consensus(const std::vector<double>& ybar, int nc,
                                                 int nj) {
  std::vector<int> order(ybar.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ybar[a] > ybar[b]; });
  std::vector<std::uint8_t> y(ybar.size(), 0);
  std::vector<char> used(nj, 0);
  for (int k : order) {
    if (ybar[k] < 0.5) break;
    int j = k % nj;
    if (!used[j]) {
      used[j] = 1;
      y[k] = 1;
    }
  }
  (void)nc;
  return y;
}

inline void pha_consider(PhaState& st, const Instance& in,
                         const std::vector<Scenario>& scenarios,
                         const std::vector<std::uint8_t>& cand, const BuildOptions& opts) {
  if (!st.evaluated.insert(cand).second) return;
  auto ev = evaluate_first_stage(in, scenarios, FirstStageDecision{cand}, opts);
  if (ev.expected_cost < st.best_value) {
    st.best_value = ev.expected_cost;
    st.best_y = cand;
  }
}

inline void pha_update_consensus(PhaState& st) {
  const std::size_t ny = st.ybar.size();
  for (std::size_t k = 0; k < ny; ++k) {
    double acc = 0.0;
    for (std::size_t g = 0; g < st.groups.size(); ++g) acc += st.mass[g] * st.ys[g][k];
    st.ybar[k] = acc;
  }
}

inline double pha_residual(const PhaState& st) {
  double acc = 0.0;
  for (std::size_t g = 0; g < st.groups.size(); ++g)
    for (std::size_t k = 0; k < st.ybar.size(); ++k) {
      double d = st.ys[g][k] - st.ybar[k];
      acc += st.mass[g] * d * d;
    }
  return std::sqrt(acc);
}

inline double pha_multiplier_residual(const PhaState& st) {
  double worst = 0.0;
  for (std::size_t k = 0; k < st.ybar.size(); ++k) {
    double acc = 0.0;
    for (std::size_t g = 0; g < st.groups.size(); ++g) acc += st.mass[g] * st.w[g][k];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

inline void pha_record(PhaState& st) {
  PhaIterRecord rec;
  rec.iter = st.iter;
  rec.consensus_residual = st.last_residual;
  rec.bound = st.bound;
  rec.incumbent = st.best_value;
  rec.fixed_count = static_cast<int>(
      std::count_if(st.fixed.begin(), st.fixed.end(), [](int f) { return f >= 0; }));
  rec.rho_pen = st.rho_pen;
  rec.multiplier_residual = pha_multiplier_residual(st);
  rec.wall_ms = pha_elapsed(st) * 1000.0;
  st.trace.push_back(rec);
}

}  // namespace detail

/// Iteration 0: groups are formed and solved independently (no penalty), the
/// consensus point and multipliers are initialized, and the group-wise optima
/// give a valid relaxation bound.
inline PhaState pha_init(const Instance& in, const std::vector<Scenario>& scenarios,
                         const PhaConfig& cfg) {
  if (scenarios.empty()) throw std::invalid_argument("pha_init: no scenarios");
  PhaState st;
  st.t0 = std::chrono::steady_clock::now();
  const int ny = in.nc * in.nj;

  if (cfg.enable_sb && scenarios.size() > 1) {
    int nb = cfg.n_bundles > 0 ? cfg.n_bundles
                               : static_cast<int>((scenarios.size() + 1) / 2);
    nb = std::min<int>(nb, static_cast<int>(scenarios.size()));
    auto bundles =
        bundle_scenarios(scenarios, nb, cfg.bundle_method, cfg.bundle_seed);
    for (const auto& b : bundles) {
      std::vector<Scenario> members;
      for (std::size_t i = 0; i < b.members.size(); ++i) {
        Scenario s = scenarios[b.members[i]];
        s.prob = b.cond_prob[i];
        members.push_back(std::move(s));
      }
      st.groups.push_back(std::move(members));
      st.mass.push_back(b.mass);
    }
  } else {
    double total = 0.0;
    for (const auto& s : scenarios) total += s.prob;
    for (const auto& s : scenarios) {
      Scenario m = s;
      m.prob = 1.0;
      st.groups.push_back({std::move(m)});
      st.mass.push_back(s.prob / total);
    }
  }

  if (cfg.rho_init > 0.0) {
    st.rho_pen = cfg.rho_init;
  } else {
    double acc = 0.0;
    for (int k = 0; k < ny; ++k) acc += std::abs(in.invest[k]);
    st.rho_pen = std::max(1.0, acc / ny);
  }
  st.rho_cap = cfg.rho_cap_factor * st.rho_pen;

  st.ybar.assign(ny, 0.0);
  st.streak.assign(ny, 0);
  st.agreed.assign(ny, -1.0);
  st.fixed.assign(ny, -1);

  double bound = 0.0;
  for (std::size_t g = 0; g < st.groups.size(); ++g) {
    MilpProblem p = build_extensive_form(in, st.groups[g], cfg.build);
    MilpSolution sol = solve_milp(p);
    if (sol.status != MilpStatus::Optimal)
      throw std::runtime_error("pha_init: group subproblem not solved to optimality");
    st.ys.push_back(detail::extract_y(sol, ny));
    bound += st.mass[g] * sol.objective;
    std::vector<std::uint8_t> cand(ny);
    for (int k = 0; k < ny; ++k) cand[k] = sol.x[k] > 0.5 ? 1 : 0;
    detail::pha_consider(st, in, scenarios, cand, cfg.build);
  }
  st.bound = bound;  // nonanticipativity relaxation: valid lower bound
  detail::pha_update_consensus(st);
  st.w.assign(st.groups.size(), std::vector<double>(ny, 0.0));
  for (std::size_t g = 0; g < st.groups.size(); ++g)
    for (int k = 0; k < ny; ++k)
      st.w[g][k] = st.rho_pen * (st.ys[g][k] - st.ybar[k]);
  st.last_residual = detail::pha_residual(st);
  detail::pha_consider(st, in, scenarios,
                       detail::round_consensus(st.ybar, in.nc, in.nj), cfg.build);
  detail::pha_record(st);
  return st;
}

/// One penalized pass over all groups, followed by the consensus, multiplier,
/// penalty, and fixing updates.
inline void pha_iterate(const Instance& in, const std::vector<Scenario>& scenarios,
                        const PhaConfig& cfg, PhaState& st) {
  const int ny = in.nc * in.nj;
  ++st.iter;

  double dual_estimate = 0.0;
  for (std::size_t g = 0; g < st.groups.size(); ++g) {
    MilpProblem p =
        build_pha_subproblem(in, st.groups[g], st.w[g], st.ybar, st.rho_pen, cfg.build);
    for (int k = 0; k < ny; ++k)
      if (st.fixed[k] >= 0) p.set_bounds(k, st.fixed[k], st.fixed[k]);
    MilpSolution sol = solve_milp(p);
    if (sol.status != MilpStatus::Optimal) {
      if (!st.fixing_rolled_back &&
          std::any_of(st.fixed.begin(), st.fixed.end(), [](int f) { return f >= 0; })) {
        // A fixing made a group infeasible: undo all fixings once and retry
        // the whole pass without the accelerator.
        std::fill(st.fixed.begin(), st.fixed.end(), -1);
        std::fill(st.streak.begin(), st.streak.end(), 0);
        st.fixing_rolled_back = true;
        --st.iter;
        return pha_iterate(in, scenarios, cfg, st);
      }
      throw std::runtime_error("pha_iterate: group subproblem not solved to optimality");
    }
    st.ys[g] = detail::extract_y(sol, ny);
    // Penalty contribution at a binary point equals (rho/2) * ||y - ybar||^2;
    // removing it leaves cost + w'y, the group's Lagrangian term.
    double prox = 0.0;
    for (int k = 0; k < ny; ++k) {
      double d = st.ys[g][k] - st.ybar[k];
      prox += 0.5 * st.rho_pen * d * d;
    }
    dual_estimate += st.mass[g] * (sol.objective - prox);
    std::vector<std::uint8_t> cand(ny);
    for (int k = 0; k < ny; ++k) cand[k] = sol.x[k] > 0.5 ? 1 : 0;
    detail::pha_consider(st, in, scenarios, cand, cfg.build);
  }
  st.bound = std::max(st.bound, dual_estimate);

  detail::pha_update_consensus(st);
  for (std::size_t g = 0; g < st.groups.size(); ++g)
    for (int k = 0; k < ny; ++k)
      st.w[g][k] += st.rho_pen * (st.ys[g][k] - st.ybar[k]);

  double residual = detail::pha_residual(st);
  if (residual >= st.last_residual - 1e-12)
    st.rho_pen = std::min(st.rho_pen * cfg.rho_growth, st.rho_cap);
  st.last_residual = residual;

  if (cfg.enable_hr && !st.fixing_rolled_back) {
    for (int k = 0; k < ny; ++k) {
      double v = st.ys[0][k];
      bool agree = true;
      for (std::size_t g = 1; g < st.groups.size(); ++g)
        if (std::abs(st.ys[g][k] - v) > 0.5) agree = false;
      if (agree) {
        int bit = v > 0.5 ? 1 : 0;
        if (st.agreed[k] == bit)
          ++st.streak[k];
        else {
          st.agreed[k] = bit;
          st.streak[k] = 1;
        }
        if (st.fixed[k] < 0 && st.streak[k] >= cfg.fix_after) st.fixed[k] = bit;
      } else {
        st.streak[k] = 0;
        st.agreed[k] = -1.0;
      }
    }
  }

  detail::pha_consider(st, in, scenarios,
                       detail::round_consensus(st.ybar, in.nc, in.nj), cfg.build);
  detail::pha_record(st);
}

inline PhaStop pha_check_termination(const PhaConfig& cfg, const PhaState& st) {
  if (st.last_residual <= cfg.consensus_tol) return PhaStop::ConsensusMet;
  if (std::isfinite(st.best_value)) {
    double gap = (st.best_value - st.bound) / std::max(1.0, std::abs(st.best_value));
    if (gap <= cfg.gap_tol) return PhaStop::GapMet;
  }
  if (st.iter >= cfg.max_iterations) return PhaStop::IterLimit;
  if (detail::pha_elapsed(st) >= cfg.time_limit) return PhaStop::TimeLimit;
  return PhaStop::Continue;
}

inline PhaResult pha_solve(const Instance& in, const std::vector<Scenario>& scenarios,
                           const PhaConfig& cfg = {}) {
  PhaState st = pha_init(in, scenarios, cfg);
  PhaStop stop = pha_check_termination(cfg, st);
  while (stop == PhaStop::Continue) {
    pha_iterate(in, scenarios, cfg, st);
    stop = pha_check_termination(cfg, st);
  }
  PhaResult res;
  res.y.y = st.best_y;
  res.objective = st.best_value;
  res.bound = st.bound;
  res.gap = (st.best_value - st.bound) / std::max(1.0, std::abs(st.best_value));
  if (res.gap < 0.0) res.gap = 0.0;
  res.iterations = st.iter;
  res.stop = stop;
  res.trace = std::move(st.trace);
  return res;
}

}  // namespace bqp

#endif  // BQP_PHA_HPP
