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
// Sample-average approximation: M independent replications of N sampled
// scenarios each give a statistical lower bound; the replication candidates
// are then re-evaluated on one common N' sample for the upper bound.

#ifndef BQP_SAA_HPP
#define BQP_SAA_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "bqp/branch_bound.hpp"
#include "bqp/instance.hpp"
#include "bqp/model.hpp"
#include "bqp/pha.hpp"
#include "bqp/scenario_gen.hpp"
#include "bqp/sched.hpp"

namespace bqp {

enum class InnerSolver : std::uint8_t { Exact, Pha, PhaHr, PhaHrSb };
enum class ParallelScheme : std::uint8_t { None, Scheme1, Scheme2 };

struct SaaConfig {
  int n_replications = 10;  // M
  int n_scenarios = 20;     // N per replication
  int n_eval = 200;         // N' for the common evaluation sample
  std::uint64_t seed = 0;

  InnerSolver inner = InnerSolver::Exact;
  PhaConfig pha;  // settings for the hedging-based inner solvers

  ParallelScheme scheme = ParallelScheme::None;
  int workers = 1;

  BuildOptions build;
};

struct ReplicationResult {
  int index = 0;
  std::uint64_t seed = 0;
  FirstStageDecision y;
  double objective = 0.0;  // optimum of the replication's sampled program
  int iterations = 0;      // hedging iterations; 0 for the exact solver
  double wall_ms = 0.0;
};

struct SaaReport {
  std::vector<ReplicationResult> replications;  // sorted by index

  double lower_bound = 0.0;  // mean replication objective
  double lower_se = 0.0;     // sd / sqrt(M)

  std::vector<std::vector<std::uint8_t>> candidates;  // unique plans, first-seen order
  std::vector<double> candidate_values;               // cost on the common sample

  FirstStageDecision best_y;
  double upper_bound = 0.0;  // min candidate value
  double upper_se = 0.0;     // SE of the winning candidate's evaluation mean
  double gap = 0.0;          // upper_bound - lower_bound

  bool se_reliable = true;  // false when M == 1
  double wall_ms = 0.0;
  SchedulerTrace schedule;
};

inline std::uint64_t replication_seed(std::uint64_t master, int index) {
  return derive_key(master, static_cast<std::uint64_t>(index));
}

inline std::uint64_t evaluation_seed(std::uint64_t master) {
  return derive_key(master, "eval");
}

/// Execution priority of a replication: total supply mass of its sample.
/// Heavier samples tend to produce harder subproblems, so they go first.
inline double score_replication(const std::vector<Scenario>& scens) {
  double acc = 0.0;
  for (const auto& s : scens)
    for (double v : s.supply) acc += v;
  return acc;
}

inline ReplicationResult solve_replication(const Instance& in,
                                           const ScenarioModelSpec& spec,
                                           const SaaConfig& cfg, int index) {
  ReplicationResult rr;
  rr.index = index;
  rr.seed = replication_seed(cfg.seed, index);
  auto t0 = std::chrono::steady_clock::now();
  auto scens = sample_scenarios(in, spec, cfg.n_scenarios, rr.seed);
  if (cfg.inner == InnerSolver::Exact) {
    MilpProblem p = build_extensive_form(in, scens, cfg.build);
    MilpSolution sol = solve_milp(p);
    if (sol.status != MilpStatus::Optimal && sol.status != MilpStatus::Feasible)
      throw std::runtime_error("replication " + std::to_string(index) +
                               ": extensive form not solved");
    rr.objective = sol.objective;
    rr.y.y.resize(static_cast<std::size_t>(in.nc) * in.nj);
    for (std::size_t k = 0; k < rr.y.y.size(); ++k) rr.y.y[k] = sol.x[k] > 0.5 ? 1 : 0;
  } else {
    PhaConfig pc = cfg.pha;
    pc.build = cfg.build;
    pc.enable_hr = cfg.inner == InnerSolver::PhaHr || cfg.inner == InnerSolver::PhaHrSb;
    pc.enable_sb = cfg.inner == InnerSolver::PhaHrSb;
    PhaResult res = pha_solve(in, scens, pc);
    rr.objective = res.objective;
    rr.y = res.y;
    rr.iterations = res.iterations;
  }
  rr.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return rr;
}

/// Statistical bounds from finished replications plus one common evaluation
/// sample. Pure function of its inputs, so the parallel scheme used to
/// produce the replications cannot change the outcome.
inline SaaReport estimate_bounds(const Instance& in, const ScenarioModelSpec& spec,
                                 const SaaConfig& cfg,
                                 std::vector<ReplicationResult> reps) {
  if (reps.empty()) throw std::invalid_argument("estimate_bounds: no replications");
  std::sort(reps.begin(), reps.end(),
            [](const ReplicationResult& a, const ReplicationResult& b) {
              return a.index < b.index;
            });
  SaaReport rep;
  const int m = static_cast<int>(reps.size());
  double mean = 0.0;
  for (const auto& r : reps) mean += r.objective;
  mean /= m;
  double var = 0.0;
  for (const auto& r : reps) var += (r.objective - mean) * (r.objective - mean);
  rep.lower_bound = mean;
  rep.se_reliable = m > 1;
  rep.lower_se = m > 1 ? std::sqrt(var / (m - 1)) / std::sqrt(double(m)) : 0.0;

  auto eval_scens = sample_scenarios(in, spec, cfg.n_eval, evaluation_seed(cfg.seed));
  int best = -1;
  double best_se = 0.0;
  for (const auto& r : reps) {
    if (std::find(rep.candidates.begin(), rep.candidates.end(), r.y.y) !=
        rep.candidates.end())
      continue;
    rep.candidates.push_back(r.y.y);
    auto ev = evaluate_first_stage(in, eval_scens, r.y, cfg.build);
    rep.candidate_values.push_back(ev.expected_cost);
    if (best < 0 || ev.expected_cost < rep.candidate_values[best]) {
      best = static_cast<int>(rep.candidate_values.size()) - 1;
      double evar = 0.0;
      for (double v : ev.per_scenario)
        evar += (v - ev.expected_cost) * (v - ev.expected_cost);
      best_se = cfg.n_eval > 1
                    ? std::sqrt(evar / (cfg.n_eval - 1)) / std::sqrt(double(cfg.n_eval))
                    : 0.0;
    }
  }
  rep.best_y.y = rep.candidates[best];
  rep.upper_bound = rep.candidate_values[best];
  rep.upper_se = best_se;
  rep.gap = rep.upper_bound - rep.lower_bound;
  rep.replications = std::move(reps);
  return rep;
}

inline SaaReport run_saa(const Instance& in, const ScenarioModelSpec& spec,
                         const SaaConfig& cfg) {
  if (cfg.n_replications < 1) throw std::invalid_argument("run_saa: need M >= 1");
  if (cfg.workers < 1) throw std::invalid_argument("run_saa: need workers >= 1");
  auto t0 = std::chrono::steady_clock::now();

  std::vector<TaskDescriptor> tasks(cfg.n_replications);
  for (int i = 0; i < cfg.n_replications; ++i) {
    tasks[i].index = i;
    tasks[i].seed = replication_seed(cfg.seed, i);
    tasks[i].score =
        score_replication(sample_scenarios(in, spec, cfg.n_scenarios, tasks[i].seed));
  }

  std::vector<ReplicationResult> reps(cfg.n_replications);
  auto fn = [&](const TaskDescriptor& t) {
    reps[t.index] = solve_replication(in, spec, cfg, t.index);
  };
  SchedulerTrace trace;
  switch (cfg.scheme) {
    case ParallelScheme::None:
      trace = run_serial(tasks, fn);
      break;
    case ParallelScheme::Scheme1:
      trace = run_scheme1(tasks, cfg.workers, fn);
      break;
    case ParallelScheme::Scheme2:
      trace = run_scheme2(tasks, cfg.workers, fn);
      break;
  }

  SaaReport rep = estimate_bounds(in, spec, cfg, std::move(reps));
  rep.schedule = std::move(trace);
  rep.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace bqp

#endif  // BQP_SAA_HPP
