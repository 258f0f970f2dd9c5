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

#ifndef BQP_BRANCH_BOUND_HPP
#define BQP_BRANCH_BOUND_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "bqp/milp.hpp"
#include "bqp/simplex.hpp"

namespace bqp {

enum class MilpStatus : std::uint8_t { Optimal, Feasible, Infeasible, Limit };

struct MilpLimits {
  double gap_tol = 1e-6;
  long node_limit = 200000;
  double time_limit = 600.0;  // seconds
};

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  double best_bound = -kInf;
  double gap = kInf;
  long nodes = 0;
  double wall_seconds = 0.0;
};

/// Optional per-node record, used by tests to assert bound monotonicity.
struct BbNodeLog {
  std::vector<double> bounds;  // global best bound after each processed node
};

namespace detail {
template <typename Queue>
double current_bound(const Queue& open, double incumbent) {
  double b = incumbent < kInf ? incumbent : kInf;
  if (!open.empty()) b = std::min(b, open.top().bound);
  if (b == kInf) return -kInf;
  return b;
}
}  // namespace detail

/// Best-first branch and bound over the binary columns. Branching picks the
/// most fractional binary, ties broken by lowest column index; node order is
/// by parent bound, ties by insertion sequence. Deterministic by
/// construction: no randomness, no wall-clock-dependent decisions except the
/// time limit itself.
inline MilpSolution solve_milp(const MilpProblem& p, double gap_tol = 1e-6,
                               long node_limit = 200000, double time_limit = 600.0,
                               BbNodeLog* log = nullptr) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  constexpr double kIntTol = 1e-6;

  MilpSolution out;
  const std::vector<int>& bins = p.binary_cols();

  struct Node {
    double bound;
    long seq;
    std::vector<std::pair<int, std::uint8_t>> fixings;  // (col, value)
    bool operator>(const Node& o) const {
      return bound != o.bound ? bound > o.bound : seq > o.seq;
    }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  long seq = 0;
  open.push({-kInf, seq++, {}});

  double incumbent = kInf;
  std::vector<double> best_x;
  bool limit_hit = false;

  MilpProblem work = p;
  while (!open.empty()) {
    if (out.nodes >= node_limit || elapsed() > time_limit) {
      limit_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - 1e-9 && incumbent < kInf) continue;

    // Apply fixings on a scratch copy of the bounds.
    for (int j : bins) work.set_bounds(j, p.lb()[j], p.ub()[j]);
    for (auto [j, v] : node.fixings) work.set_bounds(j, v, v);

    LpSolution rel = solve_lp(work);
    ++out.nodes;
    if (rel.status == LpStatus::Infeasible) {
      if (log) log->bounds.push_back(detail::current_bound(open, incumbent));
      continue;
    }
    if (rel.status != LpStatus::Optimal) {
      // Unbounded relaxation or iteration trouble: treat as a limit event.
      limit_hit = true;
      if (log) log->bounds.push_back(detail::current_bound(open, incumbent));
      break;
    }
    if (rel.objective >= incumbent - 1e-9) {
      if (log) log->bounds.push_back(detail::current_bound(open, incumbent));
      continue;
    }

    // Most-fractional binary, tie by lowest column index.
    int branch_col = -1;
    double best_frac = kIntTol;
    for (int j : bins) {
      double f = rel.x[j] - std::floor(rel.x[j]);
      double dist = std::min(f, 1.0 - f);
      if (dist > best_frac) {
        best_frac = dist;
        branch_col = j;
      }
    }
    if (branch_col < 0) {
      // Integral: candidate incumbent.
      if (rel.objective < incumbent) {
        incumbent = rel.objective;
        best_x = rel.x;
        for (int j : bins) best_x[j] = std::round(best_x[j]);
      }
    } else {
      for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
        Node child{rel.objective, seq++, node.fixings};
        child.fixings.emplace_back(branch_col, v);
        open.push(std::move(child));
      }
    }
    if (log) log->bounds.push_back(detail::current_bound(open, incumbent));

    if (incumbent < kInf) {
      double bound = detail::current_bound(open, incumbent);
      double gap = (incumbent - bound) / std::max(1e-10, std::abs(incumbent));
      if (gap <= gap_tol) break;
    }
  }

  out.wall_seconds = elapsed();
  out.best_bound = detail::current_bound(open, incumbent);
  if (incumbent < kInf) {
    out.objective = incumbent;
    out.x = std::move(best_x);
    out.gap = (incumbent - out.best_bound) / std::max(1e-10, std::abs(incumbent));
    out.status = (limit_hit && out.gap > gap_tol) ? MilpStatus::Feasible : MilpStatus::Optimal;
  } else {
    out.status = limit_hit ? MilpStatus::Limit : MilpStatus::Infeasible;
  }
  return out;
}

}  // namespace bqp

#endif  // BQP_BRANCH_BOUND_HPP
