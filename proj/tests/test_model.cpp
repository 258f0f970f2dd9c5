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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "bqp/branch_bound.hpp"
#include "bqp/gen.hpp"
#include "bqp/model.hpp"

using namespace bqp;

namespace {

// Independent symbolic enumeration of the index tuples of every variable and
// constraint family, kept deliberately separate from the builder.
long expected_columns(const Instance& in, int n_scen) {
  long nb = in.nb, ni = in.ni, nj = in.nj, nc = in.nc, np = in.np, nr = in.nr, nt = in.nt;
  long layers = nt * (nt + 1) / 2;
  long per = 0;
  per += nb * ni * nt;               // S
  per += nb * ni * nj * layers;      // X
  per += nb * ni * layers;           // H1
  per += nb * nj * layers;           // H2
  per += nb * nj * layers;           // P
  per += nb * nj * nt;               // Z
  per += nb * nj * nr * nt;          // Q
  per += nb * nj * (nr * (nr + 1) / 2) * nt;  // R (downward pairs)
  long l_cols = 0;
  for (int p = 0; p < np; ++p) l_cols += static_cast<long>(in.pellet_biomass[p].size());
  per += l_cols * nr * nj * nt;      // L (per producible (b,p) pair, all source ranges)
  long d_cols = 0;
  for (int p = 0; p < np; ++p) d_cols += static_cast<long>(in.pellet_ash[p].size());
  per += d_cols * nj * nt;           // D (admissible ranges only)
  per += np * nt;                    // U
  return nc * nj + n_scen * per;
}

long expected_rows(const Instance& in, int n_scen) {
  long nb = in.nb, ni = in.ni, nj = in.nj, np = in.np, nr = in.nr, nt = in.nt;
  long layers = nt * (nt + 1) / 2;
  long per = 0;
  per += nb * ni * nt;            // (4)
  per += nb * ni * (layers - nt); // (5)
  per += nb * nj * nt;            // (6)
  per += nb * nj * (layers - nt); // (7)
  per += nb * ni * nt;            // (8)
  per += nb * nj * nt;            // (9)
  per += nb * nj * nt;            // (10)
  per += nb * nj * nr * nt;       // (11)+(12) joint
  per += nb * nj * nr * nt;       // (13)
  per += nb * nj * nr * nt;       // (14)
  long d_rows = 0;
  for (int p = 0; p < np; ++p) d_rows += static_cast<long>(in.pellet_ash[p].size());
  per += d_rows * nj * nt;        // (15)
  per += nj * nt;                 // (16)
  per += np * nt;                 // (17)
  return in.nj + n_scen * per;    // (2) once
}

FirstStageDecision decision(const Instance& in, std::initializer_list<int> bits) {
  FirstStageDecision y;
  y.y.assign(bits.begin(), bits.end());
  (void)in;
  return y;
}

}  // namespace

TEST_CASE("T1 extensive form has |C|*|J| binary columns") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  auto p = build_extensive_form(t1.instance, scens);
  REQUIRE(p.binary_cols().size() == static_cast<std::size_t>(t1.instance.nc * t1.instance.nj));
  REQUIRE(p.binary_cols().size() == 2);
}

TEST_CASE("T1 row and column counts match symbolic enumeration") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  auto p = build_extensive_form(t1.instance, scens);
  REQUIRE(p.num_cols() == expected_columns(t1.instance, 2));
  REQUIRE(p.num_rows() == expected_rows(t1.instance, 2));
}

TEST_CASE("column name map is a bijection") {
  auto t1 = make_t1();
  auto p = build_extensive_form(t1.instance, t1_scenarios(t1));
  for (int j = 0; j < p.num_cols(); ++j) REQUIRE(p.find_col(p.col_names()[j]) == j);
}

TEST_CASE("single-scenario extensive form equals the deterministic model") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1, 1);
  REQUIRE(scens[0].prob == 1.0);
  auto p = build_extensive_form(t1.instance, scens);
  auto sol = solve_milp(p);
  REQUIRE(sol.status == MilpStatus::Optimal);
  // Evaluating the optimal Y on the same single scenario reproduces the cost.
  FirstStageDecision y;
  for (int k : p.binary_cols()) y.y.push_back(sol.x[k] > 0.5 ? 1 : 0);
  auto ev = evaluate_first_stage(t1.instance, scens, y);
  REQUIRE(ev.expected_cost == Catch::Approx(sol.objective).epsilon(1e-7));
}

TEST_CASE("oversized instances are rejected with a structured error") {
  auto t1 = make_t1();
  BuildOptions opts;
  opts.max_columns = 10;
  REQUIRE_THROWS_AS(build_extensive_form(t1.instance, t1_scenarios(t1), opts),
                    ModelBuildError);
  REQUIRE_THROWS_WITH(build_extensive_form(t1.instance, t1_scenarios(t1), opts),
                      Catch::Matchers::ContainsSubstring("instance too large"));
}

TEST_CASE("all-closed decision costs exactly the shortage penalties") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  auto ev = evaluate_first_stage(t1.instance, scens, decision(t1.instance, {0, 0}));
  double expect = 0.0;
  for (const auto& s : scens)
    for (int p = 0; p < t1.instance.np; ++p)
      for (int t = 0; t < t1.instance.nt; ++t)
        expect += s.prob * t1.instance.pi(p, t) * t1.instance.d(p, t);
  REQUIRE(ev.expected_cost == Catch::Approx(expect).epsilon(1e-9));
}

TEST_CASE("zero demand and closed depots cost nothing") {
  auto t1 = make_t1();
  for (double& v : t1.instance.demand) v = 0.0;
  auto scens = t1_scenarios(t1);
  auto ev = evaluate_first_stage(t1.instance, scens, decision(t1.instance, {0, 0}));
  REQUIRE(ev.expected_cost == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("brute-force Y enumeration matches the MILP optimum on T1") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  auto p = build_extensive_form(t1.instance, scens);
  auto sol = solve_milp(p);
  REQUIRE(sol.status == MilpStatus::Optimal);

  double best = kInf;
  for (int mask = 0; mask < 4; ++mask) {
    FirstStageDecision y;
    y.y = {static_cast<std::uint8_t>(mask & 1), static_cast<std::uint8_t>((mask >> 1) & 1)};
    best = std::min(best, evaluate_first_stage(t1.instance, scens, y).expected_cost);
  }
  REQUIRE(std::abs(sol.objective - best) <= 1e-6 * (1.0 + std::abs(best)));

  // And the fixed-Y evaluation of one explicit decision matches the
  // extensive-form optimum restricted to that decision.
  FirstStageDecision open0 = decision(t1.instance, {1, 0});
  MilpProblem restricted = p;
  restricted.set_bounds(p.find_col("Y[0,0]"), 1.0, 1.0);
  restricted.set_bounds(p.find_col("Y[0,1]"), 0.0, 0.0);
  auto rsol = solve_milp(restricted);
  auto ev = evaluate_first_stage(t1.instance, scens, open0);
  REQUIRE(ev.expected_cost == Catch::Approx(rsol.objective).epsilon(1e-7));
}

TEST_CASE("pha subproblem objective terms follow the linearization") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1, 1);
  std::vector<double> w = {0.0, 0.0};
  std::vector<double> ybar = {1.0, 0.0};
  auto base = build_extensive_form(t1.instance, scens);
  auto sub = build_pha_subproblem(t1.instance, scens, w, ybar, /*rho_pen=*/1.0);
  // Added Y coefficient is w + rho*(1/2 - ybar); offset is rho/2*sum(ybar^2).
  for (int k = 0; k < 2; ++k) {
    int jb = base.find_col("Y[0," + std::to_string(k) + "]");
    int js = sub.find_col("Y[0," + std::to_string(k) + "]");
    REQUIRE(sub.obj()[js] == Catch::Approx(base.obj()[jb] + (0.5 - ybar[k])));
  }
  REQUIRE(sub.obj_offset() == Catch::Approx(0.5));
}

TEST_CASE("bundle subproblem is a small extensive form plus proximal terms") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1, 2);
  REQUIRE(scens[0].prob == 0.5);
  std::vector<double> w = {0.0, 0.0}, ybar = {0.0, 0.0};
  auto sub = build_pha_subproblem(t1.instance, scens, w, ybar, 1.0);
  auto ef = build_extensive_form(t1.instance, scens);
  REQUIRE(sub.num_rows() == ef.num_rows());
  REQUIRE(sub.num_cols() == ef.num_cols());
}

TEST_CASE("nonpositive penalty is rejected") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1, 1);
  std::vector<double> w = {0, 0}, ybar = {0, 0};
  REQUIRE_THROWS_AS(build_pha_subproblem(t1.instance, scens, w, ybar, 0.0),
                    std::invalid_argument);
}

TEST_CASE("optimal solutions pass the residual check at 1e-6") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  auto p = build_extensive_form(t1.instance, scens);
  auto sol = solve_milp(p);
  auto rep = check_solution_feasibility(p, sol.x);
  CAPTURE(rep.max_residual);
  REQUIRE(rep.pass(1e-6));
}

TEST_CASE("constructed violations are attributed to their families") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  auto p = build_extensive_form(t1.instance, scens);
  auto sol = solve_milp(p);

  SECTION("storage over capacity flags family 8") {
    auto x = sol.x;
    int col = -1;
    for (int j = 0; j < p.num_cols(); ++j)
      if (p.col_names()[j].rfind("H1[", 0) == 0) {
        col = j;
        break;
      }
    x[col] += t1.instance.cap1(0, 0) + 5.0;
    auto rep = check_solution_feasibility(p, x);
    REQUIRE(rep.family_residual.at("8") >= 5.0 - 1e-9);
  }
  SECTION("broken classification flags family 11") {
    auto x = sol.x;
    int col = -1;
    for (int j = 0; j < p.num_cols(); ++j)
      if (p.col_names()[j].rfind("Q[", 0) == 0) {
        col = j;
        break;
      }
    x[col] += 3.0;
    auto rep = check_solution_feasibility(p, x);
    REQUIRE(rep.family_residual.at("11") >= 3.0 - 1e-6);
  }
}

TEST_CASE("cost scaling preserves the optimal decision set") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  auto base = solve_milp(build_extensive_form(t1.instance, scens));

  const double lambda = 3.0;
  auto scaled_inst = t1.instance;
  for (auto arr : {&scaled_inst.invest, &scaled_inst.harvest, &scaled_inst.transport,
                   &scaled_inst.store_supply, &scaled_inst.store_depot,
                   &scaled_inst.inspect, &scaled_inst.production, &scaled_inst.ash_adjust,
                   &scaled_inst.moisture_cost, &scaled_inst.shortage})
    for (double& v : *arr) v *= lambda;
  auto scaled_p = build_extensive_form(scaled_inst, scens);
  auto scaled = solve_milp(scaled_p);
  REQUIRE(scaled.objective == Catch::Approx(lambda * base.objective).epsilon(1e-7));
  for (int k : scaled_p.binary_cols())
    REQUIRE(std::round(scaled.x[k]) == std::round(base.x[k]));
}

TEST_CASE("raising the shortage penalty weakly decreases shortage") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  double prev_short = kInf;
  for (double pi : {2.0, 50.0, 500.0}) {
    auto inst = t1.instance;
    for (double& v : inst.shortage) v = pi;
    auto p = build_extensive_form(inst, scens);
    auto sol = solve_milp(p);
    std::vector<double> probs;
    for (const auto& s : scens) probs.push_back(s.prob);
    auto sum = summarize_solution(p, sol.x, probs);
    REQUIRE(sum.shortage <= prev_short + 1e-6);
    prev_short = sum.shortage;
  }
}

TEST_CASE("flow conservation and demand accounting on the optimum") {
  auto t1 = make_t1();
  auto scens = t1_scenarios(t1);
  auto p = build_extensive_form(t1.instance, scens);
  auto sol = solve_milp(p);
  auto rep = check_solution_feasibility(p, sol.x);
  for (const char* fam : {"4", "5", "6", "7", "17"}) {
    auto it = rep.family_residual.find(fam);
    if (it != rep.family_residual.end()) REQUIRE(it->second <= 1e-6);
  }
}
