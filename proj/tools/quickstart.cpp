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
// Minimal library walkthrough: generate an instance, sample scenarios, solve
// the deterministic equivalent exactly, and cross-check with hedging.

#include <iostream>

#include "bqp/branch_bound.hpp"
#include "bqp/gen.hpp"
#include "bqp/model.hpp"
#include "bqp/pha.hpp"

int main() {
  bqp::GenParams params;
  params.ni = 3;  // suppliers
  params.nj = 2;  // candidate depot sites
  auto gen = bqp::make_instance(params, /*seed=*/7);

  auto scenarios = bqp::sample_scenarios(gen.instance, gen.scenario_model,
                                         /*n=*/8, /*seed=*/7);

  // Exact: one mixed-integer program over all scenarios.
  auto problem = bqp::build_extensive_form(gen.instance, scenarios);
  auto exact = bqp::solve_milp(problem);
  std::cout << "exact optimum: " << exact.objective << " (" << exact.nodes
            << " nodes)\n";

  // Progressive hedging: scenario subproblems coordinated on the depot plan.
  bqp::PhaConfig cfg;
  cfg.enable_hr = true;  // fix variables after repeated consensus
  auto hedged = bqp::pha_solve(gen.instance, scenarios, cfg);
  std::cout << "hedged incumbent: " << hedged.objective << " after "
            << hedged.iterations << " iterations, gap " << hedged.gap << "\n";

  for (int c = 0; c < gen.instance.nc; ++c)
    for (int j = 0; j < gen.instance.nj; ++j)
      if (hedged.y.y[c * gen.instance.nj + j])
        std::cout << "open site " << j << " at capacity level " << c << "\n";
  return 0;
}
