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

#ifndef BQP_GEN_HPP
#define BQP_GEN_HPP

#include <cstdint>
#include <stdexcept>

#include "bqp/instance.hpp"
#include "bqp/rng.hpp"
#include "bqp/scenario_gen.hpp"

namespace bqp {

/// Knobs of the synthetic-instance generator. Unit costs are drawn from
/// {1, 2}; capacities are sized so that a single depot can cover demand and
/// storage is never the binding constraint.
struct GenParams {
  int nb = 1, ni = 2, nj = 2, nc = 1, np = 1, nr = 2, nt = 2;
  double demand_per_period = 10.0;
  double invest = 100.0;
  double shortage_penalty = 50.0;
  double conversion_rate = 0.8;
  double supply_mean = 10.0;
  double supply_cv = 0.3;
};

struct GeneratedInstance {
  Instance instance;
  ScenarioModelSpec scenario_model;
};

inline GeneratedInstance make_instance(const GenParams& g, std::uint64_t seed) {
  if (g.nb < 1 || g.ni < 1 || g.nj < 1 || g.nc < 1 || g.np < 1 || g.nr < 1 || g.nt < 1)
    throw std::invalid_argument("make_instance: all set sizes must be >= 1");
  CounterRng rng(derive_key(seed, "instance"));
  auto unit = [&] { return 1.0 + static_cast<double>(rng.below(2)); };

  Instance in;
  in.nb = g.nb;
  in.ni = g.ni;
  in.nj = g.nj;
  in.nc = g.nc;
  in.np = g.np;
  in.nr = g.nr;
  in.nt = g.nt;

  in.pellets_us.clear();
  in.pellets_eu.clear();
  for (int p = 0; p < g.np; ++p)
    (p % 2 == 0 ? in.pellets_us : in.pellets_eu).push_back(p);
  in.pellet_ash.assign(g.np, {0});  // only the lowest ash range is admissible
  in.pellet_biomass.resize(g.np);
  for (int p = 0; p < g.np; ++p)
    for (int b = 0; b < g.nb; ++b) in.pellet_biomass[p].push_back(b);

  in.invest.resize(static_cast<std::size_t>(g.nc) * g.nj);
  for (int c = 0; c < g.nc; ++c)
    for (int j = 0; j < g.nj; ++j) in.invest[c * g.nj + j] = g.invest * (1.0 + c);

  in.harvest.resize(static_cast<std::size_t>(g.nb) * g.ni * g.nt);
  for (double& v : in.harvest) v = unit();

  // Transport costs are asymmetric across (i, j) pairs so that the cheapest
  // depot depends on which suppliers end up supply-rich in a scenario.
  const int L = in.layers();
  in.transport.resize(static_cast<std::size_t>(g.nb) * g.ni * g.nj * L);
  for (int b = 0; b < g.nb; ++b)
    for (int i = 0; i < g.ni; ++i)
      for (int j = 0; j < g.nj; ++j) {
        double base = ((i + j) % g.nj == 0) ? 1.0 : 2.0;
        for (int l = 0; l < L; ++l)
          in.transport[((b * g.ni + i) * g.nj + j) * L + l] = base;
      }

  in.store_supply.resize(static_cast<std::size_t>(g.nb) * g.ni * g.nt);
  for (double& v : in.store_supply) v = unit();
  in.store_depot.resize(static_cast<std::size_t>(g.nb) * g.nj * g.nt);
  for (double& v : in.store_depot) v = unit();
  in.inspect.resize(static_cast<std::size_t>(g.nb) * g.nj * g.nr * g.nt);
  for (double& v : in.inspect) v = 1.0;
  in.production.resize(static_cast<std::size_t>(g.np) * g.nj * g.nt);
  for (double& v : in.production) v = 2.0;

  in.ash_adjust.assign(static_cast<std::size_t>(g.nb) * g.nj * g.nr * g.nr * g.nt, 0.0);
  for (int b = 0; b < g.nb; ++b)
    for (int j = 0; j < g.nj; ++j)
      for (int r = 0; r < g.nr; ++r)
        for (int rr = 0; rr < r; ++rr) {
          double step_cost = 2.0 * (r - rr);
          for (int t = 0; t < g.nt; ++t)
            in.ash_adjust[(((b * g.nj + j) * g.nr + r) * g.nr + rr) * g.nt + t] = step_cost;
        }

  in.moisture_cost.resize(static_cast<std::size_t>(g.nb) * g.nj * g.nr * g.nt);
  for (double& v : in.moisture_cost) v = 20.0;

  in.shortage.assign(static_cast<std::size_t>(g.np) * g.nt, g.shortage_penalty);
  in.demand.assign(static_cast<std::size_t>(g.np) * g.nt, g.demand_per_period);
  in.conversion.assign(static_cast<std::size_t>(g.nb) * g.nr * g.np, g.conversion_rate);

  // One depot can cover all pellet demand with a 25% margin.
  in.depot_cap.assign(static_cast<std::size_t>(g.nc) * g.nj, 0.0);
  for (int c = 0; c < g.nc; ++c)
    for (int j = 0; j < g.nj; ++j)
      in.depot_cap[c * g.nj + j] = 1.25 * g.demand_per_period * g.np * (1.0 + c);
  double store_cap = 5.0 * g.supply_mean * g.nt;
  in.supply_store_cap.assign(static_cast<std::size_t>(g.nb) * g.ni, store_cap);
  in.depot_store_cap.assign(static_cast<std::size_t>(g.nb) * g.nc * g.nj, store_cap);
  in.loading_loss.assign(static_cast<std::size_t>(g.nb) * g.nt, 0.02);
  in.transit_loss.assign(static_cast<std::size_t>(g.nb) * g.nt, 0.01);
  in.transport_loss_enabled = false;

  ScenarioModelSpec spec;
  spec.supply_mean.resize(static_cast<std::size_t>(g.nb) * g.ni * g.nt);
  for (int b = 0; b < g.nb; ++b)
    for (int i = 0; i < g.ni; ++i) {
      double scale = g.ni > 1 ? 0.8 + 0.4 * i / (g.ni - 1) : 1.0;
      for (int t = 0; t < g.nt; ++t)
        spec.supply_mean[(b * g.ni + i) * g.nt + t] = g.supply_mean * scale;
    }
  spec.supply_cv = g.supply_cv;
  spec.ash_breaks.resize(g.nr - 1);
  for (int r = 0; r + 1 < g.nr; ++r)
    spec.ash_breaks[r] = spec.ash_min + (r + 1) * (spec.ash_max - spec.ash_min) / g.nr;
  return {in, spec};
}

/// The canonical hand-auditable micro-fixture:
/// |I|=2, |J|=2, |C|=1, |B|=1, |P|=1, |R|=2, |T|=2, seed 0.
inline GeneratedInstance make_t1() { return make_instance(GenParams{}, 0); }

inline std::vector<Scenario> t1_scenarios(const GeneratedInstance& t1, int n = 2,
                                          std::uint64_t seed = 0) {
  return sample_scenarios(t1.instance, t1.scenario_model, n, seed);
}

/// The repo's 9-instance benchmark grid: |I| in {2,3,4} crossed with
/// (|J|,|T|) in {(2,2),(3,2),(2,3)}; everything else at generator defaults.
inline GenParams bench9_params(int index) {
  if (index < 0 || index > 8) throw std::invalid_argument("bench9 index out of range");
  static constexpr int kI[3] = {2, 3, 4};
  static constexpr int kJT[3][2] = {{2, 2}, {3, 2}, {2, 3}};
  GenParams g;
  g.ni = kI[index / 3];
  g.nj = kJT[index % 3][0];
  g.nt = kJT[index % 3][1];
  return g;
}

inline GeneratedInstance make_bench9(int index, std::uint64_t seed = 0) {
  return make_instance(bench9_params(index), derive_key(seed, static_cast<std::uint64_t>(index)));
}

}  // namespace bqp

#endif  // BQP_GEN_HPP
