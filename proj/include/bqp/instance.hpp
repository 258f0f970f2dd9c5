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

#ifndef BQP_INSTANCE_HPP
#define BQP_INSTANCE_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace bqp {

/// Deterministic data of the supply-chain design problem.
///
/// Index order conventions (row-major flattening throughout):
///   b biomass, i supplier, j depot site, c capacity level, p pellet type,
///   r / rr ash range, t period, and (tau, t) harvest-age layers with
///   tau <= t packed as layer_index(tau, t) = t(t+1)/2 + tau.
///
/// All percentages are stored as fractions in [0, 1]; quantities are tons and
/// costs currency units per ton (investments per depot).
struct Instance {
  int nb = 0, ni = 0, nj = 0, nc = 0, np = 0, nr = 0, nt = 0;

  std::vector<int> pellets_us, pellets_eu;          // market partition of P
  std::vector<std::vector<int>> pellet_ash;         // R_p: admissible ranges per p
  std::vector<std::vector<int>> pellet_biomass;     // B_p: feedstocks per p

  std::vector<double> invest;            // [c][j]
  std::vector<double> harvest;           // [b][i][t]
  std::vector<double> transport;         // [b][i][j][layer]  (see note below)
  std::vector<double> store_supply;      // [b][i][t]
  std::vector<double> store_depot;       // [b][j][t]
  std::vector<double> inspect;           // [b][j][r][t]
  std::vector<double> production;        // [p][j][t]
  std::vector<double> ash_adjust;        // [b][j][r][rr][t], zero for rr > r
  std::vector<double> moisture_cost;     // [b][j][r][t]
  std::vector<double> shortage;          // [p][t]
  std::vector<double> demand;            // [p][t]
  std::vector<double> conversion;        // [b][r][p], in (0,1]
  std::vector<double> depot_cap;         // [c][j]
  std::vector<double> supply_store_cap;  // [b][i]
  std::vector<double> depot_store_cap;   // [b][c][j]
  std::vector<double> loading_loss;      // [b][t]
  std::vector<double> transit_loss;      // [b][t]
  bool transport_loss_enabled = false;   // off: matches the base model

  int layers() const { return nt * (nt + 1) / 2; }
  static int layer_index(int tau, int t) { return t * (t + 1) / 2 + tau; }

  double psi(int c, int j) const { return invest[c * nj + j]; }
  double sigma(int b, int i, int t) const { return harvest[(b * ni + i) * nt + t]; }
  double trans(int b, int i, int j, int tau, int t) const {
    return transport[((b * ni + i) * nj + j) * layers() + layer_index(tau, t)];
  }
  double h1(int b, int i, int t) const { return store_supply[(b * ni + i) * nt + t]; }
  double h2(int b, int j, int t) const { return store_depot[(b * nj + j) * nt + t]; }
  double zeta(int b, int j, int r, int t) const {
    return inspect[((b * nj + j) * nr + r) * nt + t];
  }
  double eta(int p, int j, int t) const { return production[(p * nj + j) * nt + t]; }
  double theta(int b, int j, int r, int rr, int t) const {
    return ash_adjust[(((b * nj + j) * nr + r) * nr + rr) * nt + t];
  }
  double kappa(int b, int j, int r, int t) const {
    return moisture_cost[((b * nj + j) * nr + r) * nt + t];
  }
  double pi(int p, int t) const { return shortage[p * nt + t]; }
  double d(int p, int t) const { return demand[p * nt + t]; }
  double phi(int b, int r, int p) const { return conversion[(b * nr + r) * np + p]; }
  double gamma_cap(int c, int j) const { return depot_cap[c * nj + j]; }
  double cap1(int b, int i) const { return supply_store_cap[b * ni + i]; }
  double cap2(int b, int c, int j) const { return depot_store_cap[(b * nc + c) * nj + j]; }
  double loss_f(int b, int t) const { return loading_loss.empty() ? 0.0 : loading_loss[b * nt + t]; }
  double loss_v(int b, int t) const { return transit_loss.empty() ? 0.0 : transit_loss[b * nt + t]; }

  /// P_b: pellets producible from biomass b, derived from pellet_biomass.
  std::vector<std::vector<int>> biomass_pellets() const {
    std::vector<std::vector<int>> out(nb);
    for (int p = 0; p < np; ++p)
      for (int b : pellet_biomass[p]) out[b].push_back(p);
    return out;
  }

  bool pellet_allows_range(int p, int r) const {
    for (int rr : pellet_ash[p])
      if (rr == r) return true;
    return false;
  }
};

/// One realization of the uncertain data.
struct Scenario {
  double prob = 1.0;
  std::vector<double> supply;    // [b][i][t]   available feedstock
  std::vector<double> dml;       // [b][layer]  dry-matter loss of layer tau in period t
  std::vector<double> ash_frac;  // [b][j][r][t] inspected classification, sums to 1 over r
  std::vector<double> ash_pct;   // [b][j][t]   inspected ash content (fraction)
  std::vector<double> moisture;  // [b][j][t]   excess moisture (fraction)
  std::vector<double> preheat;   // [b][j][r][t] 1 if drying required

  double s_bar(int b, int i, int t, int ni, int nt) const {
    return supply[(b * ni + i) * nt + t];
  }
  double alpha(int b, int tau, int t, int nt) const {
    return dml[b * (nt * (nt + 1) / 2) + Instance::layer_index(tau, t)];
  }
  double ifrac(int b, int j, int r, int t, int nj, int nr, int nt) const {
    return ash_frac[((b * nj + j) * nr + r) * nt + t];
  }
};

struct FirstStageDecision {
  std::vector<std::uint8_t> y;  // [c][j]

  bool satisfies_single_depot(int nc, int nj) const {
    for (int j = 0; j < nj; ++j) {
      int open = 0;
      for (int c = 0; c < nc; ++c) open += y[c * nj + j];
      if (open > 1) return false;
    }
    return true;
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {
inline bool size_is(const std::vector<double>& v, long n) {
  return static_cast<long>(v.size()) == n;
}
}  // namespace detail

/// Checks every declared parameter domain of the model plus scenario
/// consistency. Violations are data, not failures: the report lists them all.
inline ValidationReport validate_instance(const Instance& in,
                                          const std::vector<Scenario>& scenarios) {
  ValidationReport rep;
  auto bad = [&](const std::string& msg) { rep.violations.push_back(msg); };

  if (in.nb < 1 || in.ni < 1 || in.nj < 1 || in.nc < 1 || in.np < 1 || in.nr < 1 || in.nt < 1) {
    bad("all index-set sizes must be >= 1");
    return rep;
  }
  const long L = in.layers();
  struct Dim {
    const char* name;
    const std::vector<double>* v;
    long n;
  };
  const Dim dims[] = {
      {"invest_cost", &in.invest, static_cast<long>(in.nc) * in.nj},
      {"harvest_cost", &in.harvest, static_cast<long>(in.nb) * in.ni * in.nt},
      {"transport_cost", &in.transport, static_cast<long>(in.nb) * in.ni * in.nj * L},
      {"storage_cost_supply", &in.store_supply, static_cast<long>(in.nb) * in.ni * in.nt},
      {"storage_cost_depot", &in.store_depot, static_cast<long>(in.nb) * in.nj * in.nt},
      {"inspect_cost", &in.inspect, static_cast<long>(in.nb) * in.nj * in.nr * in.nt},
      {"production_cost", &in.production, static_cast<long>(in.np) * in.nj * in.nt},
      {"ash_adjust_cost", &in.ash_adjust,
       static_cast<long>(in.nb) * in.nj * in.nr * in.nr * in.nt},
      {"moisture_reduce_cost", &in.moisture_cost,
       static_cast<long>(in.nb) * in.nj * in.nr * in.nt},
      {"shortage_penalty", &in.shortage, static_cast<long>(in.np) * in.nt},
      {"demand", &in.demand, static_cast<long>(in.np) * in.nt},
      {"conversion", &in.conversion, static_cast<long>(in.nb) * in.nr * in.np},
      {"depot_capacity", &in.depot_cap, static_cast<long>(in.nc) * in.nj},
      {"supply_storage_cap", &in.supply_store_cap, static_cast<long>(in.nb) * in.ni},
      {"depot_storage_cap", &in.depot_store_cap, static_cast<long>(in.nb) * in.nc * in.nj},
  };
  for (const auto& d : dims) {
    if (!detail::size_is(*d.v, d.n)) {
      bad(std::string(d.name) + ": wrong array size");
      return rep;
    }
    for (double v : *d.v) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        bad(std::string(d.name) + ": entries must be finite and >= 0");
        break;
      }
    }
  }
  for (double v : in.conversion)
    if (v != 0.0 && !(v > 0.0 && v <= 1.0)) {
      bad("conversion: nonzero rates must lie in (0,1]");
      break;
    }
  for (int b = 0; b < in.nb && in.ash_adjust.size(); ++b)
    for (int j = 0; j < in.nj; ++j)
      for (int r = 0; r < in.nr; ++r)
        for (int rr = r + 1; rr < in.nr; ++rr)
          for (int t = 0; t < in.nt; ++t)
            if (in.theta(b, j, r, rr, t) != 0.0) {
              bad("ash adjustment only downward: theta nonzero for r' > r");
              goto theta_done;
            }
theta_done:
  if (!in.loading_loss.empty() || !in.transit_loss.empty()) {
    auto in01 = [](const std::vector<double>& v) {
      for (double x : v)
        if (!(x >= 0.0 && x < 1.0)) return false;
      return true;
    };
    if (!detail::size_is(in.loading_loss, static_cast<long>(in.nb) * in.nt) ||
        !detail::size_is(in.transit_loss, static_cast<long>(in.nb) * in.nt))
      bad("loss arrays: wrong array size");
    else if (!in01(in.loading_loss) || !in01(in.transit_loss))
      bad("loss fractions must lie in [0,1)");
  }

  if (static_cast<int>(in.pellet_ash.size()) != in.np ||
      static_cast<int>(in.pellet_biomass.size()) != in.np) {
    bad("compatibility maps must have one entry per pellet type");
    return rep;
  }
  for (int p = 0; p < in.np; ++p) {
    bool has_demand = false;
    for (int t = 0; t < in.nt; ++t) has_demand = has_demand || in.d(p, t) > 0.0;
    if (has_demand && in.pellet_ash[p].empty())
      bad("pellet " + std::to_string(p) + " has positive demand but empty ash-range set R_p");
    for (int r : in.pellet_ash[p])
      if (r < 0 || r >= in.nr) bad("pellet_ash index out of range");
    for (int b : in.pellet_biomass[p])
      if (b < 0 || b >= in.nb) bad("pellet_biomass index out of range");
  }

  double total_prob = 0.0;
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    const Scenario& s = scenarios[w];
    const std::string tag = "scenario " + std::to_string(w) + ": ";
    if (!(s.prob > 0.0 && s.prob <= 1.0)) bad(tag + "probability must lie in (0,1]");
    total_prob += s.prob;
    if (!detail::size_is(s.supply, static_cast<long>(in.nb) * in.ni * in.nt) ||
        !detail::size_is(s.dml, static_cast<long>(in.nb) * L) ||
        !detail::size_is(s.ash_frac, static_cast<long>(in.nb) * in.nj * in.nr * in.nt) ||
        !detail::size_is(s.ash_pct, static_cast<long>(in.nb) * in.nj * in.nt) ||
        !detail::size_is(s.moisture, static_cast<long>(in.nb) * in.nj * in.nt) ||
        !detail::size_is(s.preheat, static_cast<long>(in.nb) * in.nj * in.nr * in.nt)) {
      bad(tag + "wrong array size");
      continue;
    }
    for (double v : s.supply)
      if (!(v >= 0.0) || !std::isfinite(v)) {
        bad(tag + "supply must be finite and >= 0");
        break;
      }
    for (double v : s.dml)
      if (!(v >= 0.0 && v < 1.0)) {
        bad(tag + "dry-matter loss must lie in [0,1)");
        break;
      }
    for (double v : s.preheat)
      if (v != 0.0 && v != 1.0) {
        bad(tag + "preheat flags must be 0 or 1");
        break;
      }
    for (int b = 0; b < in.nb; ++b)
      for (int j = 0; j < in.nj; ++j)
        for (int t = 0; t < in.nt; ++t) {
          double sum = 0.0;
          for (int r = 0; r < in.nr; ++r) sum += s.ifrac(b, j, r, t, in.nj, in.nr, in.nt);
          if (std::abs(sum - 1.0) > 1e-9) {
            bad(tag + "ash fractions do not sum to 1");
            goto next_scenario;
          }
        }
  next_scenario:;
  }
  if (!scenarios.empty() && std::abs(total_prob - 1.0) > 1e-9)
    bad("scenario probabilities do not sum to 1");
  return rep;
}

}  // namespace bqp

#endif  // BQP_INSTANCE_HPP
