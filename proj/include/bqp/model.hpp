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

#ifndef BQP_MODEL_HPP
#define BQP_MODEL_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bqp/instance.hpp"
#include "bqp/milp.hpp"
#include "bqp/simplex.hpp"

namespace bqp {

struct BuildOptions {
  long max_columns = 2'000'000;
};

class ModelBuildError : public std::runtime_error {
 public:
  explicit ModelBuildError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string idx(std::initializer_list<int> v) {
  std::string s = "[";
  bool first = true;
  for (int i : v) {
    if (!first) s += ',';
    s += std::to_string(i);
    first = false;
  }
  return s + "]";
}

/// Column count of one scenario block, used for the size guard and by tests
/// as a closed-form cross-check.
inline long scenario_column_count(const Instance& in) {
  const long L = in.layers();
  long n = 0;
  n += static_cast<long>(in.nb) * in.ni * in.nt;      // S
  n += static_cast<long>(in.nb) * in.ni * in.nj * L;  // X
  n += static_cast<long>(in.nb) * in.ni * L;          // H1
  n += static_cast<long>(in.nb) * in.nj * L;          // H2
  n += static_cast<long>(in.nb) * in.nj * L;          // P
  n += static_cast<long>(in.nb) * in.nj * in.nt;      // Z
  n += static_cast<long>(in.nb) * in.nj * in.nr * in.nt;  // Q
  n += static_cast<long>(in.nb) * in.nj * (in.nr * (in.nr + 1) / 2) * in.nt;  // R
  const auto pb = in.biomass_pellets();
  for (int b = 0; b < in.nb; ++b)
    n += static_cast<long>(pb[b].size()) * in.nr * in.nj * in.nt;  // L
  for (int p = 0; p < in.np; ++p)
    n += static_cast<long>(in.pellet_ash[p].size()) * in.nj * in.nt;  // D
  n += static_cast<long>(in.np) * in.nt;  // U
  return n;
}

/// Appends the second-stage block of one scenario: columns, the constraint
/// families (3)-(17) of that scenario, and its cost terms scaled by `weight`.
/// `ycols` are the first-stage columns referenced by (9) and (16).
inline void append_scenario(MilpProblem& p, const Instance& in, const Scenario& sc, int s,
                            double weight, const std::vector<int>& ycols) {
  const int nb = in.nb, ni = in.ni, nj = in.nj, nc = in.nc, np = in.np, nr = in.nr,
            nt = in.nt;
  const auto pb = in.biomass_pellets();
  auto tagS = std::to_string(s);
  auto name = [&](const char* sym, std::initializer_list<int> ids) {
    return std::string(sym) + "[" + tagS + "]" + idx(ids);
  };
  auto row = [&](int fam, std::initializer_list<int> ids, RowSense sense, double rhs) {
    return p.add_row("c" + std::to_string(fam) + "[" + tagS + "]" + idx(ids), sense, rhs);
  };

  // ---- columns ----
  std::vector<int> S(static_cast<std::size_t>(nb) * ni * nt);
  for (int b = 0; b < nb; ++b)
    for (int i = 0; i < ni; ++i)
      for (int t = 0; t < nt; ++t)
        S[(b * ni + i) * nt + t] =
            p.add_col(name("S", {b, i, t}), weight * in.sigma(b, i, t), 0.0,
                      sc.s_bar(b, i, t, ni, nt));  // (3) as an upper bound

  const int L = in.layers();
  std::vector<int> X(static_cast<std::size_t>(nb) * ni * nj * L, -1);
  std::vector<int> H1(static_cast<std::size_t>(nb) * ni * L, -1);
  std::vector<int> H2(static_cast<std::size_t>(nb) * nj * L, -1);
  std::vector<int> PP(static_cast<std::size_t>(nb) * nj * L, -1);
  for (int b = 0; b < nb; ++b)
    for (int t = 0; t < nt; ++t)
      for (int tau = 0; tau <= t; ++tau) {
        int l = Instance::layer_index(tau, t);
        for (int i = 0; i < ni; ++i) {
          H1[(b * ni + i) * L + l] = p.add_col(name("H1", {b, i, tau, t}),
                                               weight * in.h1(b, i, t), 0.0, kInf);
          for (int j = 0; j < nj; ++j)
            X[((b * ni + i) * nj + j) * L + l] =
                p.add_col(name("X", {b, i, j, tau, t}),
                          weight * in.trans(b, i, j, tau, t), 0.0, kInf);
        }
        for (int j = 0; j < nj; ++j) {
          H2[(b * nj + j) * L + l] =
              p.add_col(name("H2", {b, j, tau, t}), weight * in.h2(b, j, t), 0.0, kInf);
          PP[(b * nj + j) * L + l] = p.add_col(name("P", {b, j, tau, t}), 0.0, 0.0, kInf);
        }
      }

  std::vector<int> Z(static_cast<std::size_t>(nb) * nj * nt);
  std::vector<int> Q(static_cast<std::size_t>(nb) * nj * nr * nt);
  std::vector<int> RA(static_cast<std::size_t>(nb) * nj * nr * nr * nt, -1);
  for (int b = 0; b < nb; ++b)
    for (int j = 0; j < nj; ++j)
      for (int t = 0; t < nt; ++t) {
        Z[(b * nj + j) * nt + t] = p.add_col(name("Z", {b, j, t}), 0.0, 0.0, kInf);
        for (int r = 0; r < nr; ++r)
          Q[((b * nj + j) * nr + r) * nt + t] =
              p.add_col(name("Q", {b, j, r, t}), weight * in.zeta(b, j, r, t), 0.0, kInf);
        for (int r = 0; r < nr; ++r)
          for (int rr = 0; rr <= r; ++rr) {
            double mu = sc.moisture[(b * nj + j) * nt + t];
            double beta = sc.preheat[((b * nj + j) * nr + rr) * nt + t];
            double cost = in.theta(b, j, r, rr, t) + in.kappa(b, j, rr, t) * beta * mu;
            RA[(((b * nj + j) * nr + r) * nr + rr) * nt + t] =
                p.add_col(name("RA", {b, j, r, rr, t}), weight * cost, 0.0, kInf);
          }
      }

  // L[b, r', p, j, t] exists for p producible from b; fixed to zero when the
  // source range r' is not admissible for p.
  std::map<std::tuple<int, int, int, int, int>, int> Lcols;
  for (int b = 0; b < nb; ++b)
    for (int r = 0; r < nr; ++r)
      for (int pp : pb[b])
        for (int j = 0; j < nj; ++j)
          for (int t = 0; t < nt; ++t) {
            double hi = in.pellet_allows_range(pp, r) ? kInf : 0.0;
            Lcols[{b, r, pp, j, t}] = p.add_col(name("L", {b, r, pp, j, t}), 0.0, 0.0, hi);
          }

  std::map<std::tuple<int, int, int, int>, int> Dcols;
  for (int pp = 0; pp < np; ++pp)
    for (int r : in.pellet_ash[pp])
      for (int j = 0; j < nj; ++j)
        for (int t = 0; t < nt; ++t)
          Dcols[{pp, j, r, t}] = p.add_col(name("D", {pp, j, r, t}),
                                           weight * in.eta(pp, j, t), 0.0, kInf);

  std::vector<int> U(static_cast<std::size_t>(np) * nt);
  for (int pp = 0; pp < np; ++pp)
    for (int t = 0; t < nt; ++t)
      U[pp * nt + t] = p.add_col(name("U", {pp, t}), weight * in.pi(pp, t), 0.0, kInf);

  // ---- rows ----
  for (int b = 0; b < nb; ++b)
    for (int i = 0; i < ni; ++i)
      for (int t = 0; t < nt; ++t) {
        // (4) fresh harvest splits into on-site storage and shipment.
        int r4 = row(4, {b, i, t}, RowSense::EQ, 0.0);
        p.add_elem(r4, S[(b * ni + i) * nt + t], 1.0);
        int lt = Instance::layer_index(t, t);
        p.add_elem(r4, H1[(b * ni + i) * L + lt], -1.0);
        for (int j = 0; j < nj; ++j)
          p.add_elem(r4, X[((b * ni + i) * nj + j) * L + lt], -1.0);
        // (5) aging of stored layers.
        for (int tau = 0; tau < t; ++tau) {
          int r5 = row(5, {b, i, tau, t}, RowSense::EQ, 0.0);
          p.add_elem(r5, H1[(b * ni + i) * L + Instance::layer_index(tau, t - 1)],
                     1.0 - sc.alpha(b, tau, t - 1, nt));
          p.add_elem(r5, H1[(b * ni + i) * L + Instance::layer_index(tau, t)], -1.0);
          for (int j = 0; j < nj; ++j)
            p.add_elem(r5, X[((b * ni + i) * nj + j) * L + Instance::layer_index(tau, t)],
                       -1.0);
        }
        // (8) supply-site storage capacity.
        int r8 = row(8, {b, i, t}, RowSense::LE, in.cap1(b, i));
        for (int tau = 0; tau <= t; ++tau)
          p.add_elem(r8, H1[(b * ni + i) * L + Instance::layer_index(tau, t)], 1.0);
      }

  for (int b = 0; b < nb; ++b)
    for (int j = 0; j < nj; ++j)
      for (int t = 0; t < nt; ++t) {
        double inflow = 1.0;
        if (in.transport_loss_enabled)
          inflow = (1.0 - in.loss_f(b, t)) * (1.0 - in.loss_v(b, t));
        // (6) fresh arrivals split into depot storage and processing.
        int r6 = row(6, {b, j, t}, RowSense::EQ, 0.0);
        int lt = Instance::layer_index(t, t);
        for (int i = 0; i < ni; ++i)
          p.add_elem(r6, X[((b * ni + i) * nj + j) * L + lt], inflow);
        p.add_elem(r6, H2[(b * nj + j) * L + lt], -1.0);
        p.add_elem(r6, PP[(b * nj + j) * L + lt], -1.0);
        // (7) aging at depots.
        for (int tau = 0; tau < t; ++tau) {
          int r7 = row(7, {b, j, tau, t}, RowSense::EQ, 0.0);
          p.add_elem(r7, H2[(b * nj + j) * L + Instance::layer_index(tau, t - 1)],
                     1.0 - sc.alpha(b, tau, t - 1, nt));
          for (int i = 0; i < ni; ++i)
            p.add_elem(r7, X[((b * ni + i) * nj + j) * L + Instance::layer_index(tau, t)],
                       inflow);
          p.add_elem(r7, H2[(b * nj + j) * L + Instance::layer_index(tau, t)], -1.0);
          p.add_elem(r7, PP[(b * nj + j) * L + Instance::layer_index(tau, t)], -1.0);
        }
        // (9) depot storage only where a depot is open.
        int r9 = row(9, {b, j, t}, RowSense::LE, 0.0);
        for (int tau = 0; tau <= t; ++tau)
          p.add_elem(r9, H2[(b * nj + j) * L + Instance::layer_index(tau, t)], 1.0);
        for (int c = 0; c < nc; ++c) p.add_elem(r9, ycols[c * nj + j], -in.cap2(b, c, j));
        // (10) processing draw aggregates into inspection availability.
        int r10 = row(10, {b, j, t}, RowSense::EQ, 0.0);
        for (int tau = 0; tau <= t; ++tau)
          p.add_elem(r10, PP[(b * nj + j) * L + Instance::layer_index(tau, t)], 1.0);
        p.add_elem(r10, Z[(b * nj + j) * nt + t], -1.0);
        // (11)+(12) classification: Q_r = I_r * Z.
        for (int r = 0; r < nr; ++r) {
          int r11 = row(11, {b, j, r, t}, RowSense::EQ, 0.0);
          p.add_elem(r11, Q[((b * nj + j) * nr + r) * nt + t], 1.0);
          p.add_elem(r11, Z[(b * nj + j) * nt + t], -sc.ifrac(b, j, r, t, nj, nr, nt));
        }
        // (13) every classified ton is adjusted (possibly to its own level).
        for (int r = 0; r < nr; ++r) {
          int r13 = row(13, {b, j, r, t}, RowSense::EQ, 0.0);
          for (int rr = 0; rr <= r; ++rr)
            p.add_elem(r13, RA[(((b * nj + j) * nr + r) * nr + rr) * nt + t], 1.0);
          p.add_elem(r13, Q[((b * nj + j) * nr + r) * nt + t], -1.0);
        }
        // (14) adjusted mass at level r' feeds production draws.
        for (int rr = 0; rr < nr; ++rr) {
          int r14 = row(14, {b, j, rr, t}, RowSense::EQ, 0.0);
          for (int r = rr; r < nr; ++r)
            p.add_elem(r14, RA[(((b * nj + j) * nr + r) * nr + rr) * nt + t], 1.0);
          for (int pp : pb[b]) p.add_elem(r14, Lcols[{b, rr, pp, j, t}], -1.0);
        }
      }

  for (int pp = 0; pp < np; ++pp)
    for (int j = 0; j < nj; ++j)
      for (int t = 0; t < nt; ++t)
        for (int r : in.pellet_ash[pp]) {
          // (15) conversion of feedstock into pellets.
          int r15 = row(15, {pp, j, r, t}, RowSense::EQ, 0.0);
          for (int b : in.pellet_biomass[pp])
            p.add_elem(r15, Lcols[{b, r, pp, j, t}], in.phi(b, r, pp));
          p.add_elem(r15, Dcols[{pp, j, r, t}], -1.0);
        }

  for (int j = 0; j < nj; ++j)
    for (int t = 0; t < nt; ++t) {
      // (16) production limited by installed capacity.
      int r16 = row(16, {j, t}, RowSense::LE, 0.0);
      for (int pp = 0; pp < np; ++pp)
        for (int r : in.pellet_ash[pp]) p.add_elem(r16, Dcols[{pp, j, r, t}], 1.0);
      for (int c = 0; c < nc; ++c) p.add_elem(r16, ycols[c * nj + j], -in.gamma_cap(c, j));
    }

  for (int pp = 0; pp < np; ++pp)
    for (int t = 0; t < nt; ++t) {
      // (17) demand met by depots or the shortage variable.
      int r17 = row(17, {pp, t}, RowSense::EQ, in.d(pp, t));
      for (int j = 0; j < nj; ++j)
        for (int r : in.pellet_ash[pp]) p.add_elem(r17, Dcols[{pp, j, r, t}], 1.0);
      p.add_elem(r17, U[pp * nt + t], 1.0);
    }
}

inline std::vector<int> add_first_stage(MilpProblem& p, const Instance& in,
                                        bool with_cost = true) {
  std::vector<int> ycols(static_cast<std::size_t>(in.nc) * in.nj);
  for (int c = 0; c < in.nc; ++c)
    for (int j = 0; j < in.nj; ++j)
      ycols[c * in.nj + j] =
          p.add_binary_col("Y" + idx({c, j}), with_cost ? in.psi(c, j) : 0.0);
  for (int j = 0; j < in.nj; ++j) {
    int r2 = p.add_row("c2" + idx({j}), RowSense::LE, 1.0);
    for (int c = 0; c < in.nc; ++c) p.add_elem(r2, ycols[c * in.nj + j], 1.0);
  }
  return ycols;
}

inline void check_size(const Instance& in, std::size_t n_scen, const BuildOptions& opts) {
  long total = static_cast<long>(in.nc) * in.nj +
               static_cast<long>(n_scen) * scenario_column_count(in);
  if (total > opts.max_columns)
    throw ModelBuildError("instance too large: " + std::to_string(total) +
                          " columns exceed the configured maximum of " +
                          std::to_string(opts.max_columns));
}

}  // namespace detail

/// Deterministic-equivalent MILP across all scenarios; binaries are exactly
/// the depot-opening columns.
inline MilpProblem build_extensive_form(const Instance& in,
                                        const std::vector<Scenario>& scenarios,
                                        const BuildOptions& opts = {}) {
  detail::check_size(in, scenarios.size(), opts);
  MilpProblem p;
  std::vector<int> y = detail::add_first_stage(p, in);
  for (std::size_t s = 0; s < scenarios.size(); ++s)
    detail::append_scenario(p, in, scenarios[s], static_cast<int>(s), scenarios[s].prob, y);
  p.validate();
  return p;
}

/// Scenario (or bundle) subproblem with the multiplier term w'Y and the
/// exactly-linearized proximal term (rho/2)(Y - 2 Y ybar + ybar^2); the
/// member probabilities must sum to 1 within the bundle.
inline MilpProblem build_pha_subproblem(const Instance& in,
                                        const std::vector<Scenario>& members,
                                        const std::vector<double>& w,
                                        const std::vector<double>& ybar, double rho_pen,
                                        const BuildOptions& opts = {}) {
  if (!(rho_pen > 0.0)) throw std::invalid_argument("rho_pen must be > 0");
  detail::check_size(in, members.size(), opts);
  MilpProblem p;
  std::vector<int> y = detail::add_first_stage(p, in);
  double offset = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    p.add_obj(y[k], w[k] + rho_pen * (0.5 - ybar[k]));
    offset += 0.5 * rho_pen * ybar[k] * ybar[k];
  }
  p.set_obj_offset(offset);
  for (std::size_t s = 0; s < members.size(); ++s)
    detail::append_scenario(p, in, members[s], static_cast<int>(s), members[s].prob, y);
  p.validate();
  return p;
}

struct FirstStageEvaluation {
  double expected_cost = 0.0;
  std::vector<double> per_scenario;  // total cost (psi y + second stage) per scenario
};

/// Fixes Y and solves one LP per scenario. Always feasible: the shortage
/// variable absorbs unmet demand.
inline FirstStageEvaluation evaluate_first_stage(const Instance& in,
                                                 const std::vector<Scenario>& scenarios,
                                                 const FirstStageDecision& y,
                                                 const BuildOptions& opts = {}) {
  if (!y.satisfies_single_depot(in.nc, in.nj))
    throw std::invalid_argument("first-stage decision violates single-depot constraint");
  FirstStageEvaluation ev;
  double first_stage = 0.0;
  for (int c = 0; c < in.nc; ++c)
    for (int j = 0; j < in.nj; ++j)
      if (y.y[c * in.nj + j]) first_stage += in.psi(c, j);
  for (const Scenario& sc : scenarios) {
    detail::check_size(in, 1, opts);
    MilpProblem p;
    std::vector<int> ycols = detail::add_first_stage(p, in, /*with_cost=*/false);
    for (std::size_t k = 0; k < ycols.size(); ++k) {
      double v = y.y[k] ? 1.0 : 0.0;
      p.set_bounds(ycols[k], v, v);
    }
    Scenario one = sc;
    one.prob = 1.0;
    detail::append_scenario(p, in, one, 0, 1.0, ycols);
    LpSolution sol = solve_lp(p);
    if (sol.status != LpStatus::Optimal)
      throw std::runtime_error("scenario LP did not solve to optimality (status " +
                               std::to_string(static_cast<int>(sol.status)) + ")");
    ev.per_scenario.push_back(first_stage + sol.objective);
  }
  ev.expected_cost = first_stage;
  for (std::size_t s = 0; s < scenarios.size(); ++s)
    ev.expected_cost += scenarios[s].prob * (ev.per_scenario[s] - first_stage);
  return ev;
}

struct FeasReport {
  std::map<std::string, double> family_residual;  // max |violation| per family
  double max_residual = 0.0;

  bool pass(double tol) const { return max_residual <= tol; }
};

/// Re-verifies a primal point against every materialized constraint family,
/// plus the bound-encoded families: (3) supply availability, (15) inadmissible
/// L fixed to zero, (18) binary integrality, (19)/(20) non-negativity.
inline FeasReport check_solution_feasibility(const MilpProblem& p,
                                             const std::vector<double>& x) {
  FeasReport rep;
  auto note = [&](const std::string& fam, double resid) {
    if (resid < 0) resid = 0;
    auto& slot = rep.family_residual[fam];
    if (resid > slot) slot = resid;
    if (resid > rep.max_residual) rep.max_residual = resid;
  };

  std::vector<double> act(p.num_rows(), 0.0);
  for (const auto& e : p.elems()) act[e.row] += e.val * x[e.col];
  for (int i = 0; i < p.num_rows(); ++i) {
    const std::string& nm = p.row_names()[i];
    std::string fam = nm.substr(1, nm.find('[') - 1);
    double r = 0.0;
    switch (p.sense()[i]) {
      case RowSense::LE: r = act[i] - p.rhs()[i]; break;
      case RowSense::GE: r = p.rhs()[i] - act[i]; break;
      case RowSense::EQ: r = std::abs(act[i] - p.rhs()[i]); break;
    }
    note(fam, r);
  }

  std::vector<bool> is_bin(p.num_cols(), false);
  for (int j : p.binary_cols()) is_bin[j] = true;
  for (int j = 0; j < p.num_cols(); ++j) {
    const std::string& nm = p.col_names()[j];
    char c0 = nm[0];
    double lo_viol = p.lb()[j] - x[j];
    double hi_viol = x[j] - p.ub()[j];
    if (is_bin[j]) {
      note("18", std::max(lo_viol, hi_viol));
      note("18", std::abs(x[j] - std::round(x[j])));
      continue;
    }
    if (c0 == 'S') {
      note("3", hi_viol);
      note("20", lo_viol);
    } else if (c0 == 'L') {
      note("15", hi_viol);  // inadmissible-range production fixed at zero
      note("20", lo_viol);
    } else if (c0 == 'X' || c0 == 'H' || c0 == 'P') {
      note("19", std::max(lo_viol, hi_viol));
    } else {
      note("20", std::max(lo_viol, hi_viol));
    }
  }
  return rep;
}

inline FeasReport check_solution_feasibility(const Instance& in,
                                             const std::vector<Scenario>& scenarios,
                                             const std::vector<double>& x,
                                             const BuildOptions& opts = {}) {
  return check_solution_feasibility(build_extensive_form(in, scenarios, opts), x);
}

/// Probability-weighted solution summary used by the reporting layer.
struct SolutionSummary {
  int depots_open = 0;
  double supply_storage = 0.0;  // expected total H1 tonnage
  double depot_storage = 0.0;   // expected total H2 tonnage
  double shortage = 0.0;        // expected unmet demand
};

inline SolutionSummary summarize_solution(const MilpProblem& p, const std::vector<double>& x,
                                          const std::vector<double>& scenario_probs) {
  SolutionSummary s;
  for (int j = 0; j < p.num_cols(); ++j) {
    const std::string& nm = p.col_names()[j];
    if (nm[0] == 'Y') {
      if (x[j] > 0.5) ++s.depots_open;
      continue;
    }
    auto lb = nm.find('[');
    if (lb == std::string::npos) continue;
    int scen = std::stoi(nm.substr(lb + 1));
    double w = scenario_probs[scen];
    if (nm.rfind("H1[", 0) == 0)
      s.supply_storage += w * x[j];
    else if (nm.rfind("H2[", 0) == 0)
      s.depot_storage += w * x[j];
    else if (nm.rfind("U[", 0) == 0)
      s.shortage += w * x[j];
  }
  return s;
}

}  // namespace bqp

#endif  // BQP_MODEL_HPP
