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

#ifndef BQP_SCENARIO_GEN_HPP
#define BQP_SCENARIO_GEN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bqp/instance.hpp"
#include "bqp/rng.hpp"

namespace bqp {

/// Distribution descriptors for the uncertain parameters. All draws are
/// produced by the counter-based generator of rng.hpp, so a (spec, n, seed)
/// triple yields the identical scenario set on every platform.
struct ScenarioModelSpec {
  std::vector<double> supply_mean;  // [b][i][t]
  double supply_cv = 0.25;          // truncated normal, floored at 0

  double alpha_lo = 0.01, alpha_hi = 0.08;  // uniform dry-matter loss

  // Triangular distributions, stored as fractions.
  double ash_min = 0.004, ash_mode = 0.010, ash_max = 0.025;
  double moist_min = 0.00, moist_mode = 0.05, moist_max = 0.12;

  double preheat_prob = 0.5;

  // Interior breakpoints of the ash ranges: range r covers
  // [breaks[r-1], breaks[r]) with breaks[-1]=0 and an open-ended top range.
  std::vector<double> ash_breaks;
  double smear_width = 0.0;  // width of the classification window; 0 = point mass

  // Quality-sensitivity multipliers: applied to the raw draws
  // before ash fractions are derived.
  double ash_mult = 1.0;
  double moist_mult = 1.0;

  void validate(const Instance& in) const {
    if (static_cast<long>(supply_mean.size()) !=
        static_cast<long>(in.nb) * in.ni * in.nt)
      throw std::invalid_argument("scenario model: supply_mean has wrong size");
    if (!(supply_cv >= 0.0)) throw std::invalid_argument("scenario model: cv < 0");
    if (!(alpha_lo >= 0.0 && alpha_lo <= alpha_hi && alpha_hi < 1.0))
      throw std::invalid_argument("scenario model: alpha range invalid");
    if (!(ash_min <= ash_mode && ash_mode <= ash_max) ||
        !(moist_min <= moist_mode && moist_mode <= moist_max) || ash_min < 0.0 ||
        moist_min < 0.0)
      throw std::invalid_argument("scenario model: triangular parameters invalid");
    if (!(preheat_prob >= 0.0 && preheat_prob <= 1.0))
      throw std::invalid_argument("scenario model: preheat probability invalid");
    if (static_cast<int>(ash_breaks.size()) != in.nr - 1)
      throw std::invalid_argument("scenario model: need |R|-1 ash breakpoints");
    for (std::size_t k = 0; k + 1 < ash_breaks.size(); ++k)
      if (!(ash_breaks[k] < ash_breaks[k + 1]))
        throw std::invalid_argument("scenario model: breakpoints must increase");
    for (double bk : ash_breaks)
      if (!(bk > 0.0)) throw std::invalid_argument("scenario model: breakpoints must be > 0");
    if (smear_width < 0.0) throw std::invalid_argument("scenario model: smear width < 0");
  }
};

/// Unit-mass distribution of an inspected lot over the ash ranges.
/// Point rule (width 0): all mass on the range containing gamma, boundaries
/// assigned upward (half-open ranges). Smearing: mass of the uniform window
/// [gamma-w/2, gamma+w/2], clipped at 0, split by overlap and renormalized.
inline constexpr double kInfBreak() { return 1e300; }

inline std::vector<double> derive_ash_fractions(double gamma,
                                                const std::vector<double>& breaks,
                                                double smear_width = 0.0) {
  const int nr = static_cast<int>(breaks.size()) + 1;
  std::vector<double> frac(nr, 0.0);
  if (gamma < 0.0) gamma = 0.0;
  if (smear_width <= 0.0) {
    int r = 0;
    while (r < nr - 1 && gamma >= breaks[r]) ++r;
    frac[r] = 1.0;
    return frac;
  }
  double lo = std::max(0.0, gamma - smear_width / 2.0);
  double hi = gamma + smear_width / 2.0;
  if (hi <= lo) {  // window fully clipped away
    frac[0] = 1.0;
    return frac;
  }
  double total = 0.0;
  for (int r = 0; r < nr; ++r) {
    double rlo = r == 0 ? 0.0 : breaks[r - 1];
    double rhi = r == nr - 1 ? kInfBreak() : breaks[r];
    double ov = std::min(hi, rhi) - std::max(lo, rlo);
    if (ov > 0) {
      frac[r] = ov;
      total += ov;
    }
  }
  for (double& f : frac) f /= total;
  return frac;
}

inline std::vector<Scenario> sample_scenarios(const Instance& in,
                                              const ScenarioModelSpec& spec, int n,
                                              std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_scenarios: n must be >= 1");
  spec.validate(in);
  std::vector<Scenario> out;
  out.reserve(n);
  const int nb = in.nb, ni = in.ni, nj = in.nj, nr = in.nr, nt = in.nt;
  const int L = in.layers();
  for (int k = 0; k < n; ++k) {
    CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(k)));
    Scenario s;
    s.prob = 1.0 / n;
    s.supply.resize(static_cast<std::size_t>(nb) * ni * nt);
    for (std::size_t idx = 0; idx < s.supply.size(); ++idx) {
      double mean = spec.supply_mean[idx];
      s.supply[idx] = std::max(0.0, rng.normal(mean, spec.supply_cv * mean));
    }
    s.dml.resize(static_cast<std::size_t>(nb) * L);
    for (double& v : s.dml) v = rng.uniform(spec.alpha_lo, spec.alpha_hi);
    s.ash_pct.resize(static_cast<std::size_t>(nb) * nj * nt);
    for (double& v : s.ash_pct)
      v = rng.triangular(spec.ash_min, spec.ash_mode, spec.ash_max) * spec.ash_mult;
    s.moisture.resize(static_cast<std::size_t>(nb) * nj * nt);
    for (double& v : s.moisture)
      v = rng.triangular(spec.moist_min, spec.moist_mode, spec.moist_max) * spec.moist_mult;
    s.preheat.resize(static_cast<std::size_t>(nb) * nj * nr * nt);
    for (double& v : s.preheat) v = rng.bernoulli(spec.preheat_prob) ? 1.0 : 0.0;
    s.ash_frac.resize(static_cast<std::size_t>(nb) * nj * nr * nt);
    for (int b = 0; b < nb; ++b)
      for (int j = 0; j < nj; ++j)
        for (int t = 0; t < nt; ++t) {
          auto frac = derive_ash_fractions(s.ash_pct[(b * nj + j) * nt + t],
                                           spec.ash_breaks, spec.smear_width);
          for (int r = 0; r < nr; ++r)
            s.ash_frac[((b * nj + j) * nr + r) * nt + t] = frac[r];
        }
    out.push_back(std::move(s));
  }
  return out;
}

enum class BundleMethod : std::uint8_t { RoundRobin, SupplyKmeans };

struct Bundle {
  std::vector<int> members;          // scenario indices, ascending
  std::vector<double> cond_prob;     // renormalized within the bundle
  double mass = 0.0;                 // total probability of the bundle
};

namespace detail {

inline std::vector<int> kmeans_assign(const std::vector<Scenario>& scens, int k,
                                      std::uint64_t seed) {
  const int n = static_cast<int>(scens.size());
  const std::size_t dim = scens[0].supply.size();
  CounterRng rng(derive_key(seed, "kmeans"));
  // Seeded initialization: k distinct scenario indices as starting centers.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
  std::vector<std::vector<double>> centers(k);
  for (int c = 0; c < k; ++c) centers[c] = scens[perm[c]].supply;

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bestd = kInfBreak();
      for (int c = 0; c < k; ++c) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          double diff = scens[i].supply[d] - centers[c][d];
          d2 += diff * diff;
        }
        if (d2 < bestd) {
          bestd = d2;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    // Recompute centers; an empty cluster steals the scenario farthest from
    // its current center (lowest index on ties).
    std::vector<int> count(k, 0);
    for (int c = 0; c < k; ++c) std::fill(centers[c].begin(), centers[c].end(), 0.0);
    for (int i = 0; i < n; ++i) {
      ++count[assign[i]];
      for (std::size_t d = 0; d < dim; ++d) centers[assign[i]][d] += scens[i].supply[d];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] == 0) {
        int donor = -1;
        double far = -1.0;
        for (int i = 0; i < n; ++i) {
          if (count[assign[i]] <= 1) continue;
          double d2 = 0.0;
          for (std::size_t d = 0; d < dim; ++d) {
            double diff = scens[i].supply[d] - centers[assign[i]][d] / count[assign[i]];
            d2 += diff * diff;
          }
          if (d2 > far) {
            far = d2;
            donor = i;
          }
        }
        if (donor >= 0) {
          --count[assign[donor]];
          for (std::size_t d = 0; d < dim; ++d)
            centers[assign[donor]][d] -= scens[donor].supply[d];
          assign[donor] = c;
          count[c] = 1;
          centers[c] = scens[donor].supply;
        }
        changed = true;
      }
    }
    for (int c = 0; c < k; ++c)
      if (count[c] > 0)
        for (std::size_t d = 0; d < dim; ++d) centers[c][d] /= count[c];
    if (!changed) break;
  }
  return assign;
}

}  // namespace detail

inline std::vector<Bundle> bundle_scenarios(const std::vector<Scenario>& scens,
                                            int n_bundles, BundleMethod method,
                                            std::uint64_t seed = 0) {
  const int n = static_cast<int>(scens.size());
  if (n_bundles < 1 || n_bundles > n)
    throw std::invalid_argument("bundle_scenarios: need 1 <= n_bundles <= n");
  std::vector<int> assign(n);
  if (method == BundleMethod::RoundRobin) {
    for (int i = 0; i < n; ++i) assign[i] = i % n_bundles;
  } else {
    assign = detail::kmeans_assign(scens, n_bundles, seed);
  }
  std::vector<Bundle> out(n_bundles);
  for (int i = 0; i < n; ++i) {
    out[assign[i]].members.push_back(i);
    out[assign[i]].mass += scens[i].prob;
  }
  for (Bundle& b : out) {
    for (int i : b.members) b.cond_prob.push_back(scens[i].prob / b.mass);
  }
  // k-means reseeds empty clusters, so this only fires on degenerate input.
  std::erase_if(out, [](const Bundle& b) { return b.members.empty(); });
  return out;
}

}  // namespace bqp

#endif  // BQP_SCENARIO_GEN_HPP
