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

#ifndef BQP_SIMPLEX_HPP
#define BQP_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bqp/milp.hpp"

namespace bqp {

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpLimits {
  long max_iterations = 0;  // 0 = automatic (scales with problem size)
};

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;      // structural columns only
  std::vector<double> duals;  // one per row (equality-form convention)
  std::vector<double> farkas;  // Infeasible only: phase-1 duals, one per row
  std::vector<double> ray;     // Unbounded only: recession direction (structural)
  long iterations = 0;
};

/// Two-phase primal simplex for LPs with general column bounds.
/// Rows are converted to equalities with slacks; phase 1 minimizes the sum of
/// artificial variables. The basis inverse is kept explicitly (dense) and
/// refactorized periodically. Dantzig pricing with a Bland fallback after a
/// run of degenerate pivots guarantees termination.
class LpSolver {
 public:
  static constexpr double kFeasTol = 1e-7;
  static constexpr double kPivotTol = 1e-10;
  static constexpr double kCostTol = 1e-9;
  static constexpr int kStallLimit = 50;
  static constexpr int kRefactorEvery = 500;

  LpSolution solve(const MilpProblem& p, LpLimits limits = {}) {
    setup(p);
    long budget = limits.max_iterations > 0
                      ? limits.max_iterations
                      : std::max<long>(20000, 100L * (m_ + n_));
    LpSolution out;
    out.x.assign(n_, 0.0);
    out.duals.assign(m_, 0.0);

    // Phase 1.
    Outcome ph1 = run(costs1_, budget, /*phase1=*/true);
    out.iterations = iters_;
    if (ph1 == Outcome::IterLimit) {
      out.status = LpStatus::IterationLimit;
      extract(p, out);
      return out;
    }
    double infeas = 0.0;
    for (int k = 0; k < m_; ++k)
      if (basis_[k] >= art0_) infeas += std::abs(xval_[basis_[k]]);
    for (int j = art0_; j < ncols_; ++j)
      if (state_[j] != State::Basic) infeas += std::abs(xval_[j]);
    if (infeas > kFeasTol * (1.0 + rhs_scale_)) {
      out.status = LpStatus::Infeasible;
      compute_y(costs1_);  // phase-1 duals certify the infeasibility
      out.farkas.assign(y_.begin(), y_.end());
      extract(p, out);
      return out;
    }
    drive_out_artificials();
    for (int j = art0_; j < ncols_; ++j) {
      lo_[j] = 0.0;
      hi_[j] = 0.0;
    }

    // Phase 2.
    refactorize();
    Outcome ph2 = run(costs2_, budget, /*phase1=*/false);
    out.iterations = iters_;
    switch (ph2) {
      case Outcome::Optimal:
        out.status = LpStatus::Optimal;
        break;
      case Outcome::Unbounded:
        out.status = LpStatus::Unbounded;
        out.ray = ray_;
        break;
      case Outcome::IterLimit:
        out.status = LpStatus::IterationLimit;
        break;
    }
    refactorize();  // tighten basic values before reporting
    extract(p, out);
    return out;
  }

 private:
  enum class State : std::uint8_t { Basic, Lower, Upper, Free };
  enum class Outcome { Optimal, Unbounded, IterLimit };

  // Sparse columns of the equality-form matrix.
  std::vector<int> col_start_;
  std::vector<int> row_idx_;
  std::vector<double> val_;
  std::vector<double> lo_, hi_, xval_;
  std::vector<double> costs1_, costs2_;
  std::vector<double> b_;
  std::vector<State> state_;
  std::vector<int> basis_;     // column occupying each basis slot
  std::vector<double> binv_;   // m x m row-major
  std::vector<double> y_, w_;  // work vectors
  std::vector<double> ray_;    // unbounded certificate, filled by run()
  int n_ = 0, m_ = 0, ncols_ = 0, art0_ = 0;
  long iters_ = 0;
  int pivots_since_refactor_ = 0;
  int stall_ = 0;
  double rhs_scale_ = 0.0;
  double cost_scale_ = 1.0;

  void push_col(double lo, double hi) {
    lo_.push_back(lo);
    hi_.push_back(hi);
    col_start_.push_back(static_cast<int>(row_idx_.size()));
  }

  void setup(const MilpProblem& p) {
    n_ = p.num_cols();
    m_ = p.num_rows();
    ncols_ = n_ + 2 * m_;
    art0_ = n_ + m_;
    col_start_.clear();
    row_idx_.clear();
    val_.clear();
    lo_.clear();
    hi_.clear();
    lo_.reserve(ncols_);
    hi_.reserve(ncols_);

    // Structural columns, sorted triplets by (col, row).
    std::vector<MilpProblem::Triplet> tr = p.elems();
    std::sort(tr.begin(), tr.end(), [](const auto& a, const auto& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    std::size_t k = 0;
    for (int j = 0; j < n_; ++j) {
      push_col(p.lb()[j], p.ub()[j]);
      while (k < tr.size() && tr[k].col == j) {
        // merge duplicates
        if (!row_idx_.empty() && row_idx_.back() == tr[k].row &&
            static_cast<int>(row_idx_.size()) > col_start_.back()) {
          val_.back() += tr[k].val;
        } else {
          row_idx_.push_back(tr[k].row);
          val_.push_back(tr[k].val);
        }
        ++k;
      }
    }
    // Slacks: LE/GE get a one-sided slack, EQ a zero-fixed one.
    for (int i = 0; i < m_; ++i) {
      RowSense s = p.sense()[i];
      push_col(0.0, s == RowSense::EQ ? 0.0 : kInf);
      row_idx_.push_back(i);
      val_.push_back(s == RowSense::GE ? -1.0 : 1.0);
    }
    // Artificial columns; sign chosen at phase-1 start.
    b_ = p.rhs();
    rhs_scale_ = 0.0;
    for (double v : b_) rhs_scale_ = std::max(rhs_scale_, std::abs(v));

    state_.assign(ncols_, State::Lower);
    xval_.assign(ncols_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      if (lo_[j] > -kInf) {
        state_[j] = State::Lower;
        xval_[j] = lo_[j];
      } else if (hi_[j] < kInf) {
        state_[j] = State::Upper;
        xval_[j] = hi_[j];
      } else {
        state_[j] = State::Free;
        xval_[j] = 0.0;
      }
    }
    // Residual of the nonbasic point decides artificial signs.
    std::vector<double> resid = b_;
    for (int j = 0; j < n_ + m_; ++j) {
      if (xval_[j] == 0.0) continue;
      for (int e = col_start_[j]; e < col_end(j); ++e)
        resid[row_idx_[e]] -= val_[e] * xval_[j];
    }
    basis_.assign(m_, 0);
    for (int i = 0; i < m_; ++i) {
      push_col(0.0, kInf);
      row_idx_.push_back(i);
      val_.push_back(resid[i] >= 0.0 ? 1.0 : -1.0);
      int aj = art0_ + i;
      basis_[i] = aj;
      state_[aj] = State::Basic;
      xval_[aj] = std::abs(resid[i]);
    }
    col_start_.push_back(static_cast<int>(row_idx_.size()));

    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i)
      binv_[static_cast<std::size_t>(i) * m_ + i] = resid[i] >= 0.0 ? 1.0 : -1.0;

    costs1_.assign(ncols_, 0.0);
    for (int j = art0_; j < ncols_; ++j) costs1_[j] = 1.0;
    costs2_.assign(ncols_, 0.0);
    cost_scale_ = 1.0;
    for (int j = 0; j < n_; ++j) {
      costs2_[j] = p.obj()[j];
      cost_scale_ = std::max(cost_scale_, std::abs(costs2_[j]));
    }
    y_.assign(m_, 0.0);
    w_.assign(m_, 0.0);
    iters_ = 0;
    pivots_since_refactor_ = 0;
    stall_ = 0;
  }

  int col_end(int j) const { return col_start_[j + 1]; }

  double dot_col_y(int j) const {
    double s = 0.0;
    for (int e = col_start_[j]; e < col_end(j); ++e) s += y_[row_idx_[e]] * val_[e];
    return s;
  }

  void compute_y(const std::vector<double>& c) {
    std::fill(y_.begin(), y_.end(), 0.0);
    for (int k = 0; k < m_; ++k) {
      double ck = c[basis_[k]];
      if (ck == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(k) * m_];
      for (int i = 0; i < m_; ++i) y_[i] += ck * row[i];
    }
  }

  void compute_w(int q) {
    std::fill(w_.begin(), w_.end(), 0.0);
    for (int e = col_start_[q]; e < col_end(q); ++e) {
      double v = val_[e];
      int i = row_idx_[e];
      for (int k = 0; k < m_; ++k) w_[k] += binv_[static_cast<std::size_t>(k) * m_ + i] * v;
    }
  }

  Outcome run(const std::vector<double>& c, long budget, bool phase1) {
    const double dtol = kCostTol * (1.0 + (phase1 ? 1.0 : cost_scale_));
    while (true) {
      if (iters_ >= budget) return Outcome::IterLimit;
      ++iters_;
      compute_y(c);

      // Pricing.
      bool bland = stall_ >= kStallLimit;
      int q = -1, dir = 0;
      double best = dtol;
      for (int j = 0; j < ncols_; ++j) {
        State s = state_[j];
        if (s == State::Basic) continue;
        if (lo_[j] == hi_[j]) continue;  // fixed
        double d = c[j] - dot_col_y(j);
        int jdir = 0;
        double viol = 0.0;
        if (s == State::Lower && d < -dtol) {
          jdir = 1;
          viol = -d;
        } else if (s == State::Upper && d > dtol) {
          jdir = -1;
          viol = d;
        } else if (s == State::Free && std::abs(d) > dtol) {
          jdir = d < 0 ? 1 : -1;
          viol = std::abs(d);
        } else {
          continue;
        }
        if (bland) {
          q = j;
          dir = jdir;
          break;
        }
        if (viol > best) {
          best = viol;
          q = j;
          dir = jdir;
        }
      }
      if (q < 0) return Outcome::Optimal;

      compute_w(q);

      // Ratio test: blocking basic variable or the entering bound flip.
      double limit = hi_[q] - lo_[q];  // may be inf
      double step = limit;
      int leave = -1;
      double leave_to = 0.0;  // bound the leaving variable lands on
      for (int k = 0; k < m_; ++k) {
        double wk = w_[k];
        if (std::abs(wk) <= kPivotTol) continue;
        int bk = basis_[k];
        double delta = dir * wk;  // basic value moves by -delta * step
        double ratio, target;
        if (delta > 0) {
          if (lo_[bk] <= -kInf) continue;
          ratio = (xval_[bk] - lo_[bk]) / delta;
          target = lo_[bk];
        } else {
          if (hi_[bk] >= kInf) continue;
          ratio = (xval_[bk] - hi_[bk]) / delta;
          target = hi_[bk];
        }
        if (ratio < -1e-12) ratio = 0.0;
        bool better = ratio < step - 1e-12;
        bool tie = !better && ratio < step + 1e-12 && leave >= 0;
        if (tie) {
          // Bland: lowest leaving column index; otherwise largest pivot.
          if (bland ? bk < basis_[leave] : std::abs(wk) > std::abs(w_[leave]))
            better = true;
        }
        if (better) {
          step = ratio;
          leave = k;
          leave_to = target;
        }
      }

      if (step >= kInf) {
        if (phase1) throw std::logic_error("phase-1 unbounded");
        // Recession direction: entering column moves by dir, the basis
        // follows; only structural components are reported.
        ray_.assign(n_, 0.0);
        if (q < n_) ray_[q] = dir;
        for (int k = 0; k < m_; ++k)
          if (basis_[k] < n_) ray_[basis_[k]] = -dir * w_[k];
        return Outcome::Unbounded;
      }
      if (step < 1e-9)
        ++stall_;
      else
        stall_ = 0;

      // Apply the step.
      for (int k = 0; k < m_; ++k) xval_[basis_[k]] -= dir * w_[k] * step;
      xval_[q] += dir * step;

      if (leave < 0) {
        // Bound flip.
        state_[q] = dir > 0 ? State::Upper : State::Lower;
        xval_[q] = dir > 0 ? hi_[q] : lo_[q];
        continue;
      }
      pivot(q, leave, leave_to);
    }
  }

  void pivot(int q, int r, double leave_to) {
    int lcol = basis_[r];
    double pr = w_[r];
    if (std::abs(pr) <= kPivotTol) throw std::logic_error("zero pivot");
    xval_[lcol] = leave_to;
    if (lo_[lcol] <= -kInf && hi_[lcol] >= kInf)
      state_[lcol] = State::Free;
    else
      state_[lcol] = (leave_to == lo_[lcol]) ? State::Lower : State::Upper;
    basis_[r] = q;
    state_[q] = State::Basic;

    double* rowr = &binv_[static_cast<std::size_t>(r) * m_];
    double inv = 1.0 / pr;
    for (int i = 0; i < m_; ++i) rowr[i] *= inv;
    for (int k = 0; k < m_; ++k) {
      if (k == r) continue;
      double f = w_[k];
      if (f == 0.0) continue;
      double* rowk = &binv_[static_cast<std::size_t>(k) * m_];
      for (int i = 0; i < m_; ++i) rowk[i] -= f * rowr[i];
    }
    if (++pivots_since_refactor_ >= kRefactorEvery) refactorize();
  }

  /// Rebuilds binv_ from the basis by Gauss-Jordan with partial pivoting and
  /// recomputes basic values from the nonbasic point.
  void refactorize() {
    pivots_since_refactor_ = 0;
    std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<double> a(mm * mm, 0.0);  // B, column k = basis_[k]
    for (int k = 0; k < m_; ++k) {
      int j = basis_[k];
      for (int e = col_start_[j]; e < col_end(j); ++e)
        a[static_cast<std::size_t>(row_idx_[e]) * m_ + k] = val_[e];
    }
    std::vector<double>& inv = binv_;
    std::fill(inv.begin(), inv.end(), 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      double best = std::abs(a[static_cast<std::size_t>(col) * m_ + col]);
      for (int i = col + 1; i < m_; ++i) {
        double v = std::abs(a[static_cast<std::size_t>(i) * m_ + col]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best <= kPivotTol) throw std::logic_error("singular basis");
      if (piv != col) {
        for (int i = 0; i < m_; ++i) {
          std::swap(a[static_cast<std::size_t>(piv) * m_ + i],
                    a[static_cast<std::size_t>(col) * m_ + i]);
          std::swap(inv[static_cast<std::size_t>(piv) * m_ + i],
                    inv[static_cast<std::size_t>(col) * m_ + i]);
        }
      }
      double d = 1.0 / a[static_cast<std::size_t>(col) * m_ + col];
      for (int i = 0; i < m_; ++i) {
        a[static_cast<std::size_t>(col) * m_ + i] *= d;
        inv[static_cast<std::size_t>(col) * m_ + i] *= d;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        double f = a[static_cast<std::size_t>(r) * m_ + col];
        if (f == 0.0) continue;
        for (int i = 0; i < m_; ++i) {
          a[static_cast<std::size_t>(r) * m_ + i] -= f * a[static_cast<std::size_t>(col) * m_ + i];
          inv[static_cast<std::size_t>(r) * m_ + i] -=
              f * inv[static_cast<std::size_t>(col) * m_ + i];
        }
      }
    }
    // x_B = Binv (b - A_N x_N); inv is now row-reduced so recompute directly.
    std::vector<double> resid = b_;
    for (int j = 0; j < ncols_; ++j) {
      if (state_[j] == State::Basic || xval_[j] == 0.0) continue;
      for (int e = col_start_[j]; e < col_end(j); ++e)
        resid[row_idx_[e]] -= val_[e] * xval_[j];
    }
    for (int k = 0; k < m_; ++k) {
      double s = 0.0;
      const double* row = &binv_[static_cast<std::size_t>(k) * m_];
      for (int i = 0; i < m_; ++i) s += row[i] * resid[i];
      xval_[basis_[k]] = s;
    }
  }

  /// Pivots basic artificials out wherever a non-artificial column has a
  /// nonzero entry in that basis row; rows with none are redundant and keep
  /// the (zero-fixed) artificial.
  void drive_out_artificials() {
    for (int k = 0; k < m_; ++k) {
      if (basis_[k] < art0_) continue;
      int chosen = -1;
      for (int j = 0; j < art0_ && chosen < 0; ++j) {
        if (state_[j] == State::Basic) continue;
        double wk = 0.0;
        const double* rowk = &binv_[static_cast<std::size_t>(k) * m_];
        for (int e = col_start_[j]; e < col_end(j); ++e)
          wk += rowk[row_idx_[e]] * val_[e];
        if (std::abs(wk) > 1e-7) chosen = j;
      }
      if (chosen < 0) continue;
      compute_w(chosen);
      pivot(chosen, k, 0.0);  // degenerate swap, values unchanged
    }
  }

  void extract(const MilpProblem& p, LpSolution& out) {
    for (int j = 0; j < n_; ++j) out.x[j] = xval_[j];
    compute_y(costs2_);
    out.duals.assign(y_.begin(), y_.end());
    out.objective = p.objective_value(out.x);
  }
};

inline LpSolution solve_lp(const MilpProblem& p, LpLimits limits = {}) {
  LpSolver solver;
  return solver.solve(p, limits);
}

/// Dual objective of an Optimal solution, for duality-residual checks:
/// y'b plus reduced-cost contributions of nonbasic structural columns at
/// their bounds. Computed from (p, solution) alone.
inline double lp_dual_objective(const MilpProblem& p, const LpSolution& sol) {
  double v = p.obj_offset();
  for (int i = 0; i < p.num_rows(); ++i) v += sol.duals[i] * p.rhs()[i];
  std::vector<double> red = p.obj();
  for (const auto& e : p.elems()) red[e.col] -= sol.duals[e.row] * e.val;
  for (int j = 0; j < p.num_cols(); ++j) {
    double d = red[j];
    if (std::abs(d) < 1e-9) continue;
    // A nonbasic column sits at the bound its reduced-cost sign points to.
    if (d > 0 && p.lb()[j] > -kInf)
      v += d * p.lb()[j];
    else if (d < 0 && p.ub()[j] < kInf)
      v += d * p.ub()[j];
    else
      v += d * sol.x[j];
  }
  return v;
}

}  // namespace bqp

#endif  // BQP_SIMPLEX_HPP
