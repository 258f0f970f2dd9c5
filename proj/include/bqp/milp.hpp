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

#ifndef BQP_MILP_HPP
#define BQP_MILP_HPP

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bqp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : std::uint8_t { LE, EQ, GE };

/// Sparse linear program plus a designated set of binary columns.
/// Rows and columns carry unique names; the name map is a bijection used to
/// recover (symbol, indices) from solver output.
class MilpProblem {
 public:
  struct Triplet {
    int row;
    int col;
    double val;
  };

  int add_col(std::string name, double cost, double lo, double hi) {
    int id = static_cast<int>(obj_.size());
    col_index_.emplace(name, id);
    col_names_.push_back(std::move(name));
    obj_.push_back(cost);
    lb_.push_back(lo);
    ub_.push_back(hi);
    return id;
  }

  int add_binary_col(std::string name, double cost) {
    int id = add_col(std::move(name), cost, 0.0, 1.0);
    binary_cols_.push_back(id);
    return id;
  }

  int add_row(std::string name, RowSense sense, double rhs) {
    int id = static_cast<int>(rhs_.size());
    row_names_.push_back(std::move(name));
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    return id;
  }

  void add_elem(int row, int col, double val) {
    if (val != 0.0) elems_.push_back({row, col, val});
  }

  int num_cols() const { return static_cast<int>(obj_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  const std::vector<double>& obj() const { return obj_; }
  double obj_offset() const { return obj_offset_; }
  void set_obj_offset(double v) { obj_offset_ = v; }
  void add_obj(int col, double delta) { obj_[col] += delta; }

  const std::vector<double>& lb() const { return lb_; }
  const std::vector<double>& ub() const { return ub_; }
  void set_bounds(int col, double lo, double hi) {
    lb_[col] = lo;
    ub_[col] = hi;
  }

  const std::vector<Triplet>& elems() const { return elems_; }
  const std::vector<RowSense>& sense() const { return sense_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<int>& binary_cols() const { return binary_cols_; }
  const std::vector<std::string>& col_names() const { return col_names_; }
  const std::vector<std::string>& row_names() const { return row_names_; }

  int find_col(const std::string& name) const {
    auto it = col_index_.find(name);
    return it == col_index_.end() ? -1 : it->second;
  }

  double objective_value(const std::vector<double>& x) const {
    double v = obj_offset_;
    for (int j = 0; j < num_cols(); ++j) v += obj_[j] * x[j];
    return v;
  }

  /// Dimension and bound sanity; throws std::logic_error on internal
  /// inconsistency (these indicate builder bugs, not bad data).
  void validate() const {
    if (col_index_.size() != col_names_.size())
      throw std::logic_error("column names are not unique");
    for (const auto& e : elems_) {
      if (e.row < 0 || e.row >= num_rows() || e.col < 0 || e.col >= num_cols())
        throw std::logic_error("triplet out of range");
      if (!std::isfinite(e.val)) throw std::logic_error("non-finite coefficient");
    }
    for (int j : binary_cols_) {
      if (lb_[j] < 0.0 || ub_[j] > 1.0)
        throw std::logic_error("binary column with bounds outside [0,1]");
    }
  }

  /// Fixed-format MPS export for cross-checking against external solvers.
  void write_mps(std::ostream& os, const std::string& name = "BQP") const;

 private:
  std::vector<double> obj_;
  double obj_offset_ = 0.0;
  std::vector<double> lb_, ub_;
  std::vector<Triplet> elems_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
  std::vector<int> binary_cols_;
  std::vector<std::string> col_names_, row_names_;
  std::unordered_map<std::string, int> col_index_;
};

inline void MilpProblem::write_mps(std::ostream& os, const std::string& name) const {
  auto tag = [](const std::string& base, int id) {
    // MPS fixed format caps names at 8 characters.
    std::ostringstream s;
    s << base << id;
    return s.str();
  };
  os << "NAME          " << name << "\n";
  os << "ROWS\n N  COST\n";
  for (int i = 0; i < num_rows(); ++i) {
    char c = sense_[i] == RowSense::LE ? 'L' : sense_[i] == RowSense::GE ? 'G' : 'E';
    os << ' ' << c << "  " << tag("R", i) << "\n";
  }
  // Column-major order.
  std::vector<std::vector<Triplet>> cols(num_cols());
  for (const auto& e : elems_) cols[e.col].push_back(e);
  os << "COLUMNS\n";
  std::vector<bool> is_bin(num_cols(), false);
  for (int j : binary_cols_) is_bin[j] = true;
  bool in_int = false;
  os << std::setprecision(15);
  for (int j = 0; j < num_cols(); ++j) {
    if (is_bin[j] != in_int) {
      os << "    MARKER                 'MARKER'                 "
         << (is_bin[j] ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = is_bin[j];
    }
    if (obj_[j] != 0.0) os << "    " << tag("C", j) << "  COST  " << obj_[j] << "\n";
    for (const auto& e : cols[j])
      os << "    " << tag("C", j) << "  " << tag("R", e.row) << "  " << e.val << "\n";
  }
  if (in_int)
    os << "    MARKER                 'MARKER'                 'INTEND'\n";
  os << "RHS\n";
  for (int i = 0; i < num_rows(); ++i)
    if (rhs_[i] != 0.0) os << "    RHS  " << tag("R", i) << "  " << rhs_[i] << "\n";
  os << "BOUNDS\n";
  for (int j = 0; j < num_cols(); ++j) {
    if (lb_[j] == 0.0 && ub_[j] == kInf) continue;
    if (lb_[j] == ub_[j]) {
      os << " FX BND  " << tag("C", j) << "  " << lb_[j] << "\n";
      continue;
    }
    if (lb_[j] == -kInf && ub_[j] == kInf) {
      os << " FR BND  " << tag("C", j) << "\n";
      continue;
    }
    if (lb_[j] != 0.0) {
      if (lb_[j] == -kInf)
        os << " MI BND  " << tag("C", j) << "\n";
      else
        os << " LO BND  " << tag("C", j) << "  " << lb_[j] << "\n";
    }
    if (ub_[j] != kInf) os << " UP BND  " << tag("C", j) << "  " << ub_[j] << "\n";
  }
  os << "ENDATA\n";
}

}  // namespace bqp

#endif  // BQP_MILP_HPP
