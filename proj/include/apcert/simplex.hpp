//
// Copyright 2026 The apcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef APCERT_SIMPLEX_HPP_
#define APCERT_SIMPLEX_HPP_

// Small dense linear programs
//
//   maximize c'x  subject to  A_i x {>=, <=, =} b_i,  x >= 0
//
// solved by a two-phase tableau simplex. Entering and leaving variables
// follow Bland's smallest-index rule, so the method cannot cycle. The
// tableau is rebuilt from the original rows every kRefactorInterval pivots
// and at the end of each phase.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "apcert/errors.hpp"

namespace apcert {

enum class Sense { kGreaterEqual, kLessEqual, kEqual };

struct LinearConstraint {
  std::vector<double> coeffs;
  Sense sense = Sense::kGreaterEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  std::vector<double> objective;  // maximized
  std::vector<LinearConstraint> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }

  // Largest violation of any row or sign constraint at x.
  double max_residual(const std::vector<double>& x) const {
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, -v);
    for (const auto& row : rows) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < row.coeffs.size(); ++j) lhs += row.coeffs[j] * x[j];
      switch (row.sense) {
        case Sense::kGreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
        case Sense::kLessEqual: worst = std::max(worst, lhs - row.rhs); break;
        case Sense::kEqual: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
      }
    }
    return worst;
  }

  double value(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < objective.size(); ++j) v += objective[j] * x[j];
    return v;
  }
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  int pivots = 0;
};

namespace detail {

using Matrix = std::vector<std::vector<double>>;

// Inverts a square matrix by Gauss-Jordan elimination with partial
// pivoting. Returns false if it is numerically singular.
inline bool invert(Matrix a, Matrix& inverse) {
  const std::size_t n = a.size();
  inverse.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inverse[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (std::abs(a[p][c]) < 1e-300) return false;
    std::swap(a[p], a[c]);
    std::swap(inverse[p], inverse[c]);
    const double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inverse[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inverse[r][j] -= f * inverse[c][j];
      }
    }
  }
  return true;
}

class Tableau {
 public:
  static constexpr double kPivotTol = 1e-11;
  static constexpr int kMaxPivots = 200000;
  static constexpr int kRefactorInterval = 32;

  // standard: m x cols equality system with right-hand side b >= 0.
  Tableau(Matrix standard, std::vector<double> b, std::vector<int> basis)
      : standard_(std::move(standard)), b_(std::move(b)), basis_(std::move(basis)),
        m_(static_cast<int>(standard_.size())),
        n_(m_ == 0 ? 0 : static_cast<int>(standard_[0].size())),
        allowed_(static_cast<std::size_t>(n_), 1) {
    for (int i = 0; i < m_; ++i) row_ids_.push_back(i);
    refactor();
  }

  int rows() const { return m_; }
  int cols() const { return n_; }
  const std::vector<int>& basis() const { return basis_; }
  int pivots() const { return pivots_; }
  void forbid(int c) { allowed_[static_cast<std::size_t>(c)] = 0; }
  double rhs(int r) const { return cells_[idx(r, n_)]; }
  double objective_value() const { return cells_[idx(m_, n_)]; }

  void set_objective(std::vector<double> c) {
    cost_ = std::move(c);
    price();
  }

  // Rebuilds B^-1 [A | b] from the original rows and reprices.
  void refactor() {
    Matrix basis_matrix(static_cast<std::size_t>(m_), std::vector<double>(static_cast<std::size_t>(m_)));
    for (int i = 0; i < m_; ++i) {
      const auto& srow = standard_[static_cast<std::size_t>(row_ids_[static_cast<std::size_t>(i)])];
      for (int c = 0; c < m_; ++c) {
        basis_matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
            srow[static_cast<std::size_t>(basis_[static_cast<std::size_t>(c)])];
      }
    }
    Matrix inverse;
    cells_.assign(static_cast<std::size_t>(m_ + 1) * (n_ + 1), 0.0);
    if (!invert(std::move(basis_matrix), inverse)) throw LpError("lp_solve: singular basis");
    for (int r = 0; r < m_; ++r) {
      const auto& inv_row = inverse[static_cast<std::size_t>(r)];
      for (int i = 0; i < m_; ++i) {
        const double f = inv_row[static_cast<std::size_t>(i)];
        if (f == 0.0) continue;
        const int orig = row_ids_[static_cast<std::size_t>(i)];
        const auto& srow = standard_[static_cast<std::size_t>(orig)];
        for (int j = 0; j < n_; ++j) cells_[idx(r, j)] += f * srow[static_cast<std::size_t>(j)];
        cells_[idx(r, n_)] += f * b_[static_cast<std::size_t>(orig)];
      }
    }
    // Basic columns are unit vectors by construction.
    for (int r = 0; r < m_; ++r) {
      const int bc = basis_[static_cast<std::size_t>(r)];
      for (int i = 0; i < m_; ++i) cells_[idx(i, bc)] = i == r ? 1.0 : 0.0;
    }
    since_refactor_ = 0;
    price();
  }

  // Runs primal simplex to optimality. Returns false if unbounded.
  bool optimize() {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < n_; ++j) {
        if (allowed_[static_cast<std::size_t>(j)] && cells_[idx(m_, j)] < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) {
        if (since_refactor_ == 0) return true;
        refactor();  // confirm optimality on fresh numbers
        continue;
      }
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = cells_[idx(i, enter)];
        if (a <= kPivotTol) continue;
        const double ratio = std::max(0.0, cells_[idx(i, n_)]) / a;
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[static_cast<std::size_t>(i)] <
                                  basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      if (pivots_ >= kMaxPivots) throw LpError("lp_solve: pivot limit reached");
      pivot(leave, enter);
      if (++since_refactor_ >= kRefactorInterval) refactor();
    }
  }

  // Moves zero-level basic columns at or beyond `first_banned` out of the
  // basis; rows where that is impossible are redundant and dropped.
  void expel(int first_banned) {
    for (int i = 0; i < m_;) {
      if (basis_[static_cast<std::size_t>(i)] < first_banned) {
        ++i;
        continue;
      }
      int enter = -1;
      double best = kPivotTol;
      for (int j = 0; j < first_banned; ++j) {
        if (std::abs(cells_[idx(i, j)]) > best) {
          best = std::abs(cells_[idx(i, j)]);
          enter = j;
        }
      }
      if (enter >= 0) {
        pivot(i, enter);
        ++i;
      } else {
        basis_.erase(basis_.begin() + i);
        row_ids_.erase(row_ids_.begin() + i);
        --m_;
        refactor();
      }
    }
    refactor();
  }

 private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(c);
  }

  void price() {
    if (cost_.empty()) return;
    for (int j = 0; j <= n_; ++j) cells_[idx(m_, j)] = 0.0;
    for (int j = 0; j < n_; ++j) cells_[idx(m_, j)] = -cost_[static_cast<std::size_t>(j)];
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
      if (cb == 0.0) continue;
      for (int j = 0; j <= n_; ++j) cells_[idx(m_, j)] += cb * cells_[idx(i, j)];
    }
  }

  void pivot(int r, int c) {
    const double p = cells_[idx(r, c)];
    for (int j = 0; j <= n_; ++j) cells_[idx(r, j)] /= p;
    cells_[idx(r, c)] = 1.0;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = cells_[idx(i, c)];
      if (f == 0.0) continue;
      for (int j = 0; j <= n_; ++j) cells_[idx(i, j)] -= f * cells_[idx(r, j)];
      cells_[idx(i, c)] = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = c;
    ++pivots_;
  }

  Matrix standard_;
  std::vector<double> b_;
  std::vector<int> basis_;
  int m_;
  int n_;
  std::vector<char> allowed_;
  std::vector<int> row_ids_;
  std::vector<double> cost_;
  std::vector<double> cells_;
  int pivots_ = 0;
  int since_refactor_ = 0;
};

}  // namespace detail

inline LpSolution lp_solve(const LinearProgram& lp) {
  const int n = lp.num_vars();
  const int m = static_cast<int>(lp.rows.size());
  if (n == 0) throw LpError("lp_solve: no variables");
  for (const auto& row : lp.rows) {
    if (static_cast<int>(row.coeffs.size()) != n) throw LpError("lp_solve: row width mismatch");
    if (!std::isfinite(row.rhs)) throw LpError("lp_solve: non-finite right-hand side");
    for (double a : row.coeffs) {
      if (!std::isfinite(a)) throw LpError("lp_solve: non-finite coefficient");
    }
  }
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw LpError("lp_solve: non-finite objective");
  }

  // Nonnegative right-hand sides, then one slack per inequality and one
  // artificial per row that has no slack to start the basis.
  std::vector<LinearConstraint> rows = lp.rows;
  for (auto& row : rows) {
    if (row.rhs < 0.0) {
      for (double& a : row.coeffs) a = -a;
      row.rhs = -row.rhs;
      if (row.sense == Sense::kGreaterEqual) {
        row.sense = Sense::kLessEqual;
      } else if (row.sense == Sense::kLessEqual) {
        row.sense = Sense::kGreaterEqual;
      }
    }
  }
  int slacks = 0;
  int artificials = 0;
  for (const auto& row : rows) {
    if (row.sense != Sense::kEqual) ++slacks;
    if (row.sense != Sense::kLessEqual) ++artificials;
  }
  const int first_artificial = n + slacks;
  const int cols = n + slacks + artificials;

  detail::Matrix standard(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(cols), 0.0));
  std::vector<double> b(static_cast<std::size_t>(m));
  std::vector<int> basis(static_cast<std::size_t>(m));
  int slack = n;
  int artificial = first_artificial;
  for (int i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    auto& srow = standard[static_cast<std::size_t>(i)];
    std::copy(row.coeffs.begin(), row.coeffs.end(), srow.begin());
    b[static_cast<std::size_t>(i)] = row.rhs;
    if (row.sense == Sense::kLessEqual) {
      srow[static_cast<std::size_t>(slack)] = 1.0;
      basis[static_cast<std::size_t>(i)] = slack++;
    } else {
      if (row.sense == Sense::kGreaterEqual) srow[static_cast<std::size_t>(slack++)] = -1.0;
      srow[static_cast<std::size_t>(artificial)] = 1.0;
      basis[static_cast<std::size_t>(i)] = artificial++;
    }
  }

  detail::Tableau tab(std::move(standard), b, std::move(basis));
  if (artificials > 0) {
    std::vector<double> phase1(static_cast<std::size_t>(cols), 0.0);
    for (int j = first_artificial; j < cols; ++j) phase1[static_cast<std::size_t>(j)] = -1.0;
    tab.set_objective(std::move(phase1));
    tab.optimize();  // bounded: the objective is at most zero
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, v);
    const double infeasibility = -tab.objective_value();
    if (infeasibility > 1e-9 * scale) {
      throw LpError("lp_solve: infeasible (phase 1 residual " + std::to_string(infeasibility) + ")");
    }
    tab.expel(first_artificial);
    for (int j = first_artificial; j < cols; ++j) tab.forbid(j);
  }

  std::vector<double> phase2(static_cast<std::size_t>(cols), 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), phase2.begin());
  tab.set_objective(std::move(phase2));
  if (!tab.optimize()) throw LpError("lp_solve: unbounded");

  LpSolution out;
  out.x.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < tab.rows(); ++i) {
    const int v = tab.basis()[static_cast<std::size_t>(i)];
    if (v < n) out.x[static_cast<std::size_t>(v)] = std::max(0.0, tab.rhs(i));
  }
  out.objective = lp.value(out.x);
  out.pivots = tab.pivots();
  return out;
}

}  // namespace apcert

#endif  // APCERT_SIMPLEX_HPP_
