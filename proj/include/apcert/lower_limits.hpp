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

#ifndef APCERT_LOWER_LIMITS_HPP_
#define APCERT_LOWER_LIMITS_HPP_

// Fundamental lower limits on any certificate eps(k, l) that is
// nondecreasing in l. For k >= 1 the limit is the root in (0, 1) of
//
//   sum_{j=0}^{l} z_j B_{N+M}(eps; k + j - 1) = beta,
//   z_j = C(N, k) C(M, j) / C(N + M, k + j) * k / (k + j),
//
// and for k = 0 it is zero.

#include <cmath>
#include <string>
#include <vector>

#include "apcert/beta_tail.hpp"
#include "apcert/bisection.hpp"
#include "apcert/errors.hpp"
#include "apcert/grid.hpp"
#include "apcert/posterior_bounds.hpp"

namespace apcert {

// ln z_j for j = 0..M.
inline std::vector<double> log_z_coefficients(int N, int M, int k) {
  if (k < 1) throw DomainError("z_coefficients: k must be at least 1");
  if (N < k || M < 0) throw DomainError("z_coefficients: need N >= k and M >= 0");
  std::vector<double> out(static_cast<std::size_t>(M) + 1);
  const double log_choose_Nk = log_binom_coeff(N, k);
  for (int j = 0; j <= M; ++j) {
    out[static_cast<std::size_t>(j)] = log_choose_Nk + log_binom_coeff(M, j) -
                                       log_binom_coeff(N + M, k + j) +
                                       std::log(static_cast<double>(k) / (k + j));
  }
  return out;
}

inline std::vector<double> z_coefficients(int N, int M, int k) {
  std::vector<double> out = log_z_coefficients(N, M, k);
  for (double& z : out) z = std::exp(z);
  return out;
}

struct LowerLimit {
  double value = 0.0;
  // sum_{j<=l} z_j < beta: the equation has no root and value is 0.
  bool degenerate = false;
};

// Solver for one row k of lower limits; reuses the z_j and the order N+M
// coefficient row across l.
class LowerLimitRow {
 public:
  LowerLimitRow(const CertificateProblem& problem, int k)
      : problem_(problem), k_(k), row_(problem.N() + problem.M()) {
    if (k < 0 || k > problem.zeta()) {
      throw DomainError("lower_limit: k=" + std::to_string(k) + " outside [0, zeta]");
    }
    if (k >= 1) log_z_ = log_z_coefficients(problem.N(), problem.M(), k);
  }

  // log of sum_{j=0}^{l} z_j B_{N+M}(eps; k + j - 1).
  double log_lhs(double eps, int l) const {
    std::vector<double> terms(static_cast<std::size_t>(l) + 1);
    for (int j = 0; j <= l; ++j) {
      terms[static_cast<std::size_t>(j)] =
          log_z_[static_cast<std::size_t>(j)] + log_binom_cdf(row_, k_ + j - 1, eps).value;
    }
    return log_sum_exp(terms);
  }

  LowerLimit solve(int l, double tol) const {
    if (l < 0 || l > problem_.M()) {
      throw DomainError("lower_limit: l=" + std::to_string(l) + " outside [0, M]");
    }
    if (!(tol > 0.0)) throw DomainError("lower_limit: tol must be positive");
    if (k_ == 0) return LowerLimit{0.0, false};
    const double target = problem_.beta().log();
    if (log_lhs(0.0, l) < target) return LowerLimit{0.0, true};
    const Bracket b =
        bisect([&](double eps) { return log_lhs(eps, l) > target; }, 0.0, 1.0, tol);
    return LowerLimit{b.midpoint(), false};
  }

 private:
  CertificateProblem problem_;
  int k_;
  LogBinomialRow row_;
  std::vector<double> log_z_;
};

inline LowerLimit lower_limit(int k, int l, const CertificateProblem& problem,
                              double tol = kDefaultTol) {
  return LowerLimitRow(problem, k).solve(l, tol);
}

struct LowerLimitTable {
  CertificateProblem problem;
  double tol;
  Grid<double> eps_lower;
  Grid<char> degenerate;
};

inline LowerLimitTable lower_limit_table(const CertificateProblem& problem,
                                         double tol = kDefaultTol, unsigned threads = 1) {
  const int rows = problem.zeta() + 1;
  const int cols = problem.M() + 1;
  LowerLimitTable out{problem, tol, Grid<double>(rows, cols), Grid<char>(rows, cols, 0)};
  parallel_for(static_cast<std::size_t>(rows), threads, [&](std::size_t row) {
    const int k = static_cast<int>(row);
    const LowerLimitRow solver(problem, k);
    for (int l = 0; l < cols; ++l) {
      const LowerLimit ll = solver.solve(l, tol);
      out.eps_lower(k, l) = ll.value;
      out.degenerate(k, l) = ll.degenerate ? 1 : 0;
    }
  });
  return out;
}

// Degenerate certificate that attains the lower limit at (k, l): the limit
// for j <= l in row k, one everywhere else.
inline Grid<double> attaining_table(const CertificateProblem& problem, int k, int l,
                                    double tol = kDefaultTol) {
  const LowerLimit ll = lower_limit(k, l, problem, tol);
  Grid<double> eps(problem.zeta() + 1, problem.M() + 1, 1.0);
  for (int j = 0; j <= l; ++j) eps(k, j) = ll.value;
  return eps;
}

}  // namespace apcert

#endif  // APCERT_LOWER_LIMITS_HPP_
