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

#ifndef APCERT_CLASSIC_BOUNDS_HPP_
#define APCERT_CLASSIC_BOUNDS_HPP_

// Certificates that predate the two-indexed bound: one-sided Chernoff and
// Clopper-Pearson bounds for validation tests, and the a priori scenario
// bound that depends only on the Helly dimension.

#include <cmath>
#include <string>

#include "apcert/beta_tail.hpp"
#include "apcert/bisection.hpp"
#include "apcert/errors.hpp"

namespace apcert {

// Tolerated probability of a wrong declaration, strictly inside (0, 1).
class ConfidenceLevel {
 public:
  explicit ConfidenceLevel(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
      throw DomainError("confidence level beta must lie in (0, 1), got " + std::to_string(beta));
    }
  }
  double value() const { return beta_; }
  double log() const { return std::log(beta_); }

 private:
  double beta_;
};

struct ChernoffBound {
  double value;
  // The bound exceeds one and carries no information; value is left raw.
  bool out_of_range;
};

// r/M + sqrt(ln(beta) / (-2M)).
inline ChernoffBound chernoff_bound(int M, int r, ConfidenceLevel beta) {
  if (M <= 0) throw DomainError("chernoff_bound: M must be positive");
  if (r < 0 || r > M) throw DomainError("chernoff_bound: r must lie in [0, M]");
  const double value = static_cast<double>(r) / M + std::sqrt(beta.log() / (-2.0 * M));
  return ChernoffBound{value, value > 1.0};
}

// Smallest eta with B_M(eta; l) <= beta; exactly 1 when l = M.
inline double clopper_pearson(int M, int l, ConfidenceLevel beta, double tol = kDefaultTol) {
  if (M <= 0) throw DomainError("clopper_pearson: M must be positive");
  if (l < 0 || l > M) throw DomainError("clopper_pearson: l must lie in [0, M]");
  if (!(tol > 0.0)) throw DomainError("clopper_pearson: tol must be positive");
  if (l == M) return 1.0;
  const LogBinomialRow row(M);
  const double target = beta.log();
  const Bracket b =
      bisect([&](double eta) { return log_binom_cdf(row, l, eta).value > target; }, 0.0, 1.0, tol);
  return b.midpoint();
}

// Root of B_N(eps; zeta - 1) = beta: the violation level certified for any
// convex scenario program whose Helly dimension is at most zeta.
inline double apriori_epsilon(int N, int zeta, ConfidenceLevel beta, double tol = kDefaultTol) {
  if (N <= 0) throw DomainError("apriori_epsilon: N must be positive");
  if (zeta < 1) throw DomainError("apriori_epsilon: zeta must be positive");
  if (zeta >= N) {
    throw DomainError("apriori_epsilon: zeta=" + std::to_string(zeta) +
                      " must be below N=" + std::to_string(N) + " for a nonvacuous bound");
  }
  if (!(tol > 0.0)) throw DomainError("apriori_epsilon: tol must be positive");
  const LogBinomialRow row(N);
  const double target = beta.log();
  const Bracket b = bisect(
      [&](double eps) { return log_binom_cdf(row, zeta - 1, eps).value > target; }, 0.0, 1.0, tol);
  return b.midpoint();
}

}  // namespace apcert

#endif  // APCERT_CLASSIC_BOUNDS_HPP_
