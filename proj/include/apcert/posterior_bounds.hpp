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

#ifndef APCERT_POSTERIOR_BOUNDS_HPP_
#define APCERT_POSTERIOR_BOUNDS_HPP_

// Two-indexed a posteriori bounds eps(k, l) on the violation probability of
// a scenario solution, given k support constraints among N design samples
// and l violations among M validation samples.
//
// For a coefficient vector {a_m} the bound is eps(k, l) = 1 - t(k, l), where
// t(k, l) is the unique root in (0, 1) of
//
//   h(t; k, l) = beta * sum_{m=k}^{N} a_m C(m, k) t^(m-k)
//                - C(N, k) t^(N-k) B_M(1 - t; l).
//
// Both terms are positive on (0, 1), so the sign of h is decided by
// comparing their logarithms; nothing is ever exponentiated at full scale.

#include <cmath>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apcert/beta_tail.hpp"
#include "apcert/bisection.hpp"
#include "apcert/classic_bounds.hpp"
#include "apcert/errors.hpp"
#include "apcert/grid.hpp"

namespace apcert {

// Design sample count N, validation sample count M, Helly dimension bound
// zeta and confidence beta.
class CertificateProblem {
 public:
  CertificateProblem(int N, int M, int zeta, double beta) : N_(N), M_(M), zeta_(zeta), beta_(beta) {
    if (N < 1) throw DomainError("CertificateProblem: N must be positive");
    if (M < 0) throw DomainError("CertificateProblem: M must be nonnegative");
    if (zeta < 1) throw DomainError("CertificateProblem: zeta must be positive");
    if (zeta >= N) {
      throw DomainError("CertificateProblem: zeta=" + std::to_string(zeta) +
                        " must be below N=" + std::to_string(N));
    }
  }

  int N() const { return N_; }
  int M() const { return M_; }
  int zeta() const { return zeta_; }
  ConfidenceLevel beta() const { return beta_; }

  CertificateProblem with_validation(int M) const {
    return CertificateProblem(N_, M, zeta_, beta_.value());
  }

  friend bool operator==(const CertificateProblem& a, const CertificateProblem& b) {
    return a.N_ == b.N_ && a.M_ == b.M_ && a.zeta_ == b.zeta_ && a.beta_.value() == b.beta_.value();
  }

 private:
  int N_;
  int M_;
  int zeta_;
  ConfidenceLevel beta_;
};

// Weights a_0..a_N of the certificate polynomial: nonnegative, summing to
// one, with positive mass on m in [zeta, N - 1].
class CoefficientVector {
 public:
  static constexpr double kRenormalizeWindow = 1e-9;

  static CoefficientVector uniform(int N) {
    if (N < 1) throw DomainError("CoefficientVector: N must be positive");
    return CoefficientVector(std::vector<double>(static_cast<std::size_t>(N) + 1, 1.0 / (N + 1)),
                             "uniform");
  }

  // Validates user-supplied weights against zeta. Sums within
  // kRenormalizeWindow of one are rescaled to one; others are rejected.
  static CoefficientVector from_values(std::vector<double> values, int zeta,
                                       std::string scheme = "custom") {
    if (values.size() < 2) throw DomainError("CoefficientVector: need at least N + 1 = 2 weights");
    const int N = static_cast<int>(values.size()) - 1;
    if (zeta < 0 || zeta >= N) {
      throw DomainError("CoefficientVector: zeta=" + std::to_string(zeta) +
                        " incompatible with N=" + std::to_string(N));
    }
    KahanSum total;
    for (std::size_t m = 0; m < values.size(); ++m) {
      if (!std::isfinite(values[m]) || values[m] < 0.0) {
        throw DomainError("CoefficientVector: a_" + std::to_string(m) + " must be finite and >= 0");
      }
      total.add(values[m]);
    }
    const double sum = static_cast<double>(total.value());
    if (std::abs(sum - 1.0) > kRenormalizeWindow) {
      throw DomainError("CoefficientVector: weights sum to " + std::to_string(sum) + ", not 1");
    }
    for (double& v : values) v /= sum;
    CoefficientVector out(std::move(values), std::move(scheme));
    out.check_support(zeta);
    return out;
  }

  int N() const { return static_cast<int>(values_.size()) - 1; }
  double operator[](int m) const { return values_[static_cast<std::size_t>(m)]; }
  std::span<const double> values() const { return values_; }
  const std::string& scheme() const { return scheme_; }

  // Throws unless sum_{m=zeta}^{N-1} a_m > 0.
  void check_support(int zeta) const {
    double mass = 0.0;
    for (int m = zeta; m < N(); ++m) mass += (*this)[m];
    if (!(mass > 0.0)) {
      throw DomainError("CoefficientVector: no weight on m in [zeta, N-1] (zeta=" +
                        std::to_string(zeta) + ")");
    }
  }

  void check_compatible(const CertificateProblem& problem) const {
    if (N() != problem.N()) {
      throw DomainError("CoefficientVector: has N=" + std::to_string(N()) +
                        " but problem has N=" + std::to_string(problem.N()));
    }
    check_support(problem.zeta());
  }

 private:
  CoefficientVector(std::vector<double> values, std::string scheme)
      : values_(std::move(values)), scheme_(std::move(scheme)) {}

  std::vector<double> values_;
  std::string scheme_;
};

// Evaluates log(beta * sum a_m C(m,k) t^(m-k)) - log(C(N,k) t^(N-k) B_M(1-t; l))
// for one fixed k. Construction is O(N); each evaluation is O(N + l).
class RootFunction {
 public:
  RootFunction(const CertificateProblem& problem, const CoefficientVector& coeffs, int k,
               std::shared_ptr<const LogBinomialRow> validation_row = nullptr)
      : N_(problem.N()), M_(problem.M()), k_(k), log_beta_(problem.beta().log()),
        validation_row_(validation_row ? std::move(validation_row)
                                       : std::make_shared<const LogBinomialRow>(problem.M())) {
    if (k < 0 || k > problem.zeta()) {
      throw DomainError("k=" + std::to_string(k) + " outside [0, zeta]");
    }
    coeffs.check_compatible(problem);
    // ln C(m, k) for m = k..N by C(m+1, k) = C(m, k) (m+1) / (m+1-k).
    long double log_choose = 0.0L;
    for (int m = k; m <= N_; ++m) {
      if (m > k) {
        log_choose += std::log(static_cast<long double>(m) / static_cast<long double>(m - k));
      }
      if (coeffs[m] > 0.0) {
        powers_.push_back(m - k);
        log_weights_.push_back(std::log(coeffs[m]) + static_cast<double>(log_choose));
      }
    }
    log_choose_Nk_ = static_cast<double>(log_choose);
  }

  int k() const { return k_; }

  // Log ratio of the positive part of h to its negative part at t.
  // +inf as t -> 0+.
  double log_ratio(double t, int l) const {
    if (l < 0 || l > M_) throw DomainError("l=" + std::to_string(l) + " outside [0, M]");
    if (!(t > 0.0)) return std::numeric_limits<double>::infinity();
    if (t >= 1.0) return log_beta_ + lse(0.0) - log_choose_Nk_;
    const double log_t = std::log(t);
    const double lhs = log_beta_ + lse(log_t);
    double log_tail = 0.0;
    if (l < M_) log_tail = detail::log_binom_cdf_split(*validation_row_, l, std::log1p(-t), log_t);
    const double rhs = log_choose_Nk_ + (N_ - k_) * log_t + log_tail;
    if (rhs == kNegInf) return std::numeric_limits<double>::infinity();
    return lhs - rhs;
  }

  int sign(double t, int l) const {
    const double r = log_ratio(t, l);
    return r > 0.0 ? 1 : (r < 0.0 ? -1 : 0);
  }

  // Bisection on [warm_lower, 1] keeping h >= 0 at
  // the lower end.
  Bracket solve(int l, double warm_lower, double tol) const {
    if (!(tol > 0.0)) throw DomainError("solve_root: tol must be positive");
    if (!(warm_lower >= 0.0 && warm_lower < 1.0)) {
      throw DomainError("solve_root: warm_lower must lie in [0, 1)");
    }
    if (sign(warm_lower, l) < 0) {
      throw RootError("solve_root: h is negative at the lower bracket", k_, l, warm_lower, 1.0);
    }
    if (sign(1.0, l) >= 0) {
      throw RootError("solve_root: h is nonnegative at t = 1", k_, l, warm_lower, 1.0);
    }
    return bisect([&](double t) { return sign(t, l) >= 0; }, warm_lower, 1.0, tol);
  }

 private:
  // log sum_m exp(log_weights_[m] + powers_[m] * log_t)
  double lse(double log_t) const {
    double peak = kNegInf;
    for (std::size_t i = 0; i < powers_.size(); ++i) {
      peak = std::max(peak, log_weights_[i] + (powers_[i] == 0 ? 0.0 : powers_[i] * log_t));
    }
    if (peak == kNegInf) return kNegInf;
    KahanSum acc;
    for (std::size_t i = 0; i < powers_.size(); ++i) {
      acc.add(std::exp(log_weights_[i] + (powers_[i] == 0 ? 0.0 : powers_[i] * log_t) - peak));
    }
    return peak + static_cast<double>(std::log(acc.value()));
  }

  int N_;
  int M_;
  int k_;
  double log_beta_;
  double log_choose_Nk_ = 0.0;
  std::shared_ptr<const LogBinomialRow> validation_row_;
  std::vector<int> powers_;
  std::vector<double> log_weights_;
};

// Sign of h(t; k, l): +1, -1 or 0.
inline int h_sign(double t, int k, int l, const CertificateProblem& problem,
                  const CoefficientVector& coeffs) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("h_sign: t must lie strictly inside (0, 1)");
  return RootFunction(problem, coeffs, k).sign(t, l);
}

// Root t(k, l) of h to within tol, searching [warm_lower, 1].
inline double solve_root(int k, int l, const CertificateProblem& problem,
                         const CoefficientVector& coeffs, double warm_lower = 0.0,
                         double tol = kDefaultTol) {
  return RootFunction(problem, coeffs, k).solve(l, warm_lower, tol).midpoint();
}

// Grid of roots t(k, l) and bounds eps(k, l) = 1 - t(k, l) for k in
// [0, zeta], l in [0, M].
class BoundTable {
 public:
  BoundTable(CertificateProblem problem, CoefficientVector coeffs, double tol, Grid<double> t,
             Grid<double> t_lower)
      : problem_(std::move(problem)), coeffs_(std::move(coeffs)), tol_(tol), t_(std::move(t)),
        t_lower_(std::move(t_lower)) {}

  const CertificateProblem& problem() const { return problem_; }
  const CoefficientVector& coefficients() const { return coeffs_; }
  double tol() const { return tol_; }

  int rows() const { return t_.rows(); }
  int cols() const { return t_.cols(); }

  double t(int k, int l) const { return t_(k, l); }
  double eps(int k, int l) const { return 1.0 - t_(k, l); }
  // Lower end of the final bisection bracket; h(t_lower) >= 0 was observed.
  double t_lower(int k, int l) const { return t_lower_(k, l); }

  const Grid<double>& t_grid() const { return t_; }
  Grid<double> eps_grid() const {
    Grid<double> out(rows(), cols());
    for (int k = 0; k < rows(); ++k) {
      for (int l = 0; l < cols(); ++l) out(k, l) = eps(k, l);
    }
    return out;
  }

 private:
  CertificateProblem problem_;
  CoefficientVector coeffs_;
  double tol_;
  Grid<double> t_;
  Grid<double> t_lower_;
};

// Full grid. Rows k are independent and run on up to `threads` workers
// (0 = all hardware threads); within a row l descends from M with the
// previous lower bracket as warm start.
inline BoundTable bound_table(const CertificateProblem& problem, const CoefficientVector& coeffs,
                              double tol = kDefaultTol, unsigned threads = 1) {
  coeffs.check_compatible(problem);
  const int rows = problem.zeta() + 1;
  const int cols = problem.M() + 1;
  Grid<double> t(rows, cols);
  Grid<double> t_lower(rows, cols);
  auto validation_row = std::make_shared<const LogBinomialRow>(problem.M());
  parallel_for(static_cast<std::size_t>(rows), threads, [&](std::size_t row) {
    const int k = static_cast<int>(row);
    const RootFunction h(problem, coeffs, k, validation_row);
    double warm = 0.0;
    for (int l = problem.M(); l >= 0; --l) {
      const Bracket b = h.solve(l, warm, tol);
      t(k, l) = b.midpoint();
      t_lower(k, l) = b.lower;
      warm = b.lower;
    }
  });
  return BoundTable(problem, coeffs, tol, std::move(t), std::move(t_lower));
}

// Bounds that use the support count only: the M = 0 table, one value per k.
inline std::vector<double> wait_and_judge(const CertificateProblem& problem,
                                          const CoefficientVector& coeffs,
                                          double tol = kDefaultTol, unsigned threads = 1) {
  const BoundTable table = bound_table(problem.with_validation(0), coeffs, tol, threads);
  std::vector<double> out(static_cast<std::size_t>(table.rows()));
  for (int k = 0; k < table.rows(); ++k) out[static_cast<std::size_t>(k)] = table.eps(k, 0);
  return out;
}

}  // namespace apcert

#endif  // APCERT_POSTERIOR_BOUNDS_HPP_
