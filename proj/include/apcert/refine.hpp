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

#ifndef APCERT_REFINE_HPP_
#define APCERT_REFINE_HPP_

// Pareto refinement of the coefficient vector. Given the roots t(k, l) of
// the current table, any a' with
//
//   beta * sum_{m>=k} a'_m C(m, k) t(k,l)^(m-N) >= C(N, k) B_M(1 - t(k,l); l)
//
// at every cell has roots t'(k, l) >= t(k, l). An LP over a' that keeps all
// of these rows and pushes their left-hand sides up is solved repeatedly
// until the roots stop moving.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "apcert/beta_tail.hpp"
#include "apcert/errors.hpp"
#include "apcert/grid.hpp"
#include "apcert/posterior_bounds.hpp"
#include "apcert/simplex.hpp"

namespace apcert {

inline constexpr double kDefaultTau = 1e-9;
inline constexpr double kDefaultConvergeTol = 1e-9;
inline constexpr int kDefaultMaxIter = 50;
inline constexpr int kRefineWarnN = 500;
inline constexpr int kRefineMaxN = 5000;

struct DominanceReport {
  Grid<char> holds;
  bool all = false;
};

// Checks, cell by cell, whether `candidate` would move every root of
// `table` up. Cells are tested at the certified lower bracket t_lower(k, l).
inline DominanceReport dominance_check(const CoefficientVector& candidate, const BoundTable& table) {
  const CertificateProblem& problem = table.problem();
  candidate.check_compatible(problem);
  DominanceReport report{Grid<char>(table.rows(), table.cols(), 0), true};
  auto validation_row = std::make_shared<const LogBinomialRow>(problem.M());
  for (int k = 0; k < table.rows(); ++k) {
    const RootFunction h(problem, candidate, k, validation_row);
    for (int l = 0; l < table.cols(); ++l) {
      const bool ok = h.log_ratio(table.t_lower(k, l), l) >= 0.0;
      report.holds(k, l) = ok ? 1 : 0;
      report.all = report.all && ok;
    }
  }
  return report;
}

// One LP over a'_0..a'_N: a row per cell (scaled so its largest
// coefficient is 1), sum_{m=zeta}^{N-1} a'_m >= tau and sum a'_m = 1.
inline LinearProgram build_refinement_lp(const BoundTable& table, double tau = kDefaultTau) {
  if (!(tau > 0.0)) throw DomainError("build_refinement_lp: tau must be positive");
  const CertificateProblem& problem = table.problem();
  const int N = problem.N();
  const int M = problem.M();
  const double log_beta = problem.beta().log();
  const LogBinomialRow validation_row(M);

  // ln C(m, k) for all m, k <= zeta.
  Grid<double> log_choose(N + 1, problem.zeta() + 1, kNegInf);
  for (int m = 0; m <= N; ++m) {
    const LogBinomialRow row(m);
    for (int k = 0; k <= std::min(m, problem.zeta()); ++k) log_choose(m, k) = row[k];
  }

  LinearProgram lp;
  lp.objective.assign(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<std::vector<double>> objective_terms(static_cast<std::size_t>(N) + 1);

  for (int k = 0; k <= problem.zeta(); ++k) {
    for (int l = 0; l <= M; ++l) {
      const double t = table.t_lower(k, l);
      const double log_t = std::log(t);
      std::vector<double> log_coeffs(static_cast<std::size_t>(N) + 1, kNegInf);
      double peak = kNegInf;
      for (int m = k; m <= N; ++m) {
        const double base = log_choose(m, k) + (m - N) * log_t;
        objective_terms[static_cast<std::size_t>(m)].push_back(base);
        log_coeffs[static_cast<std::size_t>(m)] = log_beta + base;
        peak = std::max(peak, log_coeffs[static_cast<std::size_t>(m)]);
      }
      const double log_tail =
          l == M ? 0.0 : log_binom_cdf(validation_row, l, 1.0 - t).value;
      const double log_rhs = log_choose(N, k) + log_tail;

      LinearConstraint row;
      row.sense = Sense::kGreaterEqual;
      row.coeffs.assign(static_cast<std::size_t>(N) + 1, 0.0);
      for (int m = k; m <= N; ++m) {
        row.coeffs[static_cast<std::size_t>(m)] = std::exp(log_coeffs[static_cast<std::size_t>(m)] - peak);
      }
      row.rhs = std::exp(log_rhs - peak);
      bool finite = std::isfinite(peak) && std::isfinite(row.rhs);
      for (double a : row.coeffs) finite = finite && std::isfinite(a);
      if (!finite) {
        throw LpError("build_refinement_lp: non-finite row at (k=" + std::to_string(k) +
                      ", l=" + std::to_string(l) + ")");
      }
      lp.rows.push_back(std::move(row));
    }
  }

  // Objective sum_{k,l} C(m, k) t(k,l)^(m-N) per variable, rescaled to a
  // unit maximum.
  std::vector<double> log_objective(static_cast<std::size_t>(N) + 1);
  double peak = kNegInf;
  for (int m = 0; m <= N; ++m) {
    log_objective[static_cast<std::size_t>(m)] = log_sum_exp(objective_terms[static_cast<std::size_t>(m)]);
    peak = std::max(peak, log_objective[static_cast<std::size_t>(m)]);
  }
  if (!std::isfinite(peak)) throw LpError("build_refinement_lp: non-finite objective");
  for (int m = 0; m <= N; ++m) {
    lp.objective[static_cast<std::size_t>(m)] = std::exp(log_objective[static_cast<std::size_t>(m)] - peak);
  }

  LinearConstraint support;
  support.sense = Sense::kGreaterEqual;
  support.coeffs.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (int m = problem.zeta(); m < N; ++m) support.coeffs[static_cast<std::size_t>(m)] = 1.0;
  support.rhs = tau;
  lp.rows.push_back(std::move(support));

  LinearConstraint simplex;
  simplex.sense = Sense::kEqual;
  simplex.coeffs.assign(static_cast<std::size_t>(N) + 1, 1.0);
  simplex.rhs = 1.0;
  lp.rows.push_back(std::move(simplex));
  return lp;
}

struct RefineOptions {
  double tol_root = kDefaultTol;
  double tol_converge = kDefaultConvergeTol;
  int max_iter = kDefaultMaxIter;
  double tau = kDefaultTau;
  unsigned threads = 1;
};

enum class Termination { kConverged, kMaxIter, kLpFailure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kMaxIter: return "max_iter";
    case Termination::kLpFailure: return "lp_failure";
  }
  return "unknown";
}

struct RefinementIterate {
  CoefficientVector coefficients;
  BoundTable table;
  // max over cells of t - t_previous; NaN for the initial iterate.
  double max_t_increase;
};

struct RefinementTrace {
  std::vector<RefinementIterate> iterates;
  Termination termination = Termination::kMaxIter;
  std::string failure;
  std::vector<std::string> warnings;

  const RefinementIterate& final() const { return iterates.back(); }
  int lp_solves() const { return static_cast<int>(iterates.size()) - 1; }
};

inline double max_t_increase(const BoundTable& before, const BoundTable& after) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < before.rows(); ++k) {
    for (int l = 0; l < before.cols(); ++l) worst = std::max(worst, after.t(k, l) - before.t(k, l));
  }
  return worst;
}

// Solves the LP built from `table` and returns the refined coefficients.
inline CoefficientVector refine_coefficients(const BoundTable& table, double tau = kDefaultTau) {
  const LpSolution sol = lp_solve(build_refinement_lp(table, tau));
  std::vector<double> a = sol.x;
  for (double& v : a) v = std::max(0.0, v);
  return CoefficientVector::from_values(std::move(a), table.problem().zeta(), "refined");
}

// Alternates table construction and LP refinement.
inline RefinementTrace refine(const CertificateProblem& problem, const CoefficientVector& initial,
                              const RefineOptions& options = {}) {
  if (problem.N() > kRefineMaxN) {
    throw DomainError("refine: N=" + std::to_string(problem.N()) + " exceeds " +
                      std::to_string(kRefineMaxN) + "; LP rows are too ill-conditioned");
  }
  if (options.max_iter < 0) throw DomainError("refine: max_iter must be nonnegative");
  RefinementTrace trace;
  if (problem.N() > kRefineWarnN) {
    trace.warnings.push_back("N=" + std::to_string(problem.N()) + " above " +
                             std::to_string(kRefineWarnN) +
                             ": refinement rows may be poorly conditioned");
  }
  trace.iterates.push_back(RefinementIterate{
      initial, bound_table(problem, initial, options.tol_root, options.threads),
      std::numeric_limits<double>::quiet_NaN()});

  for (int ite = 0; ite < options.max_iter; ++ite) {
    const BoundTable& current = trace.iterates.back().table;
    CoefficientVector next = initial;
    try {
      next = refine_coefficients(current, options.tau);
    } catch (const LpError& e) {
      trace.termination = Termination::kLpFailure;
      trace.failure = e.what();
      return trace;
    } catch (const DomainError& e) {
      trace.termination = Termination::kLpFailure;
      trace.failure = e.what();
      return trace;
    }
    BoundTable table = bound_table(problem, next, options.tol_root, options.threads);
    const double increase = max_t_increase(current, table);
    trace.iterates.push_back(RefinementIterate{std::move(next), std::move(table), increase});
    if (increase < options.tol_converge) {
      trace.termination = Termination::kConverged;
      return trace;
    }
  }
  trace.termination = Termination::kMaxIter;
  return trace;
}

}  // namespace apcert

#endif  // APCERT_REFINE_HPP_
