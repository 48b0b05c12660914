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

#ifndef APCERT_SCENARIO_LAB_HPP_
#define APCERT_SCENARIO_LAB_HPP_

// Scenario programs with closed-form solutions, exact support sets and exact
// violation probabilities under the uniform distribution on [0, 1]^d, plus a
// Monte Carlo harness that audits certificates against them.
//
//   scalar_max:    min x  s.t. x >= delta_i            (zeta = 1)
//   bounding_box:  min sum_j (hi_j - lo_j)
//                  s.t. lo <= delta_i <= hi           (zeta = 2d)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "apcert/classic_bounds.hpp"
#include "apcert/errors.hpp"
#include "apcert/grid.hpp"
#include "apcert/posterior_bounds.hpp"

namespace apcert {

enum class ScenarioKind { kScalarMax, kBoundingBox };

inline const char* to_string(ScenarioKind kind) {
  return kind == ScenarioKind::kScalarMax ? "scalar_max" : "bounding_box";
}

class ToyScenarioProblem {
 public:
  static ToyScenarioProblem scalar_max() { return ToyScenarioProblem(ScenarioKind::kScalarMax, 1); }
  static ToyScenarioProblem bounding_box(int dim) {
    if (dim < 1) throw DomainError("bounding_box: dimension must be positive");
    return ToyScenarioProblem(ScenarioKind::kBoundingBox, dim);
  }

  ScenarioKind kind() const { return kind_; }
  int dim() const { return dim_; }
  // Exact Helly bound: the most support constraints any instance can have.
  int zeta() const { return kind_ == ScenarioKind::kScalarMax ? 1 : 2 * dim_; }

 private:
  ToyScenarioProblem(ScenarioKind kind, int dim) : kind_(kind), dim_(dim) {}

  ScenarioKind kind_;
  int dim_;
};

// count points in [0, 1]^dim, row-major.
class SamplePoints {
 public:
  SamplePoints(int dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim < 1 || coords_.size() % static_cast<std::size_t>(dim) != 0) {
      throw DomainError("SamplePoints: coordinate count is not a multiple of dim");
    }
  }

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(coords_.size() / static_cast<std::size_t>(dim_)); }
  double operator()(int i, int j) const {
    return coords_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(j)];
  }
  std::span<const double> point(int i) const {
    return std::span<const double>(coords_).subspan(static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_));
  }

  SamplePoints without(int index) const {
    std::vector<double> rest;
    rest.reserve(coords_.size());
    for (int i = 0; i < size(); ++i) {
      if (i == index) continue;
      const auto p = point(i);
      rest.insert(rest.end(), p.begin(), p.end());
    }
    return SamplePoints(dim_, std::move(rest));
  }

 private:
  int dim_;
  std::vector<double> coords_;
};

struct ScenarioSolution {
  ScenarioKind kind = ScenarioKind::kScalarMax;
  // scalar_max: upper = {x*}, lower = {0}. bounding_box: the box corners.
  std::vector<double> lower;
  std::vector<double> upper;
  // Sorted, distinct sample indices attaining a coordinate extremum.
  std::vector<int> support_set;
  // Some extremum was attained by more than one sample.
  bool tie = false;

  int support_count() const { return static_cast<int>(support_set.size()); }
  bool same_decision(const ScenarioSolution& o) const { return lower == o.lower && upper == o.upper; }
};

inline ScenarioSolution solve_scenario(const ToyScenarioProblem& problem, const SamplePoints& samples) {
  if (samples.size() < 1) throw DomainError("solve_scenario: need at least one sample");
  if (samples.dim() != problem.dim()) throw DomainError("solve_scenario: sample dimension mismatch");
  ScenarioSolution sol;
  sol.kind = problem.kind();
  const int n = samples.size();
  const int d = problem.dim();
  std::vector<int> extremal;

  auto scan = [&](int j, bool maximize) {
    int best = 0;
    int ties = 0;
    for (int i = 1; i < n; ++i) {
      const double v = samples(i, j);
      const double b = samples(best, j);
      if (maximize ? v > b : v < b) {
        best = i;
        ties = 0;
      } else if (v == b) {
        ++ties;
      }
    }
    if (ties > 0) sol.tie = true;
    extremal.push_back(best);
    return samples(best, j);
  };

  if (problem.kind() == ScenarioKind::kScalarMax) {
    sol.lower = {0.0};
    sol.upper = {scan(0, true)};
  } else {
    sol.lower.resize(static_cast<std::size_t>(d));
    sol.upper.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      sol.lower[static_cast<std::size_t>(j)] = scan(j, false);
      sol.upper[static_cast<std::size_t>(j)] = scan(j, true);
    }
  }
  std::sort(extremal.begin(), extremal.end());
  extremal.erase(std::unique(extremal.begin(), extremal.end()), extremal.end());
  sol.support_set = std::move(extremal);
  return sol;
}

// Probability that a fresh uniform sample falls outside the feasible set.
inline double violation_probability(const ToyScenarioProblem& problem, const ScenarioSolution& sol) {
  if (problem.kind() == ScenarioKind::kScalarMax) return 1.0 - sol.upper[0];
  double volume = 1.0;
  for (std::size_t j = 0; j < sol.upper.size(); ++j) volume *= sol.upper[j] - sol.lower[j];
  return std::clamp(1.0 - volume, 0.0, 1.0);
}

inline bool violates(const ScenarioSolution& sol, std::span<const double> point) {
  if (sol.kind == ScenarioKind::kScalarMax) return point[0] > sol.upper[0];
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (point[j] < sol.lower[j] || point[j] > sol.upper[j]) return true;
  }
  return false;
}

inline int count_validation_violations(const ToyScenarioProblem& problem, const ScenarioSolution& sol,
                                       const SamplePoints& validation) {
  if (validation.size() > 0 && validation.dim() != problem.dim()) {
    throw DomainError("count_validation_violations: sample dimension mismatch");
  }
  int r = 0;
  for (int i = 0; i < validation.size(); ++i) r += violates(sol, validation.point(i)) ? 1 : 0;
  return r;
}

// Seed for run `stream` of a simulation keyed by `master`: a SplitMix64
// finalizer over a Weyl sequence, so streams never share state.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform doubles in [0, 1) from the top 53 bits of a 64-bit Mersenne
// Twister; identical on every platform for a given seed.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  SamplePoints draw(int count, int dim) {
    std::vector<double> coords(static_cast<std::size_t>(count) * static_cast<std::size_t>(dim));
    for (double& c : coords) c = next();
    return SamplePoints(dim, std::move(coords));
  }

 private:
  std::mt19937_64 engine_;
};

// Outcome of one replication before any bound is attached.
struct TrialDraw {
  std::uint64_t seed = 0;
  int s = 0;
  int r = 0;
  double v_true = 0.0;
  bool tie = false;
};

inline TrialDraw draw_trial(const ToyScenarioProblem& problem, int N, int M, std::uint64_t master_seed,
                            std::uint64_t run) {
  TrialDraw out;
  out.seed = stream_seed(master_seed, run);
  UniformStream rng(out.seed);
  const SamplePoints design = rng.draw(N, problem.dim());
  const SamplePoints validation = rng.draw(M, problem.dim());
  const ScenarioSolution sol = solve_scenario(problem, design);
  out.s = sol.support_count();
  out.r = count_validation_violations(problem, sol, validation);
  out.v_true = violation_probability(problem, sol);
  out.tie = sol.tie;
  return out;
}

enum class BoundKind { kEpsSR, kEpsS, kEta, kChernoff };
inline constexpr BoundKind kAllBounds[] = {BoundKind::kEpsSR, BoundKind::kEpsS, BoundKind::kEta,
                                           BoundKind::kChernoff};

inline const char* to_string(BoundKind b) {
  switch (b) {
    case BoundKind::kEpsSR: return "eps_sr";
    case BoundKind::kEpsS: return "eps_s";
    case BoundKind::kEta: return "eta";
    case BoundKind::kChernoff: return "chernoff";
  }
  return "unknown";
}

struct TrialRecord {
  int run = 0;
  std::uint64_t seed = 0;
  int s = 0;
  int r = 0;
  double v_true = 0.0;
  double eps_sr = 0.0;
  double eps_s = 0.0;
  double eta = 0.0;       // NaN when M = 0
  double chernoff = 0.0;  // NaN when M = 0; may exceed 1
  bool chernoff_out_of_range = false;
  bool tie = false;

  double bound(BoundKind b) const {
    switch (b) {
      case BoundKind::kEpsSR: return eps_sr;
      case BoundKind::kEpsS: return eps_s;
      case BoundKind::kEta: return eta;
      case BoundKind::kChernoff: return chernoff;
    }
    return std::nan("");
  }
  double gap(BoundKind b) const { return bound(b) - v_true; }
};

struct BoundSummary {
  double mean_gap = 0.0;
  double std_gap = 0.0;
  // Fraction of runs with v_true above the bound.
  double empirical_confidence = 0.0;
  int violations = 0;
  int samples = 0;
};

struct OccurrenceRow {
  int s = 0;
  int count = 0;
  double mean_r_over_m = 0.0;  // NaN when M = 0
};

struct GapStatistics {
  int runs = 0;
  int ties = 0;
  std::map<BoundKind, BoundSummary> bounds;
  std::vector<OccurrenceRow> occurrence;
};

struct MonteCarloConfig {
  ToyScenarioProblem problem = ToyScenarioProblem::scalar_max();
  int N = 100;
  int M = 100;
  double beta = 1e-6;
  int runs = 2000;
  std::optional<CoefficientVector> coefficients;  // uniform when empty
  std::uint64_t master_seed = 0;
  double tol = kDefaultTol;
  unsigned threads = 1;
};

struct MonteCarloResult {
  GapStatistics stats;
  std::vector<TrialRecord> trials;
};

inline GapStatistics summarize(std::span<const TrialRecord> trials, int M) {
  GapStatistics stats;
  stats.runs = static_cast<int>(trials.size());
  for (const auto& t : trials) stats.ties += t.tie ? 1 : 0;
  for (BoundKind b : kAllBounds) {
    BoundSummary sum;
    KahanSum total;
    for (const auto& t : trials) {
      if (std::isnan(t.bound(b))) continue;
      ++sum.samples;
      total.add(t.gap(b));
      if (t.v_true > t.bound(b)) ++sum.violations;
    }
    if (sum.samples == 0) continue;
    sum.mean_gap = static_cast<double>(total.value()) / sum.samples;
    KahanSum sq;
    for (const auto& t : trials) {
      if (std::isnan(t.bound(b))) continue;
      const double dev = t.gap(b) - sum.mean_gap;
      sq.add(dev * dev);
    }
    sum.std_gap = sum.samples > 1 ? std::sqrt(static_cast<double>(sq.value()) / (sum.samples - 1)) : 0.0;
    sum.empirical_confidence = static_cast<double>(sum.violations) / sum.samples;
    stats.bounds[b] = sum;
  }
  std::map<int, std::pair<int, long>> by_s;
  for (const auto& t : trials) {
    auto& cell = by_s[t.s];
    ++cell.first;
    cell.second += t.r;
  }
  for (const auto& [s, cell] : by_s) {
    OccurrenceRow row{s, cell.first, std::nan("")};
    if (M > 0) row.mean_r_over_m = static_cast<double>(cell.second) / cell.first / M;
    stats.occurrence.push_back(row);
  }
  return stats;
}

// Replicates design + validation on fresh samples `runs` times. All bounds
// come from tables computed once up front; runs are independent and the
// output is ordered by run index regardless of thread count.
inline MonteCarloResult run_monte_carlo(const MonteCarloConfig& config) {
  if (config.runs < 1) throw DomainError("run_monte_carlo: runs must be positive");
  const CertificateProblem cert(config.N, config.M, config.problem.zeta(), config.beta);
  const CoefficientVector coeffs =
      config.coefficients ? *config.coefficients : CoefficientVector::uniform(config.N);
  const BoundTable table = bound_table(cert, coeffs, config.tol, config.threads);
  const std::vector<double> eps_s = wait_and_judge(cert, coeffs, config.tol, config.threads);
  std::vector<double> eta(static_cast<std::size_t>(config.M) + 1, std::nan(""));
  std::vector<ChernoffBound> chernoff(static_cast<std::size_t>(config.M) + 1, ChernoffBound{std::nan(""), false});
  if (config.M > 0) {
    for (int r = 0; r <= config.M; ++r) {
      eta[static_cast<std::size_t>(r)] = clopper_pearson(config.M, r, cert.beta(), config.tol);
      chernoff[static_cast<std::size_t>(r)] = chernoff_bound(config.M, r, cert.beta());
    }
  }

  MonteCarloResult out;
  out.trials.resize(static_cast<std::size_t>(config.runs));
  parallel_for(out.trials.size(), config.threads, [&](std::size_t run) {
    const TrialDraw draw = draw_trial(config.problem, config.N, config.M, config.master_seed, run);
    TrialRecord& rec = out.trials[run];
    rec.run = static_cast<int>(run);
    rec.seed = draw.seed;
    rec.s = draw.s;
    rec.r = draw.r;
    rec.v_true = draw.v_true;
    rec.tie = draw.tie;
    rec.eps_sr = table.eps(draw.s, draw.r);
    rec.eps_s = eps_s[static_cast<std::size_t>(draw.s)];
    rec.eta = eta[static_cast<std::size_t>(draw.r)];
    rec.chernoff = chernoff[static_cast<std::size_t>(draw.r)].value;
    rec.chernoff_out_of_range = chernoff[static_cast<std::size_t>(draw.r)].out_of_range;
  });
  out.stats = summarize(out.trials, config.M);
  return out;
}

// Frequency of {v_true > eps(s, r)} for an arbitrary certificate grid.
struct AuditResult {
  int runs = 0;
  int violations = 0;
  double rate() const { return runs == 0 ? 0.0 : static_cast<double>(violations) / runs; }
};

inline AuditResult audit_certificate(const ToyScenarioProblem& problem, int N, int M, const Grid<double>& eps,
                                     int runs, std::uint64_t master_seed, unsigned threads = 1) {
  if (eps.rows() != problem.zeta() + 1 || eps.cols() != M + 1) {
    throw DomainError("audit_certificate: grid shape must be (zeta+1) x (M+1)");
  }
  std::vector<char> hit(static_cast<std::size_t>(runs), 0);
  parallel_for(hit.size(), threads, [&](std::size_t run) {
    const TrialDraw d = draw_trial(problem, N, M, master_seed, run);
    hit[run] = d.v_true > eps(d.s, d.r) ? 1 : 0;
  });
  AuditResult out{runs, 0};
  for (char h : hit) out.violations += h;
  return out;
}

struct IncrementalStep {
  int M = 0;
  int r = 0;
  std::optional<double> eta;  // absent at M = 0
  double eps = 0.0;
};

// Re-certifies a fixed solution with support count s as validation
// outcomes arrive one at a time; the first step is M = 0.
inline std::vector<IncrementalStep> incremental_judgement(int N, int zeta, double beta, const CoefficientVector& coeffs,
                                                          int s, std::span<const bool> outcomes,
                                                          double tol = kDefaultTol) {
  std::vector<IncrementalStep> steps;
  steps.reserve(outcomes.size() + 1);
  int r = 0;
  for (std::size_t i = 0; i <= outcomes.size(); ++i) {
    const int M = static_cast<int>(i);
    if (i > 0 && outcomes[i - 1]) ++r;
    const CertificateProblem cert(N, M, zeta, beta);
    IncrementalStep step;
    step.M = M;
    step.r = r;
    step.eps = 1.0 - solve_root(s, r, cert, coeffs, 0.0, tol);
    if (M > 0) step.eta = clopper_pearson(M, r, cert.beta(), tol);
    steps.push_back(step);
  }
  return steps;
}

inline std::vector<IncrementalStep> incremental_judgement(const ToyScenarioProblem& problem, int N, double beta,
                                                          const CoefficientVector& coeffs,
                                                          const ScenarioSolution& solution,
                                                          const SamplePoints& validation,
                                                          double tol = kDefaultTol) {
  const auto count = static_cast<std::size_t>(validation.size());
  auto flags = std::make_unique<bool[]>(count);
  for (std::size_t i = 0; i < count; ++i) flags[i] = violates(solution, validation.point(static_cast<int>(i)));
  return incremental_judgement(N, problem.zeta(), beta, coeffs, solution.support_count(),
                               std::span<const bool>(flags.get(), count), tol);
}

}  // namespace apcert

#endif  // APCERT_SCENARIO_LAB_HPP_
