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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "apcert.hpp"
#include "oracles.hpp"

namespace apcert {
namespace {

constexpr double kTol = 1e-10;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// 1. Reference scalars, each within 5e-4 and under one second.
Outcome criterion1() {
  struct Item {
    const char* name;
    double expected;
    std::function<double()> compute;
  };
  const CertificateProblem p500(500, 500, 18, 1e-6);
  const CoefficientVector u500 = CoefficientVector::uniform(500);
  const std::vector<Item> items = {
      {"chernoff(100,10)", 0.3628, [] { return chernoff_bound(100, 10, ConfidenceLevel(1e-6)).value; }},
      {"cp(100,10)", 0.3045, [] { return clopper_pearson(100, 10, ConfidenceLevel(1e-6)); }},
      {"apriori(500,18)", 0.0889, [] { return apriori_epsilon(500, 18, ConfidenceLevel(1e-6)); }},
      {"eps(3,2)", 0.0268, [&] { return 1.0 - solve_root(3, 2, p500, u500); }},
      {"eps(3)", 0.0486,
       [&] { return 1.0 - solve_root(3, 0, CertificateProblem(500, 0, 18, 1e-6), u500); }},
      {"eta_500(2)", 0.0376, [] { return clopper_pearson(500, 2, ConfidenceLevel(1e-6)); }},
      {"eps_200,0(3,0)", 0.1176,
       [] { return 1.0 - solve_root(3, 0, CertificateProblem(200, 0, 18, 1e-6), CoefficientVector::uniform(200)); }},
  };
  Outcome out;
  double worst_err = 0.0, slowest = 0.0;
  for (const Item& item : items) {
    const Timer timer;
    const double v = item.compute();
    const double secs = timer.seconds();
    const double err = std::abs(v - item.expected);
    worst_err = std::max(worst_err, err);
    slowest = std::max(slowest, secs);
    if (err > 5e-4 || secs >= 1.0) {
      out.pass = false;
      out.detail += std::string(item.name) + "=" + fmt("%.6f", v) + fmt(" (%.2fs) ", secs);
    }
  }
  out.detail += "7 values, max |err| " + fmt("%.2e", worst_err) + ", slowest " + fmt("%.1e s", slowest);
  return out;
}

// 2. Boundary identities eps(k) = eps_{N,0}(k,0) = eps_{N,M}(k,M) > eps_{N,M}(k,l) over a grid of configurations.
Outcome criterion2() {
  const Timer timer;
  std::vector<CertificateProblem> configs = {CertificateProblem(50, 30, 10, 1e-6)};
  std::mt19937_64 rng(2);
  while (configs.size() < 24) {
    const int N = std::uniform_int_distribution<int>(10, 150)(rng);
    const int M = std::uniform_int_distribution<int>(1, 60)(rng);
    const int zeta = std::uniform_int_distribution<int>(1, std::min(N - 1, 12))(rng);
    const double beta = std::pow(10.0, -std::uniform_real_distribution<double>(1.0, 9.0)(rng));
    configs.emplace_back(N, M, zeta, beta);
  }
  Outcome out;
  double worst_eq = 0.0, min_margin = 1.0;
  for (const CertificateProblem& p : configs) {
    const CoefficientVector a = CoefficientVector::uniform(p.N());
    const BoundTable table = bound_table(p, a, kTol);
    const std::vector<double> eps_k = wait_and_judge(p, a, kTol);
    for (int k = 0; k <= p.zeta(); ++k) {
      const double e0 = eps_k[static_cast<std::size_t>(k)];
      worst_eq = std::max(worst_eq, std::abs(table.eps(k, p.M()) - e0));
      for (int l = 0; l < p.M(); ++l) min_margin = std::min(min_margin, e0 - table.eps(k, l));
    }
  }
  out.pass = worst_eq <= 1e-8 && min_margin > -2 * kTol && timer.seconds() < 60.0;
  out.detail = std::to_string(configs.size()) + " configs, max |eps(k,M) - eps(k)| " + fmt("%.1e", worst_eq) +
               ", min eps(k) - eps(k,l<M) " + fmt("%.2e", min_margin) + fmt(", %.1f s", timer.seconds());
  return out;
}

// 3. Strict monotonicity suites.
Outcome criterion3() {
  constexpr int kCases = 250;
  std::mt19937_64 rng(3);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto beta = [&] { return std::pow(10.0, -real(1.0, 8.0)); };
  int failures[5] = {0, 0, 0, 0, 0};

  // B_N(t; m) strictly decreasing in t for m < N. Strictness is
  // read off whichever tail is representable in double.
  for (int i = 0; i < kCases; ++i) {
    const int n = uni(1, 400), m = uni(0, n - 1);
    double t1 = real(0.001, 0.999), t2 = real(0.001, 0.999);
    if (t1 > t2) std::swap(t1, t2);
    if (t1 == t2) continue;
    const LogBinomialRow row(n);
    const bool ok = log_binom_cdf(row, m, t1).value > log_binom_cdf(row, m, t2).value ||
                    log_binom_sf(row, m, t1).value < log_binom_sf(row, m, t2).value;
    failures[0] += ok ? 0 : 1;
  }
  // B_N(t; m) strictly decreasing in N >= m.
  for (int i = 0; i < kCases; ++i) {
    const int n = uni(1, 400), m = uni(0, n);
    const double t = real(0.001, 0.999);
    const bool ok = log_binom_cdf(n + 1, m, t).value < log_binom_cdf(n, m, t).value ||
                    log_binom_sf(n + 1, m, t).value > log_binom_sf(n, m, t).value;
    failures[1] += ok ? 0 : 1;
  }
  // eps(k, l) < eps(k, l + 1).
  for (int i = 0; i < kCases; ++i) {
    const int N = uni(10, 120), M = uni(1, 40), zeta = uni(1, std::min(N - 1, 10));
    const CertificateProblem p(N, M, zeta, beta());
    const CoefficientVector a = CoefficientVector::uniform(N);
    const int k = uni(0, zeta), l = uni(0, M - 1);
    const double lo = 1.0 - solve_root(k, l, p, a), hi = 1.0 - solve_root(k, l + 1, p, a);
    failures[2] += hi > lo - 2 * kTol ? 0 : 1;
  }
  // Clopper-Pearson incremental monotonicity.
  for (int i = 0; i < kCases; ++i) {
    const int M = uni(1, 300), l = uni(0, M);
    const ConfidenceLevel b(beta());
    const double now = clopper_pearson(M, l, b);
    bool ok = (l == M) ? clopper_pearson(M + 1, l, b) < now + 2 * kTol && now == 1.0
                       : clopper_pearson(M + 1, l, b) < now + 2 * kTol;
    if (l < M) ok = ok && clopper_pearson(M + 1, l + 1, b) > now - 2 * kTol;
    if (l == M) ok = ok && clopper_pearson(M + 1, M + 1, b) == 1.0;
    failures[3] += ok ? 0 : 1;
  }
  // The same pattern for eps_{N,M}(k, l).
  for (int i = 0; i < kCases; ++i) {
    const int N = uni(10, 120), M = uni(1, 40), zeta = uni(1, std::min(N - 1, 10));
    const double b = beta();
    const CertificateProblem pm(N, M, zeta, b), pm1(N, M + 1, zeta, b);
    const CoefficientVector a = CoefficientVector::uniform(N);
    const int k = uni(0, zeta), l = uni(0, M);
    const double now = 1.0 - solve_root(k, l, pm, a);
    bool ok = 1.0 - solve_root(k, l, pm1, a) < now + 2 * kTol;
    if (l < M) {
      ok = ok && 1.0 - solve_root(k, l + 1, pm1, a) > now - 2 * kTol;
    } else {
      ok = ok && std::abs((1.0 - solve_root(k, M + 1, pm1, a)) - now) <= 1e-8;
    }
    failures[4] += ok ? 0 : 1;
  }
  Outcome out;
  const char* names[] = {"B in t", "B in N", "eps in l", "eta incremental", "eps incremental"};
  for (int s = 0; s < 5; ++s) {
    if (s > 0) out.detail += ", ";
    out.detail += std::string(names[s]) + " " + std::to_string(kCases - failures[s]) + "/" + std::to_string(kCases);
    out.pass = out.pass && failures[s] == 0;
  }
  return out;
}

// 4. Lower-limit dominance at N=100, M=5, zeta=8, beta=1e-6.
Outcome criterion4() {
  const CertificateProblem p(100, 5, 8, 1e-6);
  const LowerLimitTable lower = lower_limit_table(p, kTol);
  const BoundTable uniform = bound_table(p, CoefficientVector::uniform(100), kTol);
  const RefinementTrace trace = refine(p, CoefficientVector::uniform(100));
  const BoundTable& refined = trace.final().table;
  Outcome out;
  double margin_u = 1.0, margin_r = 1.0;
  bool row0 = true;
  for (int k = 0; k <= 8; ++k) {
    for (int l = 0; l <= 5; ++l) {
      margin_u = std::min(margin_u, uniform.eps(k, l) - lower.eps_lower(k, l));
      margin_r = std::min(margin_r, refined.eps(k, l) - lower.eps_lower(k, l));
      if (k == 0) row0 = row0 && lower.eps_lower(0, l) == 0.0;
    }
  }
  out.pass = row0 && margin_u >= -2 * kTol && margin_r >= -2 * kTol;
  out.detail = std::string("eps_lower(0,l) == 0: ") + (row0 ? "yes" : "no") + ", min uniform - lower " +
               fmt("%.3e", margin_u) + ", min refined - lower " + fmt("%.3e", margin_r);
  return out;
}

// 5. Refinement at N=100, M=5, zeta=8, beta=1e-6.
Outcome criterion5() {
  const CertificateProblem p(100, 5, 8, 1e-6);
  const RefinementTrace trace = refine(p, CoefficientVector::uniform(100));
  Outcome out;
  const bool terminated = trace.termination == Termination::kConverged && trace.lp_solves() <= 50;
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < trace.iterates.size(); ++i) {
    const BoundTable& a = trace.iterates[i - 1].table;
    const BoundTable& b = trace.iterates[i].table;
    for (int k = 0; k <= 8; ++k) {
      for (int l = 0; l <= 5; ++l) worst_drop = std::max(worst_drop, a.t(k, l) - b.t(k, l));
    }
  }
  const BoundTable& first = trace.iterates.front().table;
  const BoundTable& last = trace.final().table;
  double worst_rise = -1.0, best_gain = 0.0;
  int improved = 0;
  for (int k = 0; k <= 8; ++k) {
    for (int l = 0; l <= 5; ++l) {
      worst_rise = std::max(worst_rise, last.eps(k, l) - first.eps(k, l));
      best_gain = std::max(best_gain, first.eps(k, l) - last.eps(k, l));
      if (last.eps(k, l) < first.eps(k, l) - 2 * kTol) ++improved;
    }
  }
  const BoundTable again = bound_table(p, refine_coefficients(last), kTol);
  double moved = 0.0;
  for (int k = 0; k <= 8; ++k) {
    for (int l = 0; l <= 5; ++l) moved = std::max(moved, std::abs(again.eps(k, l) - last.eps(k, l)));
  }
  out.pass = terminated && worst_drop <= 2 * kTol && worst_rise <= 2 * kTol && improved >= 1 && moved <= 1e-9;
  out.detail = std::string(to_string(trace.termination)) + " after " + std::to_string(trace.lp_solves()) +
               " LP solves, max t decrease " + fmt("%.1e", std::max(0.0, worst_drop)) + ", " +
               std::to_string(improved) + "/54 cells improved (best " + fmt("%.4f", best_gain) +
               "), fixed-point move " + fmt("%.1e", moved);
  return out;
}

// 6. Oracle equivalence.
Outcome criterion6() {
  using testing::Rational;
  Outcome out;
  std::mt19937_64 rng(6);
  double cdf_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 50)(rng);
    const int m = std::uniform_int_distribution<int>(0, n)(rng);
    const int num = std::uniform_int_distribution<int>(1, 999)(rng);
    const Rational t(num, 1000);
    const double want = testing::to_double(testing::exact_binom_cdf(n, m, t));
    cdf_err = std::max(cdf_err, std::abs(binom_cdf(n, m, num / 1000.0) - want));
  }
  double z_err = 0.0;
  auto check_z = [&](int N, int M, int k) {
    const std::vector<double> z = z_coefficients(N, M, k);
    for (int j = 0; j <= M; ++j) {
      const double want = testing::to_double(testing::exact_z(N, M, k, j));
      z_err = std::max(z_err, std::abs(z[static_cast<std::size_t>(j)] - want) / want);
    }
  };
  check_z(100, 5, 8);
  for (int i = 0; i < 30; ++i) {
    const int N = std::uniform_int_distribution<int>(1, 80)(rng);
    check_z(N, std::uniform_int_distribution<int>(0, 40)(rng), std::uniform_int_distribution<int>(1, N)(rng));
  }

  int lps = 0;
  double lp_err = 0.0;
  bool lp_ok = true;
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; lps < 25 && trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    const int m = std::uniform_int_distribution<int>(1, 17 - n)(rng);
    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.objective.push_back(coef(rng));
    lp.rows.push_back({std::vector<double>(static_cast<std::size_t>(n), 1.0), Sense::kLessEqual, 5.0});
    for (int i = 0; i < m; ++i) {
      std::vector<double> a;
      for (int j = 0; j < n; ++j) a.push_back(coef(rng));
      const Sense s = i % 3 == 2 ? Sense::kGreaterEqual : Sense::kLessEqual;
      lp.rows.push_back({std::move(a), s, std::uniform_real_distribution<double>(-0.2, 1.5)(rng)});
    }
    const double oracle = testing::vertex_enumeration_optimum(lp);
    if (std::isnan(oracle)) continue;
    try {
      const LpSolution sol = lp_solve(lp);
      lp_err = std::max(lp_err, std::abs(sol.objective - oracle));
      lp_ok = lp_ok && lp.max_residual(sol.x) <= 1e-8;
    } catch (const LpError&) {
      lp_ok = false;
    }
    ++lps;
  }

  struct Config {
    int N, M, zeta, k, l;
    double beta;
  };
  const Config configs[] = {{10, 0, 3, 0, 0, 1e-3},  {10, 5, 3, 2, 1, 1e-2},  {20, 10, 5, 3, 4, 1e-4},
                            {15, 15, 4, 4, 15, 1e-3}, {25, 8, 6, 1, 0, 1e-5},  {30, 12, 2, 2, 6, 1e-2},
                            {12, 20, 5, 5, 3, 0.1},   {18, 6, 9, 0, 2, 1e-6},  {8, 3, 1, 1, 1, 0.05},
                            {22, 22, 7, 4, 11, 1e-3}, {40, 10, 4, 2, 0, 1e-6}};
  constexpr int kGrid = 1000000;
  int roots_ok = 0;
  for (const Config& c : configs) {
    const CoefficientVector a = CoefficientVector::uniform(c.N);
    const std::vector<double> av(a.values().begin(), a.values().end());
    const testing::DirectPolynomial h(c.k, c.l, c.N, c.M, c.beta, av);
    int flip = -1, flips = 0;
    long double prev = h(1.0L / kGrid);
    for (int i = 2; i < kGrid; ++i) {
      const long double v = h(static_cast<long double>(i) / kGrid);
      if (prev >= 0 && v < 0) {
        flip = i;
        ++flips;
      }
      prev = v;
    }
    const double root = solve_root(c.k, c.l, CertificateProblem(c.N, c.M, c.zeta, c.beta), a, 0.0, 1e-12);
    if (flips == 1 && root >= (flip - 1.0) / kGrid - 1e-12 && root <= static_cast<double>(flip) / kGrid + 1e-12) {
      ++roots_ok;
    }
  }
  const int nroots = static_cast<int>(std::size(configs));
  out.pass = cdf_err <= 1e-10 && z_err <= 1e-12 && lps >= 20 && lp_ok && lp_err <= 1e-8 && roots_ok == nroots;
  out.detail = "binom_cdf max err " + fmt("%.1e", cdf_err) + ", z rel err " + fmt("%.1e", z_err) + ", " +
               std::to_string(lps) + " LPs max err " + fmt("%.1e", lp_err) + ", roots " + std::to_string(roots_ok) +
               "/" + std::to_string(nroots) + " in sign-change cell";
  return out;
}

// 7. Monte Carlo audit on the d = 5 bounding box.
Outcome criterion7() {
  const Timer timer;
  MonteCarloConfig c;
  c.problem = ToyScenarioProblem::bounding_box(5);
  c.N = 100;
  c.M = 100;
  c.beta = 1e-6;
  c.runs = 2000;
  c.master_seed = 42;
  c.threads = 0;
  const MonteCarloResult res = run_monte_carlo(c);
  const auto& b = res.stats.bounds;
  const int violations = b.at(BoundKind::kEpsSR).violations;
  const double g_sr = b.at(BoundKind::kEpsSR).mean_gap, g_s = b.at(BoundKind::kEpsS).mean_gap,
               g_eta = b.at(BoundKind::kEta).mean_gap;
  double worst_ratio = 1.0;
  for (const OccurrenceRow& row : res.stats.occurrence) {
    const double ratio = row.mean_r_over_m / (static_cast<double>(row.s) / c.N);
    worst_ratio = std::max({worst_ratio, ratio, 1.0 / ratio});
  }
  Outcome out;
  out.pass = violations == 0 && g_sr < g_s && g_sr < g_eta && worst_ratio < 5.0 && timer.seconds() < 300.0;
  out.detail = std::to_string(violations) + " violations of eps(s,r) in 2000 runs, mean gaps eps(s,r) " +
               fmt("%.4f", g_sr) + " < eps(s) " + fmt("%.4f", g_s) + ", eta " + fmt("%.4f", g_eta) +
               ", worst factor between mean(r/M) and s/N " + fmt("%.2f", worst_ratio) + fmt(", %.1f s", timer.seconds());
  return out;
}

// 8. Support-set exactness by removal.
Outcome criterion8() {
  std::mt19937_64 seeds(8);
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = std::uniform_int_distribution<int>(1, 5)(seeds);
    const int n = std::uniform_int_distribution<int>(2, 30)(seeds);
    const auto toy = ToyScenarioProblem::bounding_box(d);
    UniformStream rng(seeds());
    const SamplePoints pts = rng.draw(n, d);
    const ScenarioSolution sol = solve_scenario(toy, pts);
    const std::set<int> support(sol.support_set.begin(), sol.support_set.end());
    bool ok = !sol.tie;
    for (int i = 0; i < n; ++i) {
      const bool changed = !solve_scenario(toy, pts.without(i)).same_decision(sol);
      ok = ok && changed == (support.count(i) == 1);
    }
    exact += ok ? 1 : 0;
  }
  return Outcome{exact == 100, std::to_string(exact) + "/100 support sets confirmed by removal"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(APCERT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 9. simulate output is byte-identical across repeats and thread counts.
Outcome criterion9() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("apcert_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);
  const std::vector<std::string> invocations = {
      "--kind bounding-box --d 5 --n 100 --m 100 --beta 1e-6 --runs 2000 --seed 42",
      "--kind scalar-max --n 50 --m 20 --beta 1e-3 --runs 500 --seed 7",
      "--kind bounding-box --d 2 --n 30 --m 0 --beta 1e-2 --runs 300 --seed 123456789"};
  const unsigned threads[] = {1, 2, 4, 1};
  int identical = 0;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    std::string reference;
    bool ok = true;
    for (std::size_t j = 0; j < std::size(threads); ++j) {
      const fs::path out = dir / ("sim" + std::to_string(i) + "_" + std::to_string(j) + ".csv");
      ok = ok && run_cli("simulate " + invocations[i] + " --threads " + std::to_string(threads[j]) + " --out " +
                         out.string()) == 0;
      const std::string bytes = slurp(out);
      ok = ok && !bytes.empty();
      if (j == 0) reference = bytes;
      ok = ok && bytes == reference;
    }
    identical += ok ? 1 : 0;
  }
  fs::remove_all(dir);
  const int total = static_cast<int>(invocations.size());
  return Outcome{identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                         " invocations byte-identical over 4 runs (threads 1, 2, 4, 1)"};
}

}  // namespace
}  // namespace apcert

int main() {
  using apcert::Outcome;
  const std::function<Outcome()> criteria[] = {apcert::criterion1, apcert::criterion2, apcert::criterion3,
                                               apcert::criterion4, apcert::criterion5, apcert::criterion6,
                                               apcert::criterion7, apcert::criterion8, apcert::criterion9};
  int failed = 0;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
