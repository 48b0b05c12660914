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

// apcert: command-line front end for a posteriori scenario certificates.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 numeric/domain
// error, 4 LP failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "apcert.hpp"

namespace {

using namespace apcert;

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitLp = 4;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int n = 0;
  int m = 0;
  int zeta = 0;
  double beta = 0.0;
  int k = -1;
  int l = -1;
  std::string coeffs = "uniform";
  double tol = kDefaultTol;
  double tau = kDefaultTau;
  double tol_converge = kDefaultConvergeTol;
  int max_iter = kDefaultMaxIter;
  int runs = 2000;
  std::uint64_t seed = 0;
  std::string out;
  std::string summary;
  std::string coeffs_out;
  std::string format = "csv";
  unsigned threads = 0;
  std::string kind = "bounding-box";
  int d = 1;
  std::string outcomes;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes via a temporary sibling so a failed run never leaves a partial file.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw IoError("write failed for " + path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move output into place at " + path + ": " + ec.message());
  }
}

CoefficientVector load_coefficients(const RunConfig& cfg) {
  if (cfg.coeffs == "uniform") return CoefficientVector::uniform(cfg.n);
  CoefficientVector c = coefficients_from_json(read_file(cfg.coeffs), cfg.zeta, "file:" + cfg.coeffs);
  if (c.N() != cfg.n) {
    throw DomainError("coefficients file has " + std::to_string(c.N() + 1) + " entries, expected N+1=" +
                      std::to_string(cfg.n + 1));
  }
  return c;
}

ToyScenarioProblem make_toy(const RunConfig& cfg) {
  if (cfg.kind == "scalar-max") return ToyScenarioProblem::scalar_max();
  if (cfg.kind == "bounding-box") return ToyScenarioProblem::bounding_box(cfg.d);
  throw DomainError("unknown --kind " + cfg.kind);
}

void print_value(double v) { std::cout << format_number(v) << '\n'; }

void add_problem(CLI::App* app, RunConfig& cfg, bool with_m) {
  app->add_option("--n", cfg.n, "design sample count N")->required();
  if (with_m) app->add_option("--m", cfg.m, "validation sample count M")->required();
  app->add_option("--zeta", cfg.zeta, "Helly dimension bound")->required();
  app->add_option("--beta", cfg.beta, "confidence parameter in (0,1)")->required();
}

void add_tol(CLI::App* app, RunConfig& cfg) {
  app->add_option("--tol", cfg.tol, "bisection tolerance")->capture_default_str();
}

void add_output(CLI::App* app, RunConfig& cfg) {
  app->add_option("--out", cfg.out, "output path (stdout when omitted)");
  app->add_option("--format", cfg.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_threads(CLI::App* app, RunConfig& cfg) {
  app->add_option("--threads", cfg.threads, "worker cap (0 = all hardware threads)");
}

int run(int argc, char** argv) {
  CLI::App app{"A posteriori probabilistic certificates for convex scenario programs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* apriori = app.add_subcommand("apriori", "bound from the Helly dimension alone");
  apriori->add_option("--n", cfg.n, "design sample count N")->required();
  apriori->add_option("--zeta", cfg.zeta, "Helly dimension bound")->required();
  apriori->add_option("--beta", cfg.beta, "confidence parameter in (0,1)")->required();
  add_tol(apriori, cfg);

  auto* chernoff = app.add_subcommand("chernoff", "one-sided Chernoff bound r/M + sqrt(ln(beta)/(-2M))");
  chernoff->add_option("--m", cfg.m, "validation sample count M")->required();
  chernoff->add_option("--l", cfg.l, "observed violations")->required();
  chernoff->add_option("--beta", cfg.beta, "confidence parameter in (0,1)")->required();

  auto* cp = app.add_subcommand("cp", "one-sided Clopper-Pearson bound");
  cp->add_option("--m", cfg.m, "validation sample count M")->required();
  cp->add_option("--l", cfg.l, "observed violations")->required();
  cp->add_option("--beta", cfg.beta, "confidence parameter in (0,1)")->required();
  add_tol(cp, cfg);

  auto* bound = app.add_subcommand("bound", "single two-indexed bound eps(k,l)");
  add_problem(bound, cfg, true);
  bound->add_option("--k", cfg.k, "support constraint count")->required();
  bound->add_option("--l", cfg.l, "validation violations")->required();
  bound->add_option("--coeffs", cfg.coeffs, "'uniform' or a JSON coefficients file")->capture_default_str();
  add_tol(bound, cfg);

  auto* table = app.add_subcommand("table", "full (zeta+1) x (M+1) bound grid");
  add_problem(table, cfg, true);
  table->add_option("--coeffs", cfg.coeffs, "'uniform' or a JSON coefficients file")->capture_default_str();
  add_tol(table, cfg);
  add_output(table, cfg);
  add_threads(table, cfg);

  auto* lower = app.add_subcommand("lower-limit", "fundamental lower limits (point or grid)");
  add_problem(lower, cfg, true);
  lower->add_option("--k", cfg.k, "support constraint count (point query)");
  lower->add_option("--l", cfg.l, "validation violations (point query)");
  add_tol(lower, cfg);
  add_output(lower, cfg);
  add_threads(lower, cfg);

  auto* refine_cmd = app.add_subcommand("refine", "Pareto refinement of the coefficients by iterated LPs");
  add_problem(refine_cmd, cfg, true);
  refine_cmd->add_option("--coeffs", cfg.coeffs, "initial coefficients")->capture_default_str();
  add_tol(refine_cmd, cfg);
  refine_cmd->add_option("--tau", cfg.tau, "minimum weight on m in [zeta, N-1]")->capture_default_str();
  refine_cmd->add_option("--tol-converge", cfg.tol_converge, "stop when no root moves more")
      ->capture_default_str();
  refine_cmd->add_option("--max-iter", cfg.max_iter, "LP solve cap")->capture_default_str();
  refine_cmd->add_option("--out", cfg.out, "trace JSON path (stdout when omitted)");
  refine_cmd->add_option("--coeffs-out", cfg.coeffs_out, "write final coefficients here");
  add_threads(refine_cmd, cfg);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo audit on an analytic scenario problem");
  simulate->add_option("--kind", cfg.kind, "scalar-max or bounding-box")
      ->check(CLI::IsMember({"scalar-max", "bounding-box"}))
      ->capture_default_str();
  simulate->add_option("--d", cfg.d, "box dimension")->capture_default_str();
  simulate->add_option("--n", cfg.n, "design sample count N")->required();
  simulate->add_option("--m", cfg.m, "validation sample count M")->required();
  simulate->add_option("--beta", cfg.beta, "confidence parameter in (0,1)")->required();
  simulate->add_option("--runs", cfg.runs, "replications")->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  simulate->add_option("--coeffs", cfg.coeffs, "'uniform' or a JSON coefficients file")->capture_default_str();
  simulate->add_option("--summary", cfg.summary, "gap statistics JSON path");
  add_tol(simulate, cfg);
  add_output(simulate, cfg);
  add_threads(simulate, cfg);

  auto* incremental = app.add_subcommand("incremental", "bounds as validation samples arrive one by one");
  incremental->add_option("--n", cfg.n, "design sample count N")->required();
  incremental->add_option("--beta", cfg.beta, "confidence parameter in (0,1)")->required();
  incremental->add_option("--zeta", cfg.zeta, "Helly dimension bound (outcome mode)");
  incremental->add_option("--k", cfg.k, "support constraint count (outcome mode)");
  incremental->add_option("--outcomes", cfg.outcomes, "validation results, e.g. 0010 (1 = violated)");
  incremental->add_option("--kind", cfg.kind, "simulate a toy problem instead of --outcomes")
      ->check(CLI::IsMember({"scalar-max", "bounding-box"}));
  incremental->add_option("--d", cfg.d, "box dimension")->capture_default_str();
  incremental->add_option("--m", cfg.m, "validation samples to simulate");
  incremental->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  incremental->add_option("--coeffs", cfg.coeffs, "'uniform' or a JSON coefficients file")->capture_default_str();
  add_tol(incremental, cfg);
  add_output(incremental, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const bool json = cfg.format == "json";

  if (apriori->parsed()) {
    print_value(apriori_epsilon(cfg.n, cfg.zeta, ConfidenceLevel(cfg.beta), cfg.tol));
  } else if (chernoff->parsed()) {
    const ChernoffBound b = chernoff_bound(cfg.m, cfg.l, ConfidenceLevel(cfg.beta));
    print_value(b.value);
    if (b.out_of_range) std::cerr << "warning: Chernoff bound exceeds 1 and is uninformative\n";
  } else if (cp->parsed()) {
    print_value(clopper_pearson(cfg.m, cfg.l, ConfidenceLevel(cfg.beta), cfg.tol));
  } else if (bound->parsed()) {
    const CertificateProblem problem(cfg.n, cfg.m, cfg.zeta, cfg.beta);
    print_value(1.0 - solve_root(cfg.k, cfg.l, problem, load_coefficients(cfg), 0.0, cfg.tol));
  } else if (table->parsed()) {
    const CertificateProblem problem(cfg.n, cfg.m, cfg.zeta, cfg.beta);
    const BoundTable t = bound_table(problem, load_coefficients(cfg), cfg.tol, cfg.threads);
    write_output(cfg.out, json ? table_to_json(t) : table_to_csv(t));
  } else if (lower->parsed()) {
    const CertificateProblem problem(cfg.n, cfg.m, cfg.zeta, cfg.beta);
    if ((cfg.k >= 0) != (cfg.l >= 0)) throw CLI::ValidationError("--k and --l must be given together");
    if (cfg.k >= 0) {
      const LowerLimit ll = lower_limit(cfg.k, cfg.l, problem, cfg.tol);
      print_value(ll.value);
      if (ll.degenerate) std::cerr << "warning: no root; sum of z_j is below beta, limit set to 0\n";
    } else {
      const LowerLimitTable t = lower_limit_table(problem, cfg.tol, cfg.threads);
      write_output(cfg.out, json ? lower_limits_to_json(t) : lower_limits_to_csv(t));
    }
  } else if (refine_cmd->parsed()) {
    const CertificateProblem problem(cfg.n, cfg.m, cfg.zeta, cfg.beta);
    RefineOptions opts;
    opts.tol_root = cfg.tol;
    opts.tol_converge = cfg.tol_converge;
    opts.max_iter = cfg.max_iter;
    opts.tau = cfg.tau;
    opts.threads = cfg.threads;
    const RefinementTrace trace = refine(problem, load_coefficients(cfg), opts);
    for (const auto& w : trace.warnings) std::cerr << "warning: " << w << '\n';
    write_output(cfg.out, trace_to_json(trace));
    if (!cfg.coeffs_out.empty()) write_output(cfg.coeffs_out, coefficients_to_json(trace.final().coefficients));
    std::cerr << "refine: " << to_string(trace.termination) << " after " << trace.lp_solves() << " LP solves\n";
    if (trace.termination == Termination::kLpFailure) {
      std::cerr << "error: " << trace.failure << '\n';
      return kExitLp;
    }
  } else if (simulate->parsed()) {
    MonteCarloConfig mc;
    mc.problem = make_toy(cfg);
    cfg.zeta = mc.problem.zeta();
    mc.N = cfg.n;
    mc.M = cfg.m;
    mc.beta = cfg.beta;
    mc.runs = cfg.runs;
    mc.master_seed = cfg.seed;
    mc.tol = cfg.tol;
    mc.threads = cfg.threads;
    mc.coefficients = load_coefficients(cfg);
    const MonteCarloResult result = run_monte_carlo(mc);
    write_output(cfg.out, json ? trials_to_jsonl(result.trials) : trials_to_csv(result.trials));
    if (!cfg.summary.empty()) write_output(cfg.summary, stats_to_json(result.stats));
  } else if (incremental->parsed()) {
    std::vector<IncrementalStep> steps;
    if (!cfg.outcomes.empty()) {
      if (cfg.zeta <= 0 || cfg.k < 0) throw CLI::ValidationError("--outcomes requires --zeta and --k");
      auto flags = std::make_unique<bool[]>(cfg.outcomes.size());
      for (std::size_t i = 0; i < cfg.outcomes.size(); ++i) {
        const char c = cfg.outcomes[i];
        if (c != '0' && c != '1') throw CLI::ValidationError("--outcomes must contain only 0 and 1");
        flags[i] = c == '1';
      }
      steps = incremental_judgement(cfg.n, cfg.zeta, cfg.beta, load_coefficients(cfg), cfg.k,
                                    std::span<const bool>(flags.get(), cfg.outcomes.size()), cfg.tol);
    } else {
      if (incremental->count("--m") == 0) throw CLI::ValidationError("give --outcomes or --m to simulate");
      const ToyScenarioProblem toy = make_toy(cfg);
      cfg.zeta = toy.zeta();
      UniformStream rng(stream_seed(cfg.seed, 0));
      const SamplePoints design = rng.draw(cfg.n, toy.dim());
      const SamplePoints validation = rng.draw(cfg.m, toy.dim());
      const ScenarioSolution sol = solve_scenario(toy, design);
      steps = incremental_judgement(toy, cfg.n, cfg.beta, load_coefficients(cfg), sol, validation, cfg.tol);
    }
    write_output(cfg.out, json ? incremental_to_json(steps) : incremental_to_csv(steps));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const apcert::LpError& e) {
    std::cerr << "LP failure: " << e.what() << '\n';
    return kExitLp;
  } catch (const apcert::RootError& e) {
    std::cerr << "numeric error: " << e.what() << " (k=" << e.k() << ", l=" << e.l() << ", bracket=["
              << e.lower() << ", " << e.upper() << "])\n";
    return kExitDomain;
  } catch (const apcert::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
}
