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

#ifndef APCERT_IO_HPP_
#define APCERT_IO_HPP_

// CSV and JSON forms of tables, traces and simulation output. All numbers
// go through format_number / round_number so identical inputs give
// identical bytes.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "apcert/errors.hpp"
#include "apcert/lower_limits.hpp"
#include "apcert/posterior_bounds.hpp"
#include "apcert/refine.hpp"
#include "apcert/scenario_lab.hpp"

namespace apcert {

inline constexpr int kSignificantDigits = 12;

// %.12g; NaN prints as "nan".
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", kSignificantDigits, x);
  return buf;
}

// x rounded to 12 significant digits, so that a shortest-round-trip
// printer emits at most 12 digits.
inline double round_number(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

inline nlohmann::json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_number(x);
}

inline nlohmann::json problem_to_json(const CertificateProblem& p) {
  return {{"N", p.N()}, {"M", p.M()}, {"zeta", p.zeta()}, {"beta", round_number(p.beta().value())}};
}

inline nlohmann::json grid_to_json(const Grid<double>& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (int k = 0; k < g.rows(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (int l = 0; l < g.cols(); ++l) row.push_back(number_or_null(g(k, l)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string table_to_csv(const BoundTable& table) {
  std::ostringstream out;
  out << "k,l,t,eps\n";
  for (int k = 0; k < table.rows(); ++k) {
    for (int l = 0; l < table.cols(); ++l) {
      out << k << ',' << l << ',' << format_number(table.t(k, l)) << ',' << format_number(table.eps(k, l))
          << '\n';
    }
  }
  return out.str();
}

inline std::string table_to_json(const BoundTable& table) {
  nlohmann::json j;
  j["problem"] = problem_to_json(table.problem());
  j["coefficients_scheme"] = table.coefficients().scheme();
  j["tol"] = round_number(table.tol());
  j["grid"] = {{"t", grid_to_json(table.t_grid())}, {"eps", grid_to_json(table.eps_grid())}};
  return j.dump(2) + "\n";
}

inline std::string lower_limits_to_csv(const LowerLimitTable& table) {
  std::ostringstream out;
  out << "k,l,eps_lower\n";
  for (int k = 0; k < table.eps_lower.rows(); ++k) {
    for (int l = 0; l < table.eps_lower.cols(); ++l) {
      out << k << ',' << l << ',' << format_number(table.eps_lower(k, l)) << '\n';
    }
  }
  return out.str();
}

inline std::string lower_limits_to_json(const LowerLimitTable& table) {
  nlohmann::json degenerate = nlohmann::json::array();
  for (int k = 0; k < table.degenerate.rows(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (int l = 0; l < table.degenerate.cols(); ++l) row.push_back(table.degenerate(k, l) != 0);
    degenerate.push_back(std::move(row));
  }
  nlohmann::json j;
  j["problem"] = problem_to_json(table.problem);
  j["tol"] = round_number(table.tol);
  j["grid"] = {{"eps_lower", grid_to_json(table.eps_lower)}, {"degenerate", std::move(degenerate)}};
  return j.dump(2) + "\n";
}

// Coefficient files carry full double precision so that reloading them
// reproduces the same table.
inline std::string coefficients_to_json(const CoefficientVector& coeffs) {
  nlohmann::json j = nlohmann::json::array();
  for (double a : coeffs.values()) j.push_back(a);
  return j.dump() + "\n";
}

inline CoefficientVector coefficients_from_json(const std::string& text, int zeta,
                                                const std::string& scheme = "file") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("coefficients: malformed JSON: ") + e.what());
  }
  if (!j.is_array()) throw DomainError("coefficients: expected a JSON array of N+1 numbers");
  std::vector<double> values;
  for (const auto& v : j) {
    if (!v.is_number()) throw DomainError("coefficients: non-numeric entry");
    values.push_back(v.get<double>());
  }
  return CoefficientVector::from_values(std::move(values), zeta, scheme);
}

inline std::string trace_to_json(const RefinementTrace& trace) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    const auto& it = trace.iterates[i];
    nlohmann::json coeffs = nlohmann::json::array();
    for (double a : it.coefficients.values()) coeffs.push_back(round_number(a));
    j.push_back({{"iter", i},
                 {"coefficients", std::move(coeffs)},
                 {"eps_grid", grid_to_json(it.table.eps_grid())},
                 {"max_t_increase", number_or_null(it.max_t_increase)}});
  }
  return j.dump(2) + "\n";
}

inline std::string trials_to_csv(const std::vector<TrialRecord>& trials) {
  std::ostringstream out;
  out << "run,s,r,v_true,eps_sr,eps_s,eta,chernoff\n";
  for (const auto& t : trials) {
    out << t.run << ',' << t.s << ',' << t.r << ',' << format_number(t.v_true) << ','
        << format_number(t.eps_sr) << ',' << format_number(t.eps_s) << ',' << format_number(t.eta) << ','
        << format_number(t.chernoff) << '\n';
  }
  return out.str();
}

inline std::string trials_to_jsonl(const std::vector<TrialRecord>& trials) {
  std::string out;
  for (const auto& t : trials) {
    nlohmann::json gaps;
    for (BoundKind b : kAllBounds) gaps[to_string(b)] = number_or_null(t.gap(b));
    nlohmann::json j = {{"run", t.run},
                        {"seed", t.seed},
                        {"s", t.s},
                        {"r", t.r},
                        {"v_true", number_or_null(t.v_true)},
                        {"eps_sr", number_or_null(t.eps_sr)},
                        {"eps_s", number_or_null(t.eps_s)},
                        {"eta", number_or_null(t.eta)},
                        {"chernoff", number_or_null(t.chernoff)},
                        {"chernoff_out_of_range", t.chernoff_out_of_range},
                        {"tie", t.tie},
                        {"gaps", std::move(gaps)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline std::string stats_to_json(const GapStatistics& stats) {
  nlohmann::json bounds = nlohmann::json::object();
  for (const auto& [kind, s] : stats.bounds) {
    bounds[to_string(kind)] = {{"mean_gap", number_or_null(s.mean_gap)},
                               {"std_gap", number_or_null(s.std_gap)},
                               {"empirical_confidence", number_or_null(s.empirical_confidence)},
                               {"violations", s.violations},
                               {"samples", s.samples}};
  }
  nlohmann::json occurrence = nlohmann::json::array();
  for (const auto& row : stats.occurrence) {
    occurrence.push_back(
        {{"s", row.s}, {"count", row.count}, {"mean_r_over_m", number_or_null(row.mean_r_over_m)}});
  }
  nlohmann::json j = {{"runs", stats.runs}, {"ties", stats.ties}, {"bounds", std::move(bounds)},
                      {"occurrence", std::move(occurrence)}};
  return j.dump(2) + "\n";
}

inline std::string incremental_to_csv(const std::vector<IncrementalStep>& steps) {
  std::ostringstream out;
  out << "M,r,eta,eps\n";
  for (const auto& s : steps) {
    out << s.M << ',' << s.r << ',' << (s.eta ? format_number(*s.eta) : std::string()) << ','
        << format_number(s.eps) << '\n';
  }
  return out.str();
}

inline std::string incremental_to_json(const std::vector<IncrementalStep>& steps) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : steps) {
    j.push_back({{"M", s.M},
                 {"r", s.r},
                 {"eta", s.eta ? number_or_null(*s.eta) : nlohmann::json(nullptr)},
                 {"eps", number_or_null(s.eps)}});
  }
  return j.dump(2) + "\n";
}

}  // namespace apcert

#endif  // APCERT_IO_HPP_
