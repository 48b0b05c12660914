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

#ifndef APCERT_BETA_TAIL_HPP_
#define APCERT_BETA_TAIL_HPP_

// Binomial tail probabilities
//
//   B_N(t; m) = sum_{i=0}^{m} C(N, i) t^i (1 - t)^(N - i)
//
// evaluated in log space so that N in the tens of thousands neither
// overflows the binomial coefficients nor underflows the tail.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "apcert/errors.hpp"

namespace apcert {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Natural logarithm of a probability. value <= 0, -inf encodes zero.
struct LogProb {
  double value = kNegInf;

  static LogProb from_prob(double p) { return LogProb{std::log(p)}; }
  double prob() const { return std::exp(value); }
};

// Compensated accumulator for sums of nonnegative terms.
class KahanSum {
 public:
  void add(long double x) {
    const long double y = x - carry_;
    const long double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  long double value() const { return sum_; }

 private:
  long double sum_ = 0.0L;
  long double carry_ = 0.0L;
};

// log(sum_i exp(x_i)); -inf entries are skipped, an empty or all -inf input
// yields -inf.
inline double log_sum_exp(std::span<const double> xs) {
  double peak = kNegInf;
  for (double x : xs) peak = std::max(peak, x);
  if (peak == kNegInf) return kNegInf;
  KahanSum acc;
  for (double x : xs) {
    if (x != kNegInf) acc.add(std::exp(x - peak));
  }
  return peak + static_cast<double>(std::log(acc.value()));
}

// ln C(n, k).
inline double log_binom_coeff(long n, long k) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("log_binom_coeff: need 0 <= k <= n, got n=" + std::to_string(n) +
                      " k=" + std::to_string(k));
  }
  const long j = std::min(k, n - k);
  if (j <= 64) {
    // Short products are summed directly; lgamma differences would cancel.
    long double acc = 0.0L;
    for (long i = 1; i <= j; ++i) {
      acc += std::log(static_cast<long double>(n - j + i) / static_cast<long double>(i));
    }
    return static_cast<double>(acc);
  }
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(std::lgamma(nn + 1.0L) -
                             std::lgamma(static_cast<long double>(k) + 1.0L) -
                             std::lgamma(static_cast<long double>(n - k) + 1.0L));
}

// ln C(n, i) for i = 0..n, built by the multiplicative recurrence in
// extended precision. Used by hot loops that evaluate many tails of the
// same order n.
class LogBinomialRow {
 public:
  LogBinomialRow() = default;
  explicit LogBinomialRow(int n) : n_(n), values_(static_cast<std::size_t>(n) + 1) {
    if (n < 0) throw DomainError("LogBinomialRow: n must be nonnegative");
    long double acc = 0.0L;
    values_[0] = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += std::log(static_cast<long double>(n - i) / static_cast<long double>(i + 1));
      values_[static_cast<std::size_t>(i) + 1] = static_cast<double>(acc);
    }
    // Symmetrize so that C(n, i) and C(n, n - i) agree bit for bit.
    for (int i = 0; i <= n / 2; ++i) {
      values_[static_cast<std::size_t>(n - i)] = values_[static_cast<std::size_t>(i)];
    }
  }

  int n() const { return n_; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

 private:
  int n_ = 0;
  std::vector<double> values_;
};

namespace detail {

// ln B_n(t; m) given ln t and ln(1 - t), for 0 <= m < n and t in (0, 1).
inline double log_binom_cdf_interior(const LogBinomialRow& row, int m, double log_t,
                                     double log_1mt) {
  const int n = row.n();
  auto term = [&](int i) { return row[i] + i * log_t + (n - i) * log_1mt; };
  double peak = kNegInf;
  for (int i = 0; i <= m; ++i) peak = std::max(peak, term(i));
  if (peak == kNegInf) return kNegInf;
  KahanSum acc;
  for (int i = 0; i <= m; ++i) acc.add(std::exp(term(i) - peak));
  return std::min(0.0, peak + static_cast<double>(std::log(acc.value())));
}

// ln sum_{i=m+1}^{n} C(n,i) t^i (1-t)^(n-i), for 0 <= m < n and t in (0, 1).
inline double log_binom_sf_interior(const LogBinomialRow& row, int m, double log_t, double log_1mt) {
  const int n = row.n();
  auto term = [&](int i) { return row[i] + i * log_t + (n - i) * log_1mt; };
  double peak = kNegInf;
  for (int i = m + 1; i <= n; ++i) peak = std::max(peak, term(i));
  if (peak == kNegInf) return kNegInf;
  KahanSum acc;
  for (int i = m + 1; i <= n; ++i) acc.add(std::exp(term(i) - peak));
  return std::min(0.0, peak + static_cast<double>(std::log(acc.value())));
}

// Sums whichever tail is smaller and complements when needed, so values near
// one keep their full relative accuracy in 1 - B.
inline double log_binom_cdf_split(const LogBinomialRow& row, int m, double log_t, double log_1mt) {
  if (m <= row.n() * std::exp(log_t)) return log_binom_cdf_interior(row, m, log_t, log_1mt);
  const double sf = log_binom_sf_interior(row, m, log_t, log_1mt);
  return sf == kNegInf ? 0.0 : std::log1p(-std::exp(sf));
}

inline double log_binom_sf_split(const LogBinomialRow& row, int m, double log_t, double log_1mt) {
  if (m > row.n() * std::exp(log_t)) return log_binom_sf_interior(row, m, log_t, log_1mt);
  const double cdf = log_binom_cdf_interior(row, m, log_t, log_1mt);
  return cdf == kNegInf ? 0.0 : std::log1p(-std::exp(cdf));
}

inline void check_cdf_args(int n, int m, double t) {
  if (n < 0) throw DomainError("binom_cdf: N must be nonnegative");
  if (m > n) {
    throw DomainError("binom_cdf: m=" + std::to_string(m) + " exceeds N=" + std::to_string(n));
  }
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("binom_cdf: t must lie in [0, 1]");
}

}  // namespace detail

// ln B_n(t; m) using a precomputed coefficient row of order n.
inline LogProb log_binom_cdf(const LogBinomialRow& row, int m, double t) {
  const int n = row.n();
  detail::check_cdf_args(n, m, t);
  if (m < 0) return LogProb{kNegInf};
  if (m == n || t == 0.0) return LogProb{0.0};
  if (t == 1.0) return LogProb{kNegInf};
  return LogProb{detail::log_binom_cdf_split(row, m, std::log(t), std::log1p(-t))};
}

inline LogProb log_binom_cdf(int n, int m, double t) {
  detail::check_cdf_args(n, m, t);
  if (m < 0) return LogProb{kNegInf};
  if (m == n || t == 0.0) return LogProb{0.0};
  if (t == 1.0) return LogProb{kNegInf};
  return log_binom_cdf(LogBinomialRow(n), m, t);
}

// ln(1 - B_n(t; m)), accurate when the cdf is close to one.
inline LogProb log_binom_sf(const LogBinomialRow& row, int m, double t) {
  const int n = row.n();
  detail::check_cdf_args(n, m, t);
  if (m < 0 || t == 1.0) return LogProb{m >= n ? kNegInf : 0.0};
  if (m == n || t == 0.0) return LogProb{kNegInf};
  return LogProb{detail::log_binom_sf_split(row, m, std::log(t), std::log1p(-t))};
}

inline LogProb log_binom_sf(int n, int m, double t) { return log_binom_sf(LogBinomialRow(n), m, t); }

// B_n(t; m). m < 0 is the empty sum.
inline double binom_cdf(int n, int m, double t) { return log_binom_cdf(n, m, t).prob(); }

}  // namespace apcert

#endif  // APCERT_BETA_TAIL_HPP_
