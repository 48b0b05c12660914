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

#ifndef APCERT_BISECTION_HPP_
#define APCERT_BISECTION_HPP_

#include <concepts>

namespace apcert {

inline constexpr double kDefaultTol = 1e-10;
inline constexpr int kMaxBisectionSteps = 200;

struct Bracket {
  double lower = 0.0;  // keep_lower(lower) held
  double upper = 1.0;  // keep_lower(upper) failed
  int steps = 0;

  double midpoint() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

// Midpoint bisection for a predicate that is true to the left of a single
// crossing and false to its right. Halves [lower, upper] until the width
// drops below tol or kMaxBisectionSteps is reached.
template <typename Pred>
  requires std::predicate<Pred, double>
Bracket bisect(Pred&& keep_lower, double lower, double upper, double tol) {
  Bracket b{lower, upper, 0};
  while (b.width() >= tol && b.steps < kMaxBisectionSteps) {
    const double mid = b.midpoint();
    if (mid <= b.lower || mid >= b.upper) break;  // no representable midpoint left
    if (keep_lower(mid)) {
      b.lower = mid;
    } else {
      b.upper = mid;
    }
    ++b.steps;
  }
  return b;
}

}  // namespace apcert

#endif  // APCERT_BISECTION_HPP_
