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

#ifndef APCERT_ERRORS_HPP_
#define APCERT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace apcert {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Bisection bracket lost its sign invariant.
class RootError : public std::runtime_error {
 public:
  RootError(const std::string& what, int k, int l, double lower, double upper)
      : std::runtime_error(what), k_(k), l_(l), lower_(lower), upper_(upper) {}

  int k() const { return k_; }
  int l() const { return l_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  int k_;
  int l_;
  double lower_;
  double upper_;
};

// Linear program reported infeasible or unbounded, or failed to build.
class LpError : public std::runtime_error {
 public:
  explicit LpError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace apcert

#endif  // APCERT_ERRORS_HPP_
