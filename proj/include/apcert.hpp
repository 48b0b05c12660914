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

#ifndef APCERT_APCERT_HPP_
#define APCERT_APCERT_HPP_

#include "apcert/beta_tail.hpp"
#include "apcert/bisection.hpp"
#include "apcert/classic_bounds.hpp"
#include "apcert/errors.hpp"
#include "apcert/grid.hpp"
#include "apcert/io.hpp"
#include "apcert/lower_limits.hpp"
#include "apcert/posterior_bounds.hpp"
#include "apcert/refine.hpp"
#include "apcert/scenario_lab.hpp"
#include "apcert/simplex.hpp"

#endif  // APCERT_APCERT_HPP_
