/*
 * Copyright 2026 The rrmx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "rrmx/common.hpp"

#include <algorithm>

namespace rrmx::agent {

/// Lagrange multiplier for the time-budget constraint, projected onto
/// lambda >= 0 after every ascent step.
struct DualVariable {
  double lambda = 5000.0;
  double step = 15000.0;
  double theta_max = 0.9;

  void validate() const {
    if (!(lambda >= 0)) throw ContractViolation("DualVariable: lambda must be >= 0");
    if (!(step >= 0)) throw ContractViolation("DualVariable: step must be >= 0");
    if (!(theta_max > 0 && theta_max <= 1))
      throw ContractViolation("DualVariable: theta_max must be in (0, 1]");
  }
};

/// usage is the raw (pre-rescaling) sum of dwells over T0.
inline DualVariable dual_update(DualVariable d, double usage) {
  if (!(usage >= 0)) throw ContractViolation("dual_update: usage must be >= 0");
  d.lambda = std::max(0.0, d.lambda + d.step * (usage - d.theta_max));
  return d;
}

}  // namespace rrmx::agent
