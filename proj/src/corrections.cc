// Copyright 2026 The losscal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "losscal/corrections.h"

#include <cmath>
#include <string>

#include "losscal/error.h"
#include "losscal/losses.h"

namespace losscal {
namespace {

void check_delta(double delta) {
  if (!(delta > 0.0) || delta == HUGE_VAL) {
    throw DomainError("delta must be positive and finite, got " +
                      std::to_string(delta));
  }
}

}  // namespace

PriorShiftSpec::PriorShiftSpec(double delta) : delta(delta) {
  check_delta(delta);
}

double prior_shift_correct(double delta, double a1) {
  check_delta(delta);
  if (!(a1 >= 0.0 && a1 <= 1.0)) {
    throw DomainError("a1 must lie in [0,1], got " + std::to_string(a1));
  }
  if (a1 == 0.0 || a1 == 1.0) return a1;
  return delta * a1 / (1.0 + (delta - 1.0) * a1);
}

double beta_to_delta(double beta1) {
  check_beta1(beta1);
  return (1.0 - beta1) / beta1;
}

double delta_to_beta(double delta) {
  check_delta(delta);
  return 1.0 / (1.0 + delta);
}

}  // namespace losscal
