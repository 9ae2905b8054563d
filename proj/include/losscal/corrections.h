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

#ifndef LOSSCAL_CORRECTIONS_H_
#define LOSSCAL_CORRECTIONS_H_

namespace losscal {

// Ratio of positive to negative instances used when resampling.
struct PriorShiftSpec {
  explicit PriorShiftSpec(double delta);
  double delta;
};

// Prior-shift correction for scores from a model trained on resampled data:
//   delta a1 / (1 + (delta - 1) a1).
double prior_shift_correct(double delta, double a1);
inline double prior_shift_correct(const PriorShiftSpec& spec, double a1) {
  return prior_shift_correct(spec.delta, a1);
}

// delta = (1 - beta1) / beta1, the resampling ratio whose correction equals
// the loss-correction for positive-class weight beta1.
double beta_to_delta(double beta1);
// beta1 = 1 / (1 + delta).
double delta_to_beta(double delta);

}  // namespace losscal

#endif  // LOSSCAL_CORRECTIONS_H_
