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

#ifndef LOSSCAL_SCORING_H_
#define LOSSCAL_SCORING_H_

#include <span>
#include <vector>

#include "losscal/losses.h"

namespace losscal {

// Per-class confidence scores. Entries lie in [0,1] but need not sum to one.
using ScoreVector = std::vector<double>;

// A probability vector over n >= 2 labels.
class PosteriorBelief {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Throws DomainError if an entry is negative or the sum is off by more
  // than kSumTolerance.
  explicit PosteriorBelief(std::vector<double> probs);

  // Divides by the sum first. Entries must be nonnegative with positive sum.
  static PosteriorBelief normalized(std::vector<double> weights);
  static PosteriorBelief binary(double gamma1) {
    return PosteriorBelief({1.0 - gamma1, gamma1});
  }

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int y) const { return probs_[y]; }
  double gamma1() const { return probs_[1]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// Optimal score for the positive-class weighted loss at posterior gamma1:
//   beta1 * gamma1 / (1 - beta1 - gamma1 + 2 beta1 gamma1).
// Symmetric in its arguments and strictly increasing in gamma1. gamma1 may
// be 0 or 1 (the rule extends continuously).
double optimal_score_binary(double beta1, double gamma1);

// c_y(gamma) = gamma_y beta(y,y) / sum_{y'} gamma_{y'} beta(y',y).
ScoreVector optimal_score_multi(const WeightMatrix& beta,
                                const PosteriorBelief& gamma);

// Inverse of optimal_score_binary:
//   (1 - beta1) a1 / (beta1 + (1 - 2 beta1) a1).
double loss_correct_binary(double beta1, double a1);

struct InversionOptions {
  double residual_tol = 1e-6;
  double negativity_tol = 1e-10;
};

// Recovers the posterior whose optimal scores are `scores`, by solving the
// homogeneous system gamma_y beta(y,y) = a_y sum_{y'} gamma_{y'} beta(y',y)
// together with sum(gamma) = 1 in the least-squares sense. Throws
// NoConsistentPosterior when the residual or negativity tolerance is
// exceeded.
PosteriorBelief loss_correct_multi(const WeightMatrix& beta,
                                   std::span<const double> scores,
                                   const InversionOptions& options = {});

// Brute-force minimizer of pos_weight * L(a,1) + neg_weight * L(a,0) over an
// evenly spaced grid on [eps, 1 - eps]. Loss tables are built once, so a
// single instance can answer many queries.
class GridOracle {
 public:
  GridOracle(const LossSpec& spec, int grid_size);

  double minimize(double pos_weight, double neg_weight) const;
  int grid_size() const { return static_cast<int>(grid_.size()); }
  double step() const { return step_; }

 private:
  std::vector<double> grid_;
  std::vector<double> loss_pos_;
  std::vector<double> loss_neg_;
  double step_;
};

// Grid argmin of gamma1 beta1 L(a,1) + (1-gamma1)(1-beta1) L(a,0).
double argmin_oracle_binary(const LossSpec& spec, double beta1, double gamma1,
                            int grid_size);

// Coordinate-wise grid argmin of the expected multi-class weighted loss.
// The objective separates across score coordinates.
ScoreVector argmin_oracle_multi(const LossSpec& spec, const WeightMatrix& beta,
                                const PosteriorBelief& gamma, int grid_size);

}  // namespace losscal

#endif  // LOSSCAL_SCORING_H_
