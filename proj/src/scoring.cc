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

#include "losscal/scoring.h"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "losscal/error.h"

namespace losscal {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0,1], got " +
                      std::to_string(p));
  }
}

void check_dimensions(const WeightMatrix& beta, std::size_t n) {
  if (static_cast<int>(n) != beta.size()) {
    throw DimensionMismatch("weight matrix is " + std::to_string(beta.size()) +
                            "x" + std::to_string(beta.size()) + " but got " +
                            std::to_string(n) + " entries");
  }
}

}  // namespace

PosteriorBelief::PosteriorBelief(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw DimensionMismatch("posterior needs at least two labels");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw DomainError("posterior entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw DomainError("posterior does not sum to one (sum = " +
                      std::to_string(sum) + ")");
  }
}

PosteriorBelief PosteriorBelief::normalized(std::vector<double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0.0)) throw DomainError("weights must have a positive sum");
  for (double& w : weights) w /= sum;
  return PosteriorBelief(std::move(weights));
}

double optimal_score_binary(double beta1, double gamma1) {
  check_beta1(beta1);
  check_probability(gamma1, "gamma1");
  if (gamma1 == 0.0 || gamma1 == 1.0) return gamma1;
  // Both terms are symmetric in the arguments, and gamma1 = 0.5 returns
  // beta1 exactly.
  const double product = beta1 * gamma1;
  return product / (product + (1.0 - beta1) * (1.0 - gamma1));
}

ScoreVector optimal_score_multi(const WeightMatrix& beta,
                                const PosteriorBelief& gamma) {
  const int n = beta.size();
  check_dimensions(beta, gamma.size());
  ScoreVector scores(n);
  for (int y = 0; y < n; ++y) {
    double denom = 0.0;
    for (int other = 0; other < n; ++other) denom += gamma[other] * beta(other, y);
    scores[y] = gamma[y] * beta(y, y) / denom;
  }
  return scores;
}

double loss_correct_binary(double beta1, double a1) {
  check_beta1(beta1);
  check_probability(a1, "a1");
  if (a1 == 0.0 || a1 == 1.0) return a1;
  // The denominator is linear in a1 and equals beta1 at 0 and 1-beta1 at 1.
  return (1.0 - beta1) * a1 / (beta1 + (1.0 - 2.0 * beta1) * a1);
}

PosteriorBelief loss_correct_multi(const WeightMatrix& beta,
                                   std::span<const double> scores,
                                   const InversionOptions& options) {
  const int n = beta.size();
  check_dimensions(beta, scores.size());
  for (double a : scores) check_probability(a, "score");

  // Rows 0..n-1: M[y][y'] = [y == y'] beta(y,y) - a_y beta(y',y).
  // Row n: the normalization sum(gamma) = 1.
  Eigen::MatrixXd system(n + 1, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  for (int y = 0; y < n; ++y) {
    for (int other = 0; other < n; ++other) {
      system(y, other) =
          (y == other ? beta(y, y) : 0.0) - scores[y] * beta(other, y);
    }
  }
  system.row(n).setOnes();
  rhs(n) = 1.0;

  Eigen::VectorXd gamma = system.colPivHouseholderQr().solve(rhs);

  for (int y = 0; y < n; ++y) {
    if (gamma(y) < -options.negativity_tol) {
      throw NoConsistentPosterior(
          "recovered posterior has negative coordinate " + std::to_string(y) +
          " (" + std::to_string(gamma(y)) + ")");
    }
    if (gamma(y) < 0.0) gamma(y) = 0.0;
  }
  gamma /= gamma.sum();

  const double residual = (system.topRows(n) * gamma).norm();
  if (!(residual <= options.residual_tol)) {
    throw NoConsistentPosterior("scores are not produced by any posterior "
                                "(residual " + std::to_string(residual) + ")");
  }
  return PosteriorBelief(std::vector<double>(gamma.data(), gamma.data() + n));
}

GridOracle::GridOracle(const LossSpec& spec, int grid_size) {
  if (grid_size < 3) throw DomainError("oracle grid needs at least 3 points");
  const double lo = spec.clamp_epsilon;
  const double hi = 1.0 - spec.clamp_epsilon;
  step_ = (hi - lo) / (grid_size - 1);
  grid_.resize(grid_size);
  loss_pos_.resize(grid_size);
  loss_neg_.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double a = i + 1 == grid_size ? hi : lo + i * step_;
    grid_[i] = a;
    loss_pos_[i] = base_loss(spec, a, 1);
    loss_neg_[i] = base_loss(spec, a, 0);
  }
}

double GridOracle::minimize(double pos_weight, double neg_weight) const {
  std::size_t best = 0;
  double best_value = pos_weight * loss_pos_[0] + neg_weight * loss_neg_[0];
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    const double value = pos_weight * loss_pos_[i] + neg_weight * loss_neg_[i];
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  return grid_[best];
}

double argmin_oracle_binary(const LossSpec& spec, double beta1, double gamma1,
                            int grid_size) {
  check_beta1(beta1);
  check_probability(gamma1, "gamma1");
  return GridOracle(spec, grid_size)
      .minimize(gamma1 * beta1, (1.0 - gamma1) * (1.0 - beta1));
}

ScoreVector argmin_oracle_multi(const LossSpec& spec, const WeightMatrix& beta,
                                const PosteriorBelief& gamma, int grid_size) {
  const int n = beta.size();
  check_dimensions(beta, gamma.size());
  const GridOracle oracle(spec, grid_size);
  ScoreVector scores(n);
  for (int y = 0; y < n; ++y) {
    double neg = 0.0;
    for (int other = 0; other < n; ++other) {
      if (other != y) neg += gamma[other] * beta(other, y);
    }
    scores[y] = oracle.minimize(gamma[y] * beta(y, y), neg);
  }
  return scores;
}

}  // namespace losscal
