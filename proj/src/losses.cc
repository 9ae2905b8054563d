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

#include "losscal/losses.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "losscal/error.h"

namespace losscal {
namespace {

double clamp_score(const LossSpec& spec, double score) {
  return std::clamp(score, spec.clamp_epsilon, 1.0 - spec.clamp_epsilon);
}

void check_outcome(int outcome) {
  if (outcome != 0 && outcome != 1) {
    throw DomainError("binary outcome must be 0 or 1, got " +
                      std::to_string(outcome));
  }
}

}  // namespace

LossFamily parse_loss_family(std::string_view name) {
  if (name == "log") return LossFamily::kLog;
  if (name == "brier") return LossFamily::kBrier;
  throw DomainError("unknown loss family '" + std::string(name) +
                    "' (expected log or brier)");
}

std::string_view loss_family_name(LossFamily family) {
  return family == LossFamily::kLog ? "log" : "brier";
}

double weight_function(const LossSpec& spec, double score) {
  switch (spec.family) {
    case LossFamily::kLog:
      return 1.0 / (score * (1.0 - score));
    case LossFamily::kBrier:
      return 2.0;
  }
  return 0.0;
}

double base_loss(const LossSpec& spec, double score, int outcome) {
  check_outcome(outcome);
  const double a = clamp_score(spec, score);
  switch (spec.family) {
    case LossFamily::kLog:
      return outcome == 1 ? -std::log(a) : -std::log1p(-a);
    case LossFamily::kBrier: {
      const double d = a - outcome;
      return d * d;
    }
  }
  return 0.0;
}

double loss_derivative(const LossSpec& spec, double score, int outcome) {
  check_outcome(outcome);
  if (!(score > spec.clamp_epsilon && score < 1.0 - spec.clamp_epsilon)) {
    throw DomainError("loss derivative is undefined at the clamp boundary");
  }
  const double w = weight_function(spec, score);
  return outcome == 1 ? w * (score - 1.0) : w * score;
}

void check_beta1(double beta1) {
  if (!(beta1 > 0.0 && beta1 < 1.0)) {
    throw DomainError("beta1 must lie strictly inside (0,1), got " +
                      std::to_string(beta1));
  }
}

double weighted_loss_binary(const LossSpec& spec, double beta1, double score1,
                            int label) {
  check_beta1(beta1);
  const double loss = base_loss(spec, score1, label);
  return label == 1 ? beta1 * loss : (1.0 - beta1) * loss;
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd beta) : beta_(std::move(beta)) {
  if (beta_.rows() != beta_.cols()) {
    throw DimensionMismatch("weight matrix must be square");
  }
  if (beta_.rows() < 2) {
    throw DimensionMismatch("weight matrix needs at least 2 classes");
  }
  // NaN fails the comparison as well.
  if (!(beta_.array() > 0.0).all()) {
    throw DomainError("weight matrix entries must be strictly positive");
  }
}

WeightMatrix WeightMatrix::from_binary(double beta1) {
  check_beta1(beta1);
  Eigen::MatrixXd m(2, 2);
  m << 1.0 - beta1, 1.0 - beta1, beta1, beta1;
  return WeightMatrix(std::move(m));
}

WeightMatrix WeightMatrix::ones(int n) {
  return WeightMatrix(Eigen::MatrixXd::Ones(n, n));
}

double weighted_loss_component(const LossSpec& spec, const WeightMatrix& beta,
                               int label, int coordinate, double score) {
  return beta(label, coordinate) *
         base_loss(spec, score, label == coordinate ? 1 : 0);
}

double weighted_loss_multi(const LossSpec& spec, const WeightMatrix& beta,
                           std::span<const double> scores, int label) {
  const int n = beta.size();
  if (static_cast<int>(scores.size()) != n) {
    throw DimensionMismatch("expected " + std::to_string(n) +
                            " scores, got " + std::to_string(scores.size()));
  }
  if (label < 0 || label >= n) {
    throw DomainError("label " + std::to_string(label) + " out of range");
  }
  double total = 0.0;
  for (int c = 0; c < n; ++c) {
    total += weighted_loss_component(spec, beta, label, c, scores[c]);
  }
  return total;
}

WeightSpec WeightSpec::binary(double beta1) {
  check_beta1(beta1);
  return WeightSpec(BinaryWeight{beta1});
}

WeightSpec WeightSpec::matrix(WeightMatrix beta) {
  return WeightSpec(std::move(beta));
}

double WeightSpec::beta1() const {
  if (!is_binary()) throw DomainError("weight spec is a matrix, not binary");
  return std::get<BinaryWeight>(value_).beta1;
}

const WeightMatrix& WeightSpec::beta() const {
  if (is_binary()) throw DomainError("weight spec is binary, not a matrix");
  return std::get<WeightMatrix>(value_);
}

int WeightSpec::num_classes() const {
  return is_binary() ? 2 : beta().size();
}

double WeightSpec::equivalent_delta() const {
  const double b = beta1();
  return (1.0 - b) / b;
}

}  // namespace losscal
