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

#ifndef LOSSCAL_LOSSES_H_
#define LOSSCAL_LOSSES_H_

#include <span>
#include <string_view>
#include <variant>

#include <Eigen/Core>

namespace losscal {

enum class LossFamily { kLog, kBrier };

// A differentiable strictly proper binary loss L(a, y), identified by its
// weight function w(a): dL(a,1)/da = w(a)(a-1), dL(a,0)/da = w(a)a.
struct LossSpec {
  LossFamily family = LossFamily::kLog;
  // Scores are clamped into [clamp_epsilon, 1 - clamp_epsilon] before the
  // loss is evaluated.
  double clamp_epsilon = 1e-12;

  static LossSpec log() { return {LossFamily::kLog}; }
  static LossSpec brier() { return {LossFamily::kBrier}; }
};

// Parses "log" or "brier". Throws DomainError otherwise.
LossFamily parse_loss_family(std::string_view name);
std::string_view loss_family_name(LossFamily family);

// w(a): 1/(a(1-a)) for log loss, 2 for Brier.
double weight_function(const LossSpec& spec, double score);

// L(score, outcome) after clamping. outcome must be 0 or 1.
double base_loss(const LossSpec& spec, double score, int outcome);

// Analytic dL/da. Throws DomainError unless score lies strictly inside the
// clamp interval.
double loss_derivative(const LossSpec& spec, double score, int outcome);

// Positive-class reweighting of the base loss:
//   beta1 * y * L(a1, y) + (1 - beta1) * (1 - y) * L(a1, y).
double weighted_loss_binary(const LossSpec& spec, double beta1, double score1,
                            int label);

// Strictly positive n x n class-weight matrix. Entry (y, y') weights the loss
// on score coordinate y' when the true label is y.
class WeightMatrix {
 public:
  explicit WeightMatrix(Eigen::MatrixXd beta);

  // The n = 2 matrix whose coordinate-1 problem is the binary beta1 problem:
  // [[1-beta1, 1-beta1], [beta1, beta1]].
  static WeightMatrix from_binary(double beta1);
  static WeightMatrix ones(int n);

  int size() const { return static_cast<int>(beta_.rows()); }
  double operator()(int label, int coordinate) const {
    return beta_(label, coordinate);
  }
  const Eigen::MatrixXd& matrix() const { return beta_; }

 private:
  Eigen::MatrixXd beta_;
};

// One term of the multi-class weighted loss: beta(label, coordinate) *
// L(score, [label == coordinate]).
double weighted_loss_component(const LossSpec& spec, const WeightMatrix& beta,
                               int label, int coordinate, double score);

// L^beta(a, y) = sum_{y'} beta(y, y') L(a_{y'}, [y == y']).
double weighted_loss_multi(const LossSpec& spec, const WeightMatrix& beta,
                           std::span<const double> scores, int label);

struct BinaryWeight {
  double beta1;
};

// Either a positive-class weight beta1 in (0,1) or a weight matrix.
class WeightSpec {
 public:
  static WeightSpec binary(double beta1);
  static WeightSpec matrix(WeightMatrix beta);

  bool is_binary() const {
    return std::holds_alternative<BinaryWeight>(value_);
  }
  double beta1() const;
  const WeightMatrix& beta() const;
  int num_classes() const;

  // The prior-shift ratio equivalent to beta1: (1 - beta1) / beta1.
  double equivalent_delta() const;

 private:
  explicit WeightSpec(std::variant<BinaryWeight, WeightMatrix> value)
      : value_(std::move(value)) {}
  std::variant<BinaryWeight, WeightMatrix> value_;
};

// Throws DomainError unless beta1 is strictly inside (0,1).
void check_beta1(double beta1);

}  // namespace losscal

#endif  // LOSSCAL_LOSSES_H_
