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

#ifndef LOSSCAL_SBR_H_
#define LOSSCAL_SBR_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "losscal/dataset.h"
#include "losscal/losses.h"
#include "losscal/scoring.h"

namespace losscal {

// A Blackwell statistical experiment: a prior over n labels and, for each of
// m signals, the likelihood pi(s|y). Conditionals are stored m x n, so every
// column is a distribution over signals.
class StatisticalExperiment {
 public:
  static constexpr double kTolerance = 1e-12;

  // Throws DomainError when the prior or a column of the conditionals is not
  // a distribution, or when some signal has zero marginal probability.
  StatisticalExperiment(Eigen::VectorXd prior, Eigen::MatrixXd conditionals);

  int num_labels() const { return static_cast<int>(prior_.size()); }
  int num_signals() const { return static_cast<int>(conditionals_.rows()); }
  const Eigen::VectorXd& prior() const { return prior_; }
  const Eigen::MatrixXd& conditionals() const { return conditionals_; }
  // pi(s) = sum_y pi(s|y) pi(y).
  double signal_marginal(int signal) const;

 private:
  Eigen::VectorXd prior_;
  Eigen::MatrixXd conditionals_;
};

// Bayes posterior gamma^s_y = pi(s|y) pi(y) / pi(s). Throws UnknownSignal.
PosteriorBelief posterior(const StatisticalExperiment& experiment, int signal);

// The loss-minimizing score for each signal's posterior. Binary weights give
// length-1 vectors holding a1; matrix weights give one score per class.
std::vector<ScoreVector> signal_scores(const StatisticalExperiment& experiment,
                                       const LossSpec& loss,
                                       const WeightSpec& weights);

// Binary experiment with `signal_count` signals whose posterior log-odds are
// evenly spaced around the prior log-odds, half-width
// 2 * informativeness * ln(10). pi(s|1) is proportional to exp(+t_s / 2)
// and pi(s|0) to exp(-t_s / 2), t_s being the log-odds offset; the two
// normalizers coincide because the offsets are symmetric.
StatisticalExperiment imbalance_preset(double positive_rate, int signal_count,
                                       double informativeness);

struct SimulationConfig {
  StatisticalExperiment experiment;
  LossSpec loss;
  WeightSpec weights;
  std::size_t sample_count = 1;
  std::uint64_t seed = 0;
};

struct SimulationResult {
  ScoredDataset data;
  // Sidecar truth: the signal drawn for each row and the posterior of each
  // signal.
  std::vector<int> signals;
  std::vector<PosteriorBelief> signal_posteriors;

  const PosteriorBelief& true_posterior(std::size_t row) const {
    return signal_posteriors[signals[row]];
  }
};

// Rows are generated in chunks of kSimulationChunkRows. Each chunk owns a
// std::mt19937_64 seeded with splitmix64(seed + golden * (chunk + 1)), and a
// uniform double is (draw >> 11) * 2^-53. Labels and signals are drawn by
// inverse CDF over cumulative tables. Output is identical for any chunk
// scheduling.
inline constexpr std::size_t kSimulationChunkRows = 1 << 16;

SimulationResult simulate(const SimulationConfig& config);

}  // namespace losscal

#endif  // LOSSCAL_SBR_H_
