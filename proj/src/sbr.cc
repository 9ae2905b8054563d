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

#include "losscal/sbr.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <utility>

#include "losscal/error.h"

namespace losscal {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index of the first cumulative entry exceeding u. The last entry is forced
// to 1 so every draw lands somewhere.
int draw_index(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(
      it - cumulative.begin(), static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
}

std::vector<double> cumulative_of(const Eigen::VectorXd& probs) {
  std::vector<double> out(probs.size());
  double running = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    running += probs(i);
    out[i] = running;
  }
  out.back() = 1.0;
  return out;
}

}  // namespace

StatisticalExperiment::StatisticalExperiment(Eigen::VectorXd prior,
                                             Eigen::MatrixXd conditionals)
    : prior_(std::move(prior)), conditionals_(std::move(conditionals)) {
  const Eigen::Index n = prior_.size();
  if (n < 2) throw DimensionMismatch("experiment needs at least two labels");
  if (conditionals_.cols() != n) {
    throw DimensionMismatch("conditionals must have one column per label");
  }
  if (conditionals_.rows() < 1) {
    throw DimensionMismatch("experiment needs at least one signal");
  }
  if (!(prior_.array() >= 0.0).all() ||
      std::abs(prior_.sum() - 1.0) > kTolerance) {
    throw DomainError("prior is not a probability vector");
  }
  for (Eigen::Index y = 0; y < n; ++y) {
    if (!(conditionals_.col(y).array() >= 0.0).all() ||
        std::abs(conditionals_.col(y).sum() - 1.0) > kTolerance) {
      throw DomainError("signal distribution for label " + std::to_string(y) +
                        " is not a probability vector");
    }
  }
  for (int s = 0; s < num_signals(); ++s) {
    if (!(signal_marginal(s) > 0.0)) {
      throw DomainError("signal " + std::to_string(s) +
                        " has zero marginal probability");
    }
  }
}

double StatisticalExperiment::signal_marginal(int signal) const {
  return conditionals_.row(signal).dot(prior_);
}

PosteriorBelief posterior(const StatisticalExperiment& experiment, int signal) {
  if (signal < 0 || signal >= experiment.num_signals()) {
    throw UnknownSignal("signal " + std::to_string(signal) + " not in [0," +
                        std::to_string(experiment.num_signals()) + ")");
  }
  const Eigen::VectorXd joint =
      experiment.conditionals().row(signal).transpose().cwiseProduct(
          experiment.prior());
  return PosteriorBelief::normalized(
      std::vector<double>(joint.data(), joint.data() + joint.size()));
}

std::vector<ScoreVector> signal_scores(const StatisticalExperiment& experiment,
                                       const LossSpec& /*loss*/,
                                       const WeightSpec& weights) {
  // The optimum does not depend on the loss family: w(a) cancels from the
  // first-order condition.
  if (weights.num_classes() != experiment.num_labels()) {
    throw DimensionMismatch("weights and experiment disagree on label count");
  }
  std::vector<ScoreVector> out;
  out.reserve(experiment.num_signals());
  for (int s = 0; s < experiment.num_signals(); ++s) {
    const PosteriorBelief gamma = posterior(experiment, s);
    if (weights.is_binary()) {
      out.push_back({optimal_score_binary(weights.beta1(), gamma.gamma1())});
    } else {
      out.push_back(optimal_score_multi(weights.beta(), gamma));
    }
  }
  return out;
}

StatisticalExperiment imbalance_preset(double positive_rate, int signal_count,
                                       double informativeness) {
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) {
    throw DomainError("positive rate must lie strictly inside (0,1)");
  }
  if (signal_count < 2) throw DomainError("need at least two signals");
  if (!(informativeness >= 0.0 && informativeness <= 1.0)) {
    throw DomainError("informativeness must lie in [0,1]");
  }
  const double half_width = 2.0 * informativeness * std::numbers::ln10;
  Eigen::MatrixXd conditionals(signal_count, 2);
  for (int s = 0; s < signal_count; ++s) {
    const double u = -1.0 + 2.0 * s / (signal_count - 1);
    const double offset = half_width * u;
    conditionals(s, 1) = std::exp(0.5 * offset);
    conditionals(s, 0) = std::exp(-0.5 * offset);
  }
  conditionals.col(0) /= conditionals.col(0).sum();
  conditionals.col(1) /= conditionals.col(1).sum();
  Eigen::VectorXd prior(2);
  prior << 1.0 - positive_rate, positive_rate;
  return StatisticalExperiment(std::move(prior), std::move(conditionals));
}

SimulationResult simulate(const SimulationConfig& config) {
  const StatisticalExperiment& experiment = config.experiment;
  const int n = experiment.num_labels();
  if (config.sample_count < 1) throw DomainError("sample count must be >= 1");
  if (config.weights.num_classes() != n) {
    throw DimensionMismatch("weights and experiment disagree on label count");
  }

  const std::vector<ScoreVector> scores =
      signal_scores(experiment, config.loss, config.weights);
  std::vector<PosteriorBelief> posteriors;
  for (int s = 0; s < experiment.num_signals(); ++s) {
    posteriors.push_back(posterior(experiment, s));
  }

  const std::vector<double> label_cdf = cumulative_of(experiment.prior());
  std::vector<std::vector<double>> signal_cdf;
  for (int y = 0; y < n; ++y) {
    signal_cdf.push_back(cumulative_of(experiment.conditionals().col(y)));
  }

  const std::size_t rows = config.sample_count;
  std::vector<int> labels(rows);
  std::vector<int> signals(rows);
  const std::size_t chunks =
      (rows + kSimulationChunkRows - 1) / kSimulationChunkRows;

  auto run_chunk = [&](std::size_t chunk) {
    std::mt19937_64 rng(
        splitmix64(config.seed + 0x9e3779b97f4a7c15ULL * (chunk + 1)));
    const std::size_t begin = chunk * kSimulationChunkRows;
    const std::size_t end = std::min(rows, begin + kSimulationChunkRows);
    for (std::size_t row = begin; row < end; ++row) {
      const int y = draw_index(label_cdf, uniform01(rng));
      labels[row] = y;
      signals[row] = draw_index(signal_cdf[y], uniform01(rng));
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) run_chunk(c);
  };
  const std::size_t workers = std::min<std::size_t>(
      chunks, std::max(1u, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
  }

  const bool binary = config.weights.is_binary();
  const int width = binary ? 1 : n;
  std::vector<double> flat(rows * width);
  for (std::size_t row = 0; row < rows; ++row) {
    const ScoreVector& a = scores[signals[row]];
    std::copy(a.begin(), a.end(), flat.begin() + row * width);
  }
  ScoredDataset data =
      binary ? ScoredDataset::binary(std::move(flat), std::move(labels))
             : ScoredDataset::multiclass(n, std::move(flat), std::move(labels));
  return {std::move(data), std::move(signals), std::move(posteriors)};
}

}  // namespace losscal
