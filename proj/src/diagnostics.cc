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

#include "losscal/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "losscal/error.h"

namespace losscal {
namespace {

constexpr double kZ95 = 1.959963984540054;

std::vector<std::size_t> rows_sorted_by(const ScoredDataset& data,
                                        int class_index) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) {
                     return data.class_score(l, class_index) <
                            data.class_score(r, class_index);
                   });
  return order;
}

BinPartition equal_count_partition(const ScoredDataset& data, int class_index,
                                   int k) {
  const std::vector<std::size_t> order = rows_sorted_by(data, class_index);
  const std::size_t n = order.size();
  auto score_at = [&](std::size_t pos) {
    return data.class_score(order[pos], class_index);
  };
  BinPartition out;
  std::size_t begin = 0;
  for (int i = 1; i <= k && begin < n; ++i) {
    std::size_t end = i == k ? n
                             : static_cast<std::size_t>(std::llround(
                                   static_cast<double>(i) * n / k));
    if (end <= begin) continue;
    // A run of identical scores crossing the boundary joins the lower bin.
    while (end < n && score_at(end) == score_at(end - 1)) ++end;
    out.bins.emplace_back(order.begin() + begin, order.begin() + end);
    begin = end;
  }
  // Bins swallowed by tie runs count as dropped.
  out.dropped_empty = static_cast<std::size_t>(k) - out.bins.size();
  return out;
}

BinPartition equal_width_partition(const ScoredDataset& data, int class_index,
                                   int k) {
  const std::vector<std::size_t> order = rows_sorted_by(data, class_index);
  std::vector<std::vector<std::size_t>> bins(k);
  for (std::size_t row : order) {
    const double s = data.class_score(row, class_index);
    const int b = std::min(k - 1, static_cast<int>(std::floor(s * k)));
    bins[b].push_back(row);
  }
  BinPartition out;
  for (auto& bin : bins) {
    if (bin.empty()) {
      ++out.dropped_empty;
    } else {
      out.bins.push_back(std::move(bin));
    }
  }
  return out;
}

BinPartition distinct_partition(const ScoredDataset& data, int class_index) {
  const std::vector<std::size_t> order = rows_sorted_by(data, class_index);
  BinPartition out;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (pos == 0 || data.class_score(order[pos], class_index) !=
                        data.class_score(order[pos - 1], class_index)) {
      out.bins.emplace_back();
    }
    out.bins.back().push_back(order[pos]);
  }
  return out;
}

void check_binning(const Binning& binning) {
  if (binning.kind != Binning::Kind::kDistinct && binning.bins < 2) {
    throw DomainError("binning needs at least 2 bins");
  }
}

// Weights as seen by the dataset: binary scalars for width-1 data, a matrix
// otherwise.
WeightSpec weights_for(const ScoredDataset& data, const WeightSpec& weights) {
  if (data.is_binary()) {
    if (!weights.is_binary()) {
      throw DimensionMismatch(
          "binary dataset needs a scalar beta1, not a weight matrix");
    }
    return weights;
  }
  if (weights.is_binary()) {
    if (data.num_classes() != 2) {
      throw DimensionMismatch("scalar beta1 given for a " +
                              std::to_string(data.num_classes()) +
                              "-class dataset");
    }
    return WeightSpec::matrix(WeightMatrix::from_binary(weights.beta1()));
  }
  if (weights.beta().size() != data.num_classes()) {
    throw DimensionMismatch("weight matrix is " +
                            std::to_string(weights.beta().size()) +
                            "-class but dataset has " +
                            std::to_string(data.num_classes()) + " classes");
  }
  return weights;
}

double expected_loss_binary(const LossSpec& loss, double beta1, double pos,
                            double neg, double a) {
  return pos * weighted_loss_binary(loss, beta1, a, 1) +
         neg * weighted_loss_binary(loss, beta1, a, 0);
}

double expected_loss_multi(const LossSpec& loss, const WeightMatrix& beta,
                           std::span<const double> label_weights,
                           std::span<const double> a) {
  double total = 0.0;
  for (std::size_t y = 0; y < label_weights.size(); ++y) {
    if (label_weights[y] > 0.0) {
      total += label_weights[y] *
               weighted_loss_multi(loss, beta, a, static_cast<int>(y));
    }
  }
  return total;
}

}  // namespace

BinPartition partition_by_score(const ScoredDataset& data, int class_index,
                                const Binning& binning) {
  check_binning(binning);
  switch (binning.kind) {
    case Binning::Kind::kEqualCount:
      return equal_count_partition(data, class_index, binning.bins);
    case Binning::Kind::kEqualWidth:
      return equal_width_partition(data, class_index, binning.bins);
    case Binning::Kind::kDistinct:
      return distinct_partition(data, class_index);
  }
  throw InvariantViolation("unhandled binning kind");
}

BinPartition partition_by_vector(const ScoredDataset& data,
                                 const Binning& binning) {
  check_binning(binning);
  if (data.is_binary()) return partition_by_score(data, 1, binning);
  const int n = data.score_width();

  std::map<std::vector<double>, std::vector<std::size_t>> by_vector;
  std::map<std::vector<int>, std::vector<std::size_t>> by_cell;
  if (binning.kind == Binning::Kind::kDistinct) {
    for (std::size_t row = 0; row < data.size(); ++row) {
      const auto s = data.scores(row);
      by_vector[std::vector<double>(s.begin(), s.end())].push_back(row);
    }
    BinPartition out;
    for (auto& [key, rows] : by_vector) out.bins.push_back(std::move(rows));
    return out;
  }

  const int per_axis = std::max(
      1, std::min(binning.bins,
                  static_cast<int>(std::floor(
                      std::pow(static_cast<double>(kMaxCells), 1.0 / n) +
                      1e-9))));
  std::vector<std::vector<int>> cell(data.size(), std::vector<int>(n, 0));
  if (per_axis > 1) {
    const Binning axis{binning.kind, per_axis};
    for (int c = 0; c < n; ++c) {
      const BinPartition p = partition_by_score(data, c, axis);
      for (std::size_t b = 0; b < p.bins.size(); ++b) {
        for (std::size_t row : p.bins[b]) cell[row][c] = static_cast<int>(b);
      }
    }
  }
  for (std::size_t row = 0; row < data.size(); ++row) {
    by_cell[cell[row]].push_back(row);
  }

  BinPartition out;
  for (auto& [key, rows] : by_cell) {
    if (rows.size() < kMinCellRows && !out.bins.empty()) {
      auto& prev = out.bins.back();
      prev.insert(prev.end(), rows.begin(), rows.end());
    } else {
      out.bins.push_back(std::move(rows));
    }
  }
  if (out.bins.size() > 1 && out.bins.front().size() < kMinCellRows) {
    auto& next = out.bins[1];
    next.insert(next.end(), out.bins.front().begin(), out.bins.front().end());
    out.bins.erase(out.bins.begin());
  }
  for (auto& bin : out.bins) std::sort(bin.begin(), bin.end());
  return out;
}

double binomial_half_width(double freq, std::size_t count) {
  return kZ95 * std::sqrt(freq * (1.0 - freq) / static_cast<double>(count));
}

CalibrationCurve curve_from_partition(const ScoredDataset& data,
                                      int class_index,
                                      const BinPartition& partition) {
  CalibrationCurve curve;
  curve.dropped_empty = partition.dropped_empty;
  for (const auto& rows : partition.bins) {
    if (rows.empty()) {
      ++curve.dropped_empty;
      continue;
    }
    double score_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t row : rows) {
      score_sum += data.class_score(row, class_index);
      if (data.label(row) == class_index) ++hits;
    }
    const double count = static_cast<double>(rows.size());
    const double freq = hits / count;
    const double half = binomial_half_width(freq, rows.size());
    curve.bins.push_back({score_sum / count, freq, rows.size(),
                          std::max(0.0, freq - half),
                          std::min(1.0, freq + half)});
  }
  return curve;
}

CalibrationCurve build_curve(const ScoredDataset& data, int class_index,
                             const Binning& binning) {
  if (data.size() == 0) throw EmptyDataset();
  if (class_index < 0 || class_index >= data.num_classes()) {
    throw DomainError("class index " + std::to_string(class_index) +
                      " out of range");
  }
  const double first = data.class_score(0, class_index);
  bool all_same = true;
  for (std::size_t row = 1; row < data.size() && all_same; ++row) {
    all_same = data.class_score(row, class_index) == first;
  }
  if (all_same) {
    BinPartition single;
    single.bins.emplace_back(data.size());
    std::iota(single.bins[0].begin(), single.bins[0].end(), std::size_t{0});
    CalibrationCurve curve = curve_from_partition(data, class_index, single);
    curve.degenerate = true;
    return curve;
  }
  return curve_from_partition(data, class_index,
                              partition_by_score(data, class_index, binning));
}

std::vector<CurvePoint> theoretical_curve(double beta1,
                                          std::span<const double> gamma_grid) {
  std::vector<CurvePoint> out;
  out.reserve(gamma_grid.size());
  for (double gamma : gamma_grid) {
    out.push_back({optimal_score_binary(beta1, gamma), gamma});
  }
  return out;
}

double expected_calibration_error(const CalibrationCurve& curve) {
  std::size_t total = 0;
  double weighted = 0.0;
  for (const CurveBin& bin : curve.bins) {
    total += bin.count;
    weighted += bin.count * std::abs(bin.freq - bin.mean_score);
  }
  return total == 0 ? 0.0 : weighted / static_cast<double>(total);
}

double RegretReport::default_tolerance() const {
  std::size_t smallest = 0;
  for (const RegretBin& bin : bins) {
    if (smallest == 0 || bin.count < smallest) smallest = bin.count;
  }
  if (smallest == 0) return 5e-3;
  return std::max(5e-3, 3.0 / std::sqrt(static_cast<double>(smallest)));
}

RegretReport regret_for_partition(const ScoredDataset& data,
                                  const LossSpec& loss,
                                  const WeightSpec& weights,
                                  const BinPartition& partition,
                                  const RegretMode& mode, RegretForm form) {
  if (data.size() == 0) throw EmptyDataset();
  const WeightSpec w = weights_for(data, weights);
  const int n = data.num_classes();
  const int width = data.score_width();
  const double total = static_cast<double>(data.size());
  const bool joint = form == RegretForm::kJoint;

  std::optional<GridOracle> oracle;
  if (mode.kind == RegretMode::Kind::kGridSearch) {
    oracle.emplace(loss, mode.grid_size);
  }

  RegretReport report;
  report.dropped_empty = partition.dropped_empty;
  double regret_sum = 0.0;
  std::size_t counted = 0;

  for (const auto& rows : partition.bins) {
    if (rows.empty()) {
      ++report.dropped_empty;
      continue;
    }
    const double count = static_cast<double>(rows.size());
    std::vector<double> label_counts(n, 0.0);
    ScoreVector mean(width, 0.0);
    for (std::size_t row : rows) {
      label_counts[data.label(row)] += 1.0;
      const auto s = data.scores(row);
      for (int c = 0; c < width; ++c) mean[c] += s[c];
    }
    for (double& m : mean) m /= count;

    // Weights on the label terms: P(y|bin), or P(bin, y) in joint form.
    std::vector<double> label_weights(n);
    for (int y = 0; y < n; ++y) {
      label_weights[y] = label_counts[y] / (joint ? total : count);
    }
    const double scale = joint ? count / total : 1.0;

    RegretBin bin;
    bin.count = rows.size();
    bin.bin_score = mean;
    bin.label_freq.resize(n);
    for (int y = 0; y < n; ++y) bin.label_freq[y] = label_counts[y] / count;

    double realized;
    double minimal;
    if (w.is_binary()) {
      const double beta1 = w.beta1();
      const double pos = label_weights[1];
      const double neg = label_weights[0];
      double best;
      if (oracle) {
        best = oracle->minimize(pos * beta1, neg * (1.0 - beta1));
      } else if (joint) {
        best = beta1 * pos / (beta1 * pos + (1.0 - beta1) * neg);
      } else {
        best = optimal_score_binary(beta1, pos);
      }
      realized = expected_loss_binary(loss, beta1, pos, neg, mean[0]);
      minimal = expected_loss_binary(loss, beta1, pos, neg, best);
      bin.argmin_score = {best};
    } else {
      const WeightMatrix& beta = w.beta();
      ScoreVector best(n);
      if (oracle) {
        for (int y = 0; y < n; ++y) {
          double other = 0.0;
          for (int o = 0; o < n; ++o) {
            if (o != y) other += label_weights[o] * beta(o, y);
          }
          best[y] = oracle->minimize(label_weights[y] * beta(y, y), other);
        }
      } else if (joint) {
        for (int y = 0; y < n; ++y) {
          double denom = 0.0;
          for (int o = 0; o < n; ++o) denom += label_weights[o] * beta(o, y);
          best[y] = label_weights[y] * beta(y, y) / denom;
        }
      } else {
        best = optimal_score_multi(beta, PosteriorBelief(label_weights));
      }
      realized = expected_loss_multi(loss, beta, label_weights, mean);
      minimal = expected_loss_multi(loss, beta, label_weights, best);
      bin.argmin_score = std::move(best);
    }
    realized /= scale;
    minimal /= scale;

    // The emitted score is itself a candidate, so regret is never negative.
    if (minimal > realized) {
      minimal = realized;
      bin.argmin_score = mean;
    }
    bin.realized_loss = realized;
    bin.minimal_loss = minimal;
    bin.regret = realized - minimal;

    report.max_regret = std::max(report.max_regret, bin.regret);
    regret_sum += bin.regret * count;
    counted += rows.size();
    report.bins.push_back(std::move(bin));
  }
  if (report.bins.empty()) throw EmptyDataset();
  report.mean_regret = regret_sum / static_cast<double>(counted);
  return report;
}

RegretReport regret_test(const ScoredDataset& data, const LossSpec& loss,
                         const WeightSpec& weights, const Binning& binning,
                         const RegretMode& mode, RegretForm form) {
  if (data.size() == 0) throw EmptyDataset();
  weights_for(data, weights);
  return regret_for_partition(data, loss, weights,
                              partition_by_vector(data, binning), mode, form);
}

SbrVerdict verify_sbr(const ScoredDataset& data, const LossSpec& loss,
                      const WeightSpec& weights, double tolerance,
                      const Binning& binning, const RegretMode& mode) {
  const BinPartition partition = partition_by_vector(data, binning);
  SbrVerdict verdict;
  verdict.report =
      regret_for_partition(data, loss, weights, partition, mode);
  verdict.has_sbr = verdict.report.loss_calibrated(tolerance);
  if (!verdict.has_sbr) return verdict;

  const int n = data.num_classes();
  const int m = static_cast<int>(verdict.report.bins.size());
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(m, n);
  int s = 0;
  for (const auto& rows : partition.bins) {
    if (rows.empty()) continue;
    for (std::size_t row : rows) joint(s, data.label(row)) += 1.0;
    ++s;
  }
  Eigen::VectorXd label_totals = joint.colwise().sum().transpose();
  Eigen::VectorXd prior = label_totals / static_cast<double>(data.size());
  Eigen::MatrixXd conditionals(m, n);
  for (int y = 0; y < n; ++y) {
    if (label_totals(y) > 0.0) {
      conditionals.col(y) = joint.col(y) / label_totals(y);
    } else {
      // Unobserved label: prior 0, any signal distribution will do.
      conditionals.col(y).setConstant(1.0 / m);
    }
  }
  verdict.canonical.emplace(std::move(prior), std::move(conditionals));
  for (const RegretBin& bin : verdict.report.bins) {
    verdict.signal_scores.push_back(bin.bin_score);
  }
  return verdict;
}

}  // namespace losscal
