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

#ifndef LOSSCAL_DIAGNOSTICS_H_
#define LOSSCAL_DIAGNOSTICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "losscal/dataset.h"
#include "losscal/losses.h"
#include "losscal/sbr.h"
#include "losscal/scoring.h"

namespace losscal {

struct Binning {
  enum class Kind {
    // Equal-count (quantile) bins. Identical scores are never split.
    kEqualCount,
    // Equal-width bins on [0,1].
    kEqualWidth,
    // One bin per distinct score value (or score vector).
    kDistinct,
  };
  Kind kind = Kind::kEqualCount;
  int bins = 10;

  static Binning equal_count(int k = 10) { return {Kind::kEqualCount, k}; }
  static Binning equal_width(int k = 10) { return {Kind::kEqualWidth, k}; }
  static Binning distinct() { return {Kind::kDistinct, 0}; }
};

// Row indices per bin, ordered by increasing score. Empty bins are omitted.
struct BinPartition {
  std::vector<std::vector<std::size_t>> bins;
  std::size_t dropped_empty = 0;
};

// Partitions rows by their score on `class_index`.
BinPartition partition_by_score(const ScoredDataset& data, int class_index,
                                const Binning& binning);

// Partitions rows by the full score vector. Binary data falls back to
// partition_by_score on class 1. For multi-class data, equal-count and
// equal-width bins are built per coordinate, at most 10^4 cells in total,
// and cells under kMinCellRows rows are merged into the preceding cell in
// lexicographic cell order (the following one for the first cell).
inline constexpr std::size_t kMinCellRows = 20;
inline constexpr std::size_t kMaxCells = 10000;
BinPartition partition_by_vector(const ScoredDataset& data,
                                 const Binning& binning);

struct CurveBin {
  double mean_score;
  double freq;
  std::size_t count;
  // 95% normal-approximation interval around freq, clipped to [0,1].
  double lo;
  double hi;
};

struct CalibrationCurve {
  std::vector<CurveBin> bins;
  std::size_t dropped_empty = 0;
  // All scores identical; a single bin is returned.
  bool degenerate = false;
};

CalibrationCurve build_curve(const ScoredDataset& data, int class_index,
                             const Binning& binning = Binning::equal_count());

// Builds the curve for an explicit partition of the rows.
CalibrationCurve curve_from_partition(const ScoredDataset& data,
                                      int class_index,
                                      const BinPartition& partition);

struct CurvePoint {
  double score;
  double implied_freq;
};

// The parametric curve gamma -> (optimal_score_binary(beta1, gamma), gamma).
std::vector<CurvePoint> theoretical_curve(double beta1,
                                          std::span<const double> gamma_grid);

// Count-weighted mean of |freq - mean_score| over the bins.
double expected_calibration_error(const CalibrationCurve& curve);

// Half-width of the 95% normal-approximation interval for a proportion.
double binomial_half_width(double freq, std::size_t count);

struct RegretMode {
  enum class Kind { kAnalytic, kGridSearch };
  Kind kind = Kind::kAnalytic;
  int grid_size = 0;

  static RegretMode analytic() { return {}; }
  static RegretMode grid_search(int grid_size) {
    return {Kind::kGridSearch, grid_size};
  }
};

// Conditional form weights each bin's losses by P(y|bin); the joint form
// weights by P(bin, y) and rescales by 1/P(bin) for reporting. Both give the
// same report.
enum class RegretForm { kConditional, kJoint };

struct RegretBin {
  ScoreVector bin_score;  // count-weighted mean score (length 1 for binary)
  std::size_t count;
  std::vector<double> label_freq;  // P(y | bin)
  double realized_loss;
  double minimal_loss;
  double regret;
  ScoreVector argmin_score;
};

struct RegretReport {
  std::vector<RegretBin> bins;
  double max_regret = 0.0;
  double mean_regret = 0.0;  // count-weighted
  std::size_t dropped_empty = 0;

  // max(5e-3, 3 / sqrt(smallest bin count)).
  double default_tolerance() const;
  bool loss_calibrated(double tolerance) const {
    return max_regret <= tolerance;
  }
};

// Per-bin regret of the emitted scores against the optimal score at the
// bin's empirical label distribution. Throws EmptyDataset or
// DimensionMismatch.
RegretReport regret_test(const ScoredDataset& data, const LossSpec& loss,
                         const WeightSpec& weights,
                         const Binning& binning = Binning::equal_count(),
                         const RegretMode& mode = RegretMode::analytic(),
                         RegretForm form = RegretForm::kConditional);

// Same, over an explicit partition of the rows.
RegretReport regret_for_partition(const ScoredDataset& data,
                                  const LossSpec& loss,
                                  const WeightSpec& weights,
                                  const BinPartition& partition,
                                  const RegretMode& mode = RegretMode::analytic(),
                                  RegretForm form = RegretForm::kConditional);

struct SbrVerdict {
  bool has_sbr = false;
  // Signals are the score bins, pi(s, y) the empirical joint, and the
  // scoring map the identity on bin scores.
  std::optional<StatisticalExperiment> canonical;
  std::vector<ScoreVector> signal_scores;
  RegretReport report;
};

// Loss-calibrated data (max regret within tolerance) has a signal-based
// representation; the canonical one is returned.
SbrVerdict verify_sbr(const ScoredDataset& data, const LossSpec& loss,
                      const WeightSpec& weights, double tolerance,
                      const Binning& binning = Binning::equal_count(),
                      const RegretMode& mode = RegretMode::analytic());

}  // namespace losscal

#endif  // LOSSCAL_DIAGNOSTICS_H_
