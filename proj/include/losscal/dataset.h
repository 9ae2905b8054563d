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

#ifndef LOSSCAL_DATASET_H_
#define LOSSCAL_DATASET_H_

#include <cstddef>
#include <span>
#include <vector>

namespace losscal {

// Rows of (confidence scores, integer label).
//
// Binary datasets store the positive-class score a1 as a single column.
// Multi-class datasets store one score per class, so an n = 2 dataset with
// two score columns is the matrix-weighted framing of a binary problem.
class ScoredDataset {
 public:
  // Throws EmptyDataset, DimensionMismatch or DomainError on invalid input.
  static ScoredDataset binary(std::vector<double> scores,
                              std::vector<int> labels);
  static ScoredDataset multiclass(int num_classes, std::vector<double> scores,
                                  std::vector<int> labels);

  int num_classes() const { return num_classes_; }
  // 1 for binary datasets, num_classes() otherwise.
  int score_width() const { return width_; }
  bool is_binary() const { return width_ == 1; }
  std::size_t size() const { return labels_.size(); }

  std::span<const double> scores(std::size_t row) const {
    return {scores_.data() + row * width_, static_cast<std::size_t>(width_)};
  }
  int label(std::size_t row) const { return labels_[row]; }
  // Score the row assigns to `class_index`; for binary data class 0 gets
  // 1 - a1.
  double class_score(std::size_t row, int class_index) const;

  const std::vector<double>& flat_scores() const { return scores_; }
  const std::vector<int>& labels() const { return labels_; }

  friend bool operator==(const ScoredDataset&, const ScoredDataset&) = default;

 private:
  ScoredDataset(int num_classes, int width, std::vector<double> scores,
                std::vector<int> labels);

  int num_classes_;
  int width_;
  std::vector<double> scores_;
  std::vector<int> labels_;
};

}  // namespace losscal

#endif  // LOSSCAL_DATASET_H_
