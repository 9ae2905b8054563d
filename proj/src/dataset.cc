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

#include "losscal/dataset.h"

#include <string>
#include <utility>

#include "losscal/error.h"

namespace losscal {

ScoredDataset::ScoredDataset(int num_classes, int width,
                             std::vector<double> scores,
                             std::vector<int> labels)
    : num_classes_(num_classes),
      width_(width),
      scores_(std::move(scores)),
      labels_(std::move(labels)) {
  if (labels_.empty()) throw EmptyDataset();
  if (num_classes_ < 2) {
    throw DimensionMismatch("a dataset needs at least two classes");
  }
  if (scores_.size() != labels_.size() * static_cast<std::size_t>(width_)) {
    throw DimensionMismatch("score count does not match rows x width");
  }
  for (std::size_t row = 0; row < labels_.size(); ++row) {
    if (labels_[row] < 0 || labels_[row] >= num_classes_) {
      throw DomainError("row " + std::to_string(row) + ": label " +
                        std::to_string(labels_[row]) + " out of range");
    }
  }
  for (double s : scores_) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DomainError("score " + std::to_string(s) + " outside [0,1]");
    }
  }
}

ScoredDataset ScoredDataset::binary(std::vector<double> scores,
                                    std::vector<int> labels) {
  return ScoredDataset(2, 1, std::move(scores), std::move(labels));
}

ScoredDataset ScoredDataset::multiclass(int num_classes,
                                        std::vector<double> scores,
                                        std::vector<int> labels) {
  return ScoredDataset(num_classes, num_classes, std::move(scores),
                       std::move(labels));
}

double ScoredDataset::class_score(std::size_t row, int class_index) const {
  if (class_index < 0 || class_index >= num_classes_) {
    throw DomainError("class index " + std::to_string(class_index) +
                      " out of range");
  }
  if (width_ == 1) {
    const double a1 = scores_[row];
    return class_index == 1 ? a1 : 1.0 - a1;
  }
  return scores_[row * width_ + class_index];
}

}  // namespace losscal
