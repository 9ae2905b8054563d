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

#ifndef LOSSCAL_CLI_H_
#define LOSSCAL_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "losscal/diagnostics.h"
#include "losscal/io.h"
#include "losscal/losses.h"

namespace losscal::cli {

enum class Command { kCorrect, kCurve, kDiagnose, kSimulate, kCompare };

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kPartialFailure = 2,
  kInternalError = 3,
};

struct RunConfig {
  Command command = Command::kCorrect;
  std::filesystem::path input;
  // Empty means standard output.
  std::filesystem::path output;
  std::optional<FileFormat> format;
  LossFamily loss = LossFamily::kLog;

  // Weights: at most one of beta / beta_matrix / delta, except for compare,
  // which takes beta and delta together.
  std::optional<double> beta;
  std::optional<std::filesystem::path> beta_matrix;
  std::optional<double> delta;

  Binning binning = Binning::equal_count(10);
  std::optional<double> tolerance;
  // Grid-search regret instead of the closed forms when set.
  std::optional<int> grid_size;
  int class_index = 1;
  std::optional<std::filesystem::path> svg;

  // simulate
  std::uint64_t seed = 0;
  bool sidecar = false;
  std::size_t rows = 100000;
  double positive_rate = 0.02;
  int signals = 10;
  double informativeness = 1.0;
  std::optional<std::filesystem::path> experiment;
};

// Runs one command. Data goes to files or `out`; diagnostics go to `err`.
// Never throws: errors become exit codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_correct(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_curve(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_diagnose(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_compare(const RunConfig& config, std::ostream& out, std::ostream& err);

// Resolves the weight flags into a WeightSpec. A delta becomes
// beta1 = 1 / (1 + delta). Throws DomainError unless exactly one is set.
WeightSpec resolve_weights(const RunConfig& config);

}  // namespace losscal::cli

#endif  // LOSSCAL_CLI_H_
