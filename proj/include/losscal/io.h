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

#ifndef LOSSCAL_IO_H_
#define LOSSCAL_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "losscal/dataset.h"
#include "losscal/diagnostics.h"
#include "losscal/losses.h"
#include "losscal/sbr.h"

namespace losscal {

enum class FileFormat { kCsv, kJsonl };

// "csv" or "jsonl".
FileFormat parse_format(std::string_view name);
// jsonl for *.jsonl / *.ndjson paths, csv otherwise.
FileFormat format_for_path(const std::filesystem::path& path);

// 17 significant digits, so every double round-trips exactly.
std::string format_double(double value);

// Strict decimal parse of the whole field. Throws ParseError.
double parse_double(std::string_view field, std::size_t line);
long long parse_integer(std::string_view field, std::size_t line);

// CSV with a header. Binary layout `score,label`; multi-class layout
// `score_0,...,score_{n-1},label`. Other columns are ignored. Scores more
// than 1e-9 outside [0,1] raise RangeError; those within the slack are
// clamped.
ScoredDataset read_csv(std::istream& in);
// One JSON object per line with `scores` (array) and `label`. A one-element
// array (or a scalar `score` field) is a binary row holding a1.
ScoredDataset read_jsonl(std::istream& in);
ScoredDataset ingest(const std::filesystem::path& path, FileFormat format);

// Header fields for the score columns of a dataset.
std::vector<std::string> score_column_names(const ScoredDataset& data);

// Writes `data` in ingest format. When `sidecar` is given, appends the
// signal and true posterior of each row (`true_posterior` for binary data,
// `true_posterior_0..n-1` otherwise).
void write_csv(std::ostream& out, const ScoredDataset& data,
               const SimulationResult* sidecar = nullptr);
void write_jsonl(std::ostream& out, const ScoredDataset& data,
                 const SimulationResult* sidecar = nullptr);

// n rows of n comma-separated values, no header.
WeightMatrix read_weight_matrix(const std::filesystem::path& path);

// Reads {"prior": [...], "conditionals": [[pi(s|0), ..., pi(s|n-1)], ...]},
// one conditionals row per signal.
StatisticalExperiment read_experiment(const std::filesystem::path& path);

// Reliability diagram with log-scaled axes: curve points, the diagonal and,
// when non-empty, a theoretical curve.
std::string render_svg(const CalibrationCurve& curve,
                       const std::vector<CurvePoint>& theory,
                       std::string_view title);

}  // namespace losscal

#endif  // LOSSCAL_IO_H_
