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

#include "losscal/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "losscal/error.h"

namespace losscal {
namespace {

constexpr double kRangeSlack = 1e-9;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double checked_score(double value, std::size_t line) {
  if (!(value >= -kRangeSlack && value <= 1.0 + kRangeSlack)) {
    throw RangeError(line, "score " + format_double(value) +
                               " outside [0,1]");
  }
  return std::clamp(value, 0.0, 1.0);
}

int checked_label(long long value, int num_classes, std::size_t line) {
  if (value < 0 || value >= num_classes) {
    throw RangeError(line, "label " + std::to_string(value) +
                               " out of range for " +
                               std::to_string(num_classes) + " classes");
  }
  return static_cast<int>(value);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

FileFormat parse_format(std::string_view name) {
  if (name == "csv") return FileFormat::kCsv;
  if (name == "jsonl") return FileFormat::kJsonl;
  throw DomainError("unknown format '" + std::string(name) +
                    "' (expected csv or jsonl)");
}

FileFormat format_for_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  return ext == ".jsonl" || ext == ".ndjson" ? FileFormat::kJsonl
                                             : FileFormat::kCsv;
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value,
                                    std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto result = std::from_chars(first, last, value);
  if (field.empty() || result.ec != std::errc() || result.ptr != last ||
      !std::isfinite(value)) {
    throw ParseError(line, "not a number: '" + std::string(field) + "'");
  }
  return value;
}

long long parse_integer(std::string_view field, std::size_t line) {
  field = trim(field);
  long long value = 0;
  const auto result =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || result.ec != std::errc() ||
      result.ptr != field.data() + field.size()) {
    throw ParseError(line, "not an integer: '" + std::string(field) + "'");
  }
  return value;
}

ScoredDataset read_csv(std::istream& in) {
  std::string text;
  std::size_t line_no = 0;
  if (!std::getline(in, text)) throw EmptyDataset("input has no header");
  ++line_no;
  const std::vector<std::string_view> header = split(text);

  std::optional<std::size_t> label_col;
  std::optional<std::size_t> binary_col;
  std::vector<std::optional<std::size_t>> class_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string_view name = header[i];
    if (name == "label") {
      label_col = i;
    } else if (name == "score") {
      binary_col = i;
    } else if (name.starts_with("score_")) {
      const long long c = parse_integer(name.substr(6), line_no);
      if (c < 0 || c > 100000) throw ParseError(line_no, "bad score column");
      if (class_cols.size() <= static_cast<std::size_t>(c)) {
        class_cols.resize(c + 1);
      }
      class_cols[c] = i;
    }
  }
  if (!label_col) throw ParseError(line_no, "missing 'label' column");
  if (binary_col && !class_cols.empty()) {
    throw ParseError(line_no, "mixes 'score' and 'score_<k>' columns");
  }
  if (!binary_col && class_cols.size() < 2) {
    throw ParseError(line_no,
                     "expected 'score' or 'score_0..score_{n-1}' columns");
  }
  for (const auto& col : class_cols) {
    if (!col) throw ParseError(line_no, "score columns are not contiguous");
  }

  const bool binary = binary_col.has_value();
  const int n = binary ? 2 : static_cast<int>(class_cols.size());
  std::vector<double> scores;
  std::vector<int> labels;
  while (std::getline(in, text)) {
    ++line_no;
    if (trim(text).empty()) continue;
    const std::vector<std::string_view> fields = split(text);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    }
    if (binary) {
      scores.push_back(
          checked_score(parse_double(fields[*binary_col], line_no), line_no));
    } else {
      for (const auto& col : class_cols) {
        scores.push_back(
            checked_score(parse_double(fields[*col], line_no), line_no));
      }
    }
    labels.push_back(
        checked_label(parse_integer(fields[*label_col], line_no), n, line_no));
  }
  if (labels.empty()) throw EmptyDataset();
  return binary ? ScoredDataset::binary(std::move(scores), std::move(labels))
                : ScoredDataset::multiclass(n, std::move(scores),
                                            std::move(labels));
}

ScoredDataset read_jsonl(std::istream& in) {
  std::string text;
  std::size_t line_no = 0;
  int width = 0;
  std::vector<double> scores;
  std::vector<int> labels;
  while (std::getline(in, text)) {
    ++line_no;
    if (trim(text).empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (!row.is_object() || !row.contains("label") ||
        !row["label"].is_number_integer()) {
      throw ParseError(line_no, "expected an object with an integer 'label'");
    }
    std::vector<double> values;
    if (row.contains("scores") && row["scores"].is_array()) {
      for (const auto& v : row["scores"]) {
        if (!v.is_number()) throw ParseError(line_no, "non-numeric score");
        values.push_back(v.get<double>());
      }
    } else if (row.contains("score") && row["score"].is_number()) {
      values.push_back(row["score"].get<double>());
    } else {
      throw ParseError(line_no, "missing 'scores' array");
    }
    if (values.empty()) throw ParseError(line_no, "empty 'scores' array");
    if (width == 0) width = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != width) {
      throw ParseError(line_no, "row has " + std::to_string(values.size()) +
                                    " scores, expected " +
                                    std::to_string(width));
    }
    for (double v : values) scores.push_back(checked_score(v, line_no));
    labels.push_back(checked_label(row["label"].get<long long>(),
                                   width == 1 ? 2 : width, line_no));
  }
  if (labels.empty()) throw EmptyDataset();
  return width == 1
             ? ScoredDataset::binary(std::move(scores), std::move(labels))
             : ScoredDataset::multiclass(width, std::move(scores),
                                         std::move(labels));
}

ScoredDataset ingest(const std::filesystem::path& path, FileFormat format) {
  std::ifstream in = open_input(path);
  return format == FileFormat::kCsv ? read_csv(in) : read_jsonl(in);
}

std::vector<std::string> score_column_names(const ScoredDataset& data) {
  if (data.is_binary()) return {"score"};
  std::vector<std::string> names;
  for (int c = 0; c < data.score_width(); ++c) {
    names.push_back("score_" + std::to_string(c));
  }
  return names;
}

void write_csv(std::ostream& out, const ScoredDataset& data,
               const SimulationResult* sidecar) {
  for (const std::string& name : score_column_names(data)) out << name << ',';
  out << "label";
  if (sidecar) {
    out << ",signal";
    if (data.is_binary()) {
      out << ",true_posterior";
    } else {
      for (int c = 0; c < data.num_classes(); ++c) {
        out << ",true_posterior_" << c;
      }
    }
  }
  out << '\n';
  for (std::size_t row = 0; row < data.size(); ++row) {
    for (double s : data.scores(row)) out << format_double(s) << ',';
    out << data.label(row);
    if (sidecar) {
      const PosteriorBelief& gamma = sidecar->true_posterior(row);
      out << ',' << sidecar->signals[row];
      if (data.is_binary()) {
        out << ',' << format_double(gamma.gamma1());
      } else {
        for (double p : gamma.probs()) out << ',' << format_double(p);
      }
    }
    out << '\n';
  }
}

void write_jsonl(std::ostream& out, const ScoredDataset& data,
                 const SimulationResult* sidecar) {
  // Hand-written so numbers keep the 17-digit form.
  for (std::size_t row = 0; row < data.size(); ++row) {
    out << "{\"scores\":[";
    const auto s = data.scores(row);
    for (std::size_t c = 0; c < s.size(); ++c) {
      if (c) out << ',';
      out << format_double(s[c]);
    }
    out << "],\"label\":" << data.label(row);
    if (sidecar) {
      const PosteriorBelief& gamma = sidecar->true_posterior(row);
      out << ",\"signal\":" << sidecar->signals[row];
      if (data.is_binary()) {
        out << ",\"true_posterior\":" << format_double(gamma.gamma1());
      } else {
        out << ",\"true_posterior\":[";
        for (int c = 0; c < gamma.size(); ++c) {
          if (c) out << ',';
          out << format_double(gamma[c]);
        }
        out << ']';
      }
    }
    out << "}\n";
  }
}

WeightMatrix read_weight_matrix(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string text;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, text)) {
    ++line_no;
    if (trim(text).empty()) continue;
    std::vector<double> row;
    for (std::string_view field : split(text)) {
      row.push_back(parse_double(field, line_no));
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  Eigen::MatrixXd beta(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw DimensionMismatch("weight matrix row " + std::to_string(i) +
                              " has " + std::to_string(rows[i].size()) +
                              " entries, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) beta(i, j) = rows[i][j];
  }
  return WeightMatrix(std::move(beta));
}

StatisticalExperiment read_experiment(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    const auto prior = doc.at("prior").get<std::vector<double>>();
    const auto cond =
        doc.at("conditionals").get<std::vector<std::vector<double>>>();
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(
        prior.data(), static_cast<Eigen::Index>(prior.size()));
    Eigen::MatrixXd c(cond.size(), prior.size());
    for (std::size_t s = 0; s < cond.size(); ++s) {
      if (cond[s].size() != prior.size()) {
        throw DimensionMismatch("conditionals row " + std::to_string(s) +
                                " does not match the prior length");
      }
      for (std::size_t y = 0; y < prior.size(); ++y) c(s, y) = cond[s][y];
    }
    return StatisticalExperiment(std::move(p), std::move(c));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("experiment file: ") + e.what());
  }
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const CalibrationCurve& curve,
                       const std::vector<CurvePoint>& theory,
                       std::string_view title) {
  constexpr double kSize = 480.0;
  constexpr double kMargin = 60.0;
  constexpr double kPlot = kSize - 2 * kMargin;

  double lowest = 1.0;
  auto consider = [&](double v) {
    if (v > 0.0) lowest = std::min(lowest, v);
  };
  for (const CurveBin& b : curve.bins) {
    consider(b.mean_score);
    consider(b.freq);
  }
  for (const CurvePoint& p : theory) {
    consider(p.score);
    consider(p.implied_freq);
  }
  const double lo_decade = std::floor(std::log10(lowest));
  const double span = std::max(1.0, -lo_decade);
  auto px = [&](double v) {
    return kMargin + (std::log10(v) - lo_decade) / span * kPlot;
  };
  auto py = [&](double v) {
    return kSize - kMargin - (std::log10(v) - lo_decade) / span * kPlot;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kSize / 2 << "\" y=\"24\" text-anchor=\"middle\">"
      << xml_escape(title) << "</text>\n";
  for (int d = static_cast<int>(lo_decade); d <= 0; ++d) {
    const double v = std::pow(10.0, d);
    svg << "<line x1=\"" << px(v) << "\" y1=\"" << kMargin << "\" x2=\""
        << px(v) << "\" y2=\"" << kSize - kMargin
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<line x1=\"" << kMargin << "\" y1=\"" << py(v) << "\" x2=\""
        << kSize - kMargin << "\" y2=\"" << py(v)
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << px(v) << "\" y=\"" << kSize - kMargin + 16
        << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
    svg << "<text x=\"" << kMargin - 6 << "\" y=\"" << py(v) + 4
        << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  svg << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 16
      << "\" text-anchor=\"middle\">confidence score (log)</text>\n";
  svg << "<text x=\"16\" y=\"" << kSize / 2 << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 16 " << kSize / 2
      << ")\">label frequency (log)</text>\n";
  const double corner = std::pow(10.0, lo_decade);
  svg << "<line x1=\"" << px(corner) << "\" y1=\"" << py(corner) << "\" x2=\""
      << px(1.0) << "\" y2=\"" << py(1.0)
      << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

  if (!theory.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"5,3\" "
        << "points=\"";
    for (const CurvePoint& p : theory) {
      if (p.score > 0.0 && p.implied_freq > 0.0) {
        svg << px(p.score) << ',' << py(p.implied_freq) << ' ';
      }
    }
    svg << "\"/>\n";
  }
  // Bins with zero frequency have no position on a log axis.
  for (const CurveBin& b : curve.bins) {
    if (b.mean_score > 0.0 && b.freq > 0.0) {
      svg << "<circle cx=\"" << px(b.mean_score) << "\" cy=\"" << py(b.freq)
          << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace losscal
