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

#include "losscal/cli.h"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "losscal/corrections.h"
#include "losscal/error.h"
#include "losscal/sbr.h"
#include "losscal/scoring.h"

namespace losscal::cli {
namespace {

using nlohmann::ordered_json;

// Destination for data: the output file, or `fallback` when none is given.
class Sink {
 public:
  Sink(const std::filesystem::path& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error("cannot open " + path.string() + " for writing");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *stream_; }

  void close() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw Error("write failed");
    } else {
      stream_->flush();
    }
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

FileFormat input_format(const RunConfig& config) {
  return config.format ? *config.format : format_for_path(config.input);
}

FileFormat output_format(const RunConfig& config) {
  if (config.format) return *config.format;
  return config.output.empty() ? FileFormat::kCsv
                               : format_for_path(config.output);
}

void check_paths(const RunConfig& config) {
  if (config.input.empty()) throw DomainError("--input is required");
  if (!config.output.empty() &&
      std::filesystem::weakly_canonical(config.input) ==
          std::filesystem::weakly_canonical(config.output)) {
    throw DomainError("--input and --output must be different files");
  }
}

ScoredDataset load_input(const RunConfig& config, std::string* raw = nullptr) {
  check_paths(config);
  const std::string text = read_file(config.input);
  std::istringstream in(text);
  ScoredDataset data = input_format(config) == FileFormat::kCsv
                           ? read_csv(in)
                           : read_jsonl(in);
  if (raw) *raw = text;
  return data;
}

// Weight spec shaped for `data`: scalar for binary data, matrix otherwise.
WeightSpec weights_for_data(const RunConfig& config, const ScoredDataset& data) {
  WeightSpec weights = resolve_weights(config);
  if (data.is_binary() && !weights.is_binary()) {
    throw DimensionMismatch(
        "binary data needs --beta or --delta, not --beta-matrix");
  }
  if (!data.is_binary() && weights.is_binary()) {
    if (data.num_classes() != 2) {
      throw DimensionMismatch("multi-class data needs --beta-matrix");
    }
    return WeightSpec::matrix(WeightMatrix::from_binary(weights.beta1()));
  }
  if (!weights.is_binary() && weights.beta().size() != data.num_classes()) {
    throw DimensionMismatch("--beta-matrix size does not match the data");
  }
  return weights;
}

std::vector<double> theory_grid() {
  // Evenly spaced in log-odds between 1e-4 and 1 - 1e-4.
  constexpr int kPoints = 201;
  const double limit = std::log(1e4 - 1.0);
  std::vector<double> grid;
  for (int i = 0; i < kPoints; ++i) {
    const double t = -limit + 2.0 * limit * i / (kPoints - 1);
    grid.push_back(1.0 / (1.0 + std::exp(-t)));
  }
  return grid;
}

std::string binning_name(const Binning& binning) {
  switch (binning.kind) {
    case Binning::Kind::kEqualCount:
      return "quantile";
    case Binning::Kind::kEqualWidth:
      return "width";
    case Binning::Kind::kDistinct:
      return "distinct";
  }
  return "";
}

ordered_json score_json(const ScoreVector& v) {
  if (v.size() == 1) return v[0];
  return ordered_json(v);
}

}  // namespace

WeightSpec resolve_weights(const RunConfig& config) {
  const int given = static_cast<int>(config.beta.has_value()) +
                    static_cast<int>(config.beta_matrix.has_value()) +
                    static_cast<int>(config.delta.has_value());
  if (given != 1) {
    throw DomainError(
        "exactly one of --beta, --beta-matrix, --delta is required");
  }
  if (config.beta) return WeightSpec::binary(*config.beta);
  if (config.delta) return WeightSpec::binary(delta_to_beta(*config.delta));
  return WeightSpec::matrix(read_weight_matrix(*config.beta_matrix));
}

int run_correct(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::string raw;
  const ScoredDataset data = load_input(config, &raw);
  const WeightSpec weights = weights_for_data(config, data);
  const std::vector<std::string> lines = data_lines(raw);
  const FileFormat format = input_format(config);
  const bool csv = format == FileFormat::kCsv;
  // CSV keeps the header line.
  const std::size_t offset = csv ? 1 : 0;
  if (lines.size() != data.size() + offset) {
    throw InvariantViolation("row count changed between parse passes");
  }

  Sink sink(config.output, out);
  std::ostream& os = *sink;
  std::size_t failures = 0;

  if (data.is_binary()) {
    const double beta1 = weights.beta1();
    if (csv) os << lines[0] << ",corrected\n";
    for (std::size_t row = 0; row < data.size(); ++row) {
      const std::string value =
          format_double(loss_correct_binary(beta1, data.scores(row)[0]));
      const std::string& line = lines[row + offset];
      if (csv) {
        os << line << ',' << value << '\n';
      } else {
        os << line.substr(0, line.rfind('}')) << ",\"corrected\":" << value
           << "}\n";
      }
    }
  } else {
    const WeightMatrix& beta = weights.beta();
    const int n = data.num_classes();
    if (csv) {
      os << lines[0];
      for (int c = 0; c < n; ++c) os << ",corrected_" << c;
      os << ",error\n";
    }
    for (std::size_t row = 0; row < data.size(); ++row) {
      std::string values;
      std::string message;
      try {
        const PosteriorBelief gamma = loss_correct_multi(beta, data.scores(row));
        for (int c = 0; c < n; ++c) {
          if (c || csv) values += ',';
          values += format_double(gamma[c]);
        }
      } catch (const NoConsistentPosterior& e) {
        ++failures;
        message = e.what();
        for (char& ch : message) {
          if (ch == ',' || ch == '"') ch = ';';
        }
      }
      const std::string& line = lines[row + offset];
      if (csv) {
        if (values.empty()) values = std::string(n, ',');
        os << line << values << ',' << message << '\n';
      } else if (message.empty()) {
        os << line.substr(0, line.rfind('}')) << ",\"corrected\":[" << values
           << "]}\n";
      } else {
        os << line.substr(0, line.rfind('}')) << ",\"error\":\"" << message
           << "\"}\n";
      }
    }
  }
  sink.close();
  if (failures > 0) {
    err << "corrected " << data.size() - failures << " of " << data.size()
        << " rows; " << failures << " rows have no consistent posterior\n";
    return kPartialFailure;
  }
  err << "corrected " << data.size() << " rows\n";
  return kSuccess;
}

int run_curve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ScoredDataset data = load_input(config);
  const CalibrationCurve curve =
      build_curve(data, config.class_index, config.binning);
  if (curve.degenerate) {
    err << "warning: all scores are identical; returning a single bin\n";
  }
  if (curve.dropped_empty > 0) {
    err << "warning: " << curve.dropped_empty << " empty bins omitted\n";
  }

  Sink sink(config.output, out);
  std::ostream& os = *sink;
  os << "bin,mean_score,freq,count,lo,hi\n";
  for (std::size_t i = 0; i < curve.bins.size(); ++i) {
    const CurveBin& b = curve.bins[i];
    os << i << ',' << format_double(b.mean_score) << ','
       << format_double(b.freq) << ',' << b.count << ','
       << format_double(b.lo) << ',' << format_double(b.hi) << '\n';
  }
  sink.close();

  std::vector<CurvePoint> theory;
  if (config.beta || config.delta) {
    const double beta1 =
        config.beta ? *config.beta : delta_to_beta(*config.delta);
    theory = theoretical_curve(beta1, theory_grid());
    if (config.output.empty()) {
      err << "warning: theoretical curve needs --output; not written\n";
    } else {
      std::filesystem::path path = config.output;
      path.replace_extension(".theoretical.csv");
      Sink companion(path, out);
      *companion << "score,implied_freq\n";
      for (const CurvePoint& p : theory) {
        *companion << format_double(p.score) << ','
                   << format_double(p.implied_freq) << '\n';
      }
      companion.close();
    }
  }
  if (config.svg) {
    Sink svg(*config.svg, out);
    *svg << render_svg(curve, theory, "reliability diagram");
    svg.close();
  }
  err << "ece " << format_double(expected_calibration_error(curve)) << '\n';
  return kSuccess;
}

int run_diagnose(const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  const ScoredDataset data = load_input(config);
  const WeightSpec weights = weights_for_data(config, data);
  const LossSpec loss{config.loss};
  const RegretMode mode = config.grid_size
                              ? RegretMode::grid_search(*config.grid_size)
                              : RegretMode::analytic();

  // The tolerance depends on the bin counts, so run the test once first.
  const RegretReport report =
      regret_test(data, loss, weights, config.binning, mode);
  const double tolerance =
      config.tolerance ? *config.tolerance : report.default_tolerance();
  const SbrVerdict verdict =
      verify_sbr(data, loss, weights, tolerance, config.binning, mode);

  ordered_json doc;
  doc["loss"] = std::string(loss_family_name(config.loss));
  doc["binning"] = binning_name(config.binning);
  doc["mode"] = config.grid_size ? "grid" : "analytic";
  ordered_json bins = ordered_json::array();
  for (const RegretBin& b : verdict.report.bins) {
    ordered_json jb;
    jb["binScore"] = score_json(b.bin_score);
    jb["count"] = b.count;
    jb["labelFreq"] = b.label_freq;
    jb["realizedLoss"] = b.realized_loss;
    jb["minimalLoss"] = b.minimal_loss;
    jb["regret"] = b.regret;
    jb["argminScore"] = score_json(b.argmin_score);
    bins.push_back(std::move(jb));
  }
  doc["perBin"] = std::move(bins);
  doc["droppedEmpty"] = verdict.report.dropped_empty;
  doc["maxRegret"] = verdict.report.max_regret;
  doc["meanRegret"] = verdict.report.mean_regret;
  doc["tolerance"] = tolerance;
  doc["loss_calibrated"] = verdict.has_sbr;
  if (verdict.canonical) {
    const Eigen::VectorXd& prior = verdict.canonical->prior();
    doc["canonicalSbr"] = {
        {"signalCount", verdict.canonical->num_signals()},
        {"prior", std::vector<double>(prior.data(),
                                      prior.data() + prior.size())}};
  }

  Sink sink(config.output, out);
  *sink << doc.dump(2) << '\n';
  sink.close();
  err << "max regret " << format_double(verdict.report.max_regret)
      << (verdict.has_sbr ? " within " : " exceeds ") << "tolerance "
      << format_double(tolerance) << '\n';
  return kSuccess;
}

int run_simulate(const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  if (config.rows < 1) throw DomainError("--rows must be at least 1");
  StatisticalExperiment experiment =
      config.experiment ? read_experiment(*config.experiment)
                        : imbalance_preset(config.positive_rate, config.signals,
                                           config.informativeness);
  WeightSpec weights = resolve_weights(config);
  if (weights.is_binary() && experiment.num_labels() != 2) {
    throw DimensionMismatch(
        "a multi-class experiment needs --beta-matrix weights");
  }
  const SimulationResult result = simulate(
      {std::move(experiment), LossSpec{config.loss}, std::move(weights),
       config.rows, config.seed});

  Sink sink(config.output, out);
  const SimulationResult* sidecar = config.sidecar ? &result : nullptr;
  if (output_format(config) == FileFormat::kCsv) {
    write_csv(*sink, result.data, sidecar);
  } else {
    write_jsonl(*sink, result.data, sidecar);
  }
  sink.close();
  err << "simulated " << result.data.size() << " rows (seed " << config.seed
      << ")\n";
  return kSuccess;
}

int run_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ScoredDataset data = load_input(config);
  if (!data.is_binary()) {
    throw DimensionMismatch("compare works on binary data only");
  }
  if (config.beta_matrix) {
    throw DomainError("compare takes --beta and/or --delta");
  }
  if (!config.beta && !config.delta) {
    throw DomainError("compare needs --beta, --delta or both");
  }
  const double beta1 = config.beta ? *config.beta : delta_to_beta(*config.delta);
  const double delta = config.delta ? *config.delta : beta_to_delta(beta1);
  check_beta1(beta1);

  Sink sink(config.output, out);
  std::ostream& os = *sink;
  os << "score,loss_corrected,prior_shift_corrected,abs_diff\n";
  double max_diff = 0.0;
  for (std::size_t row = 0; row < data.size(); ++row) {
    const double a = data.scores(row)[0];
    const double loss_corrected = loss_correct_binary(beta1, a);
    const double shifted = prior_shift_correct(delta, a);
    const double diff = std::abs(loss_corrected - shifted);
    max_diff = std::max(max_diff, diff);
    os << format_double(a) << ',' << format_double(loss_corrected) << ','
       << format_double(shifted) << ',' << format_double(diff) << '\n';
  }
  sink.close();
  err << "max_abs_diff " << format_double(max_diff) << '\n';
  return kSuccess;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::kCorrect:
        return run_correct(config, out, err);
      case Command::kCurve:
        return run_curve(config, out, err);
      case Command::kDiagnose:
        return run_diagnose(config, out, err);
      case Command::kSimulate:
        return run_simulate(config, out, err);
      case Command::kCompare:
        return run_compare(config, out, err);
    }
    throw InvariantViolation("unknown command");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace losscal::cli
