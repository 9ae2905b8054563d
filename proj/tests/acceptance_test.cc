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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "losscal/cli.h"
#include "losscal/corrections.h"
#include "losscal/diagnostics.h"
#include "losscal/error.h"
#include "losscal/io.h"
#include "losscal/losses.h"
#include "losscal/sbr.h"
#include "losscal/scoring.h"

namespace {

using namespace losscal;

// Fixed before any run; not tuned.
constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kRows = 1000000;
constexpr double kBetas[] = {0.5, 0.9, 0.99};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> grid99() {
  std::vector<double> g;
  for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
  return g;
}

const SimulationResult& simulation(double beta1) {
  static std::vector<std::pair<double, SimulationResult>> cache;
  for (const auto& [b, r] : cache) {
    if (b == beta1) return r;
  }
  cache.emplace_back(beta1, simulate({imbalance_preset(0.02, 10, 1.0),
                                      LossSpec::log(),
                                      WeightSpec::binary(beta1), kRows, kSeed}));
  return cache.back().second;
}

ScoredDataset corrected(const ScoredDataset& data, double beta1) {
  std::vector<double> scores;
  scores.reserve(data.size());
  for (std::size_t row = 0; row < data.size(); ++row) {
    scores.push_back(loss_correct_binary(beta1, data.scores(row)[0]));
  }
  return ScoredDataset::binary(std::move(scores), data.labels());
}

ScoredDataset flip_top_bin(const ScoredDataset& data) {
  std::vector<double> scores = data.flat_scores();
  const double top = *std::max_element(scores.begin(), scores.end());
  for (double& s : scores) {
    if (s == top) s = 1.0 - s;
  }
  return ScoredDataset::binary(std::move(scores), data.labels());
}

ScoredDataset as_two_class(const ScoredDataset& data) {
  std::vector<double> flat;
  flat.reserve(2 * data.size());
  for (std::size_t row = 0; row < data.size(); ++row) {
    flat.push_back(1.0 - data.scores(row)[0]);
    flat.push_back(data.scores(row)[0]);
  }
  return ScoredDataset::multiclass(2, std::move(flat), data.labels());
}

Outcome closed_form_vs_oracle() {
  double binary_err = 0.0;
  for (const LossSpec& loss : {LossSpec::log(), LossSpec::brier()}) {
    const GridOracle oracle(loss, 100001);
    for (int i = 0; i <= 14; ++i) {
      const double b = 0.01 + 0.07 * i;
      for (int j = 0; j <= 14; ++j) {
        const double g = 0.01 + 0.07 * j;
        const double found = oracle.minimize(b * g, (1.0 - b) * (1.0 - g));
        binary_err = std::max(binary_err,
                              std::abs(found - optimal_score_binary(b, g)));
      }
    }
  }

  Eigen::MatrixXd m(3, 3);
  m << 3, 1, 1, 1, 3, 1, 1, 1, 3;
  const WeightMatrix beta(m);
  const int resolution = 400;
  double multi_err = 0.0;
  for (const LossSpec& loss : {LossSpec::log(), LossSpec::brier()}) {
    const GridOracle oracle(loss, 2001);
    for (int i = 1; i < resolution; ++i) {
      for (int j = 1; i + j < resolution; ++j) {
        const double g[3] = {double(i) / resolution, double(j) / resolution,
                             double(resolution - i - j) / resolution};
        const PosteriorBelief gamma(std::vector<double>(g, g + 3));
        const ScoreVector closed = optimal_score_multi(beta, gamma);
        for (int c = 0; c < 3; ++c) {
          double neg = 0.0;
          for (int y = 0; y < 3; ++y) {
            if (y != c) neg += g[y] * beta(y, c);
          }
          const double found = oracle.minimize(g[c] * beta(c, c), neg);
          multi_err = std::max(multi_err, std::abs(found - closed[c]));
        }
      }
    }
  }
  return {binary_err <= 1e-5 && multi_err <= 1e-3,
          "binary max err " + fmt(binary_err) + " (tol 1e-5), n=3 max err " +
              fmt(multi_err) + " (tol 1e-3)"};
}

Outcome round_trip_inversion() {
  double binary_err = 0.0;
  for (double b : grid99()) {
    for (double g : grid99()) {
      binary_err = std::max(
          binary_err,
          std::abs(loss_correct_binary(b, optimal_score_binary(b, g)) - g));
    }
  }

  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> log_weight(-2.0, 2.0);
  std::gamma_distribution<double> unit_gamma(1.0, 1.0);
  double multi_err = 0.0;
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 4;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = std::exp(log_weight(rng));
    }
    std::vector<double> draws(n);
    for (double& d : draws) d = unit_gamma(rng) + 1e-3;
    const PosteriorBelief gamma = PosteriorBelief::normalized(draws);
    const WeightMatrix beta(m);
    try {
      const PosteriorBelief back =
          loss_correct_multi(beta, optimal_score_multi(beta, gamma));
      for (int y = 0; y < n; ++y) {
        multi_err = std::max(multi_err, std::abs(back[y] - gamma[y]));
      }
    } catch (const Error&) {
      ++failures;
    }
  }
  return {binary_err <= 1e-12 && multi_err <= 1e-9 && failures == 0,
          "99x99 max err " + fmt(binary_err) + " (tol 1e-12), 1000 random n<=5 max err " +
              fmt(multi_err) + " (tol 1e-9), " + std::to_string(failures) +
              " inversion failures"};
}

Outcome point_values() {
  int misses = 0;
  for (double b : grid99()) {
    if (optimal_score_binary(b, 0.5) != b) ++misses;
    if (loss_correct_binary(0.5, b) != b) ++misses;
  }
  const double delta_err = std::abs(beta_to_delta(10.0 / 11.0) - 0.1);
  const double beta_err = std::abs(delta_to_beta(0.1) - 10.0 / 11.0);
  return {misses == 0 && delta_err <= 1e-15 && beta_err <= 1e-15,
          std::to_string(misses) +
              " inexact points on the beta grid; |delta(10/11) - 0.1| = " +
              fmt(delta_err) + ", |beta(0.1) - 10/11| = " + fmt(beta_err)};
}

Outcome prior_shift_equivalence() {
  double err = 0.0;
  for (double b : grid99()) {
    for (double a : grid99()) {
      err = std::max(err, std::abs(prior_shift_correct(beta_to_delta(b), a) -
                                   loss_correct_binary(b, a)));
    }
  }
  return {err <= 1e-12, "99x99 max diff " + fmt(err) + " (tol 1e-12)"};
}

Outcome derivative_characterization() {
  const double h = 1e-6;
  double worst = 0.0;
  for (const LossSpec& loss : {LossSpec::log(), LossSpec::brier()}) {
    for (int i = 1; i <= 999; ++i) {
      const double a = i / 1000.0;
      const double w = weight_function(loss, a);
      const double expected[2] = {w * a, w * (a - 1.0)};
      for (int y : {0, 1}) {
        const double fd =
            (base_loss(loss, a + h, y) - base_loss(loss, a - h, y)) / (2 * h);
        worst = std::max(worst, std::abs(fd - expected[y]) /
                                    std::abs(expected[y]));
      }
    }
  }
  return {worst <= 1e-5,
          "max relative err " + fmt(worst) + " over 999 points (tol 1e-5)"};
}

struct BinTally {
  std::size_t inside = 0;
  std::size_t total = 0;
  bool ok() const { return 10 * inside >= 9 * total && total > 0; }
  std::string str() const {
    return std::to_string(inside) + "/" + std::to_string(total);
  }
};

Outcome end_to_end_curves() {
  bool pass = true;
  std::string detail;
  for (double b : kBetas) {
    const SimulationResult& r = simulation(b);
    const CalibrationCurve raw = build_curve(r.data, 1);
    const double raw_ece = expected_calibration_error(raw);
    const ScoredDataset fixed = corrected(r.data, b);
    const CalibrationCurve fixed_curve = build_curve(fixed, 1);
    const double fixed_ece = expected_calibration_error(fixed_curve);

    BinTally diagonal;
    for (const CurveBin& bin : fixed_curve.bins) {
      ++diagonal.total;
      if (bin.mean_score >= bin.lo && bin.mean_score <= bin.hi) ++diagonal.inside;
    }

    // The theoretical frequency of a bin is the mean of the implied
    // frequency over its rows.
    const BinPartition partition =
        partition_by_score(r.data, 1, Binning::equal_count(10));
    const CalibrationCurve raw_curve = curve_from_partition(r.data, 1, partition);
    BinTally theory;
    for (std::size_t k = 0; k < partition.bins.size(); ++k) {
      double implied = 0.0;
      for (std::size_t row : partition.bins[k]) {
        implied += loss_correct_binary(b, r.data.scores(row)[0]);
      }
      implied /= static_cast<double>(partition.bins[k].size());
      const CurveBin& bin = raw_curve.bins[k];
      ++theory.total;
      if (implied >= bin.lo && implied <= bin.hi) ++theory.inside;
    }

    const bool ece_ok = fixed_ece < 0.01 && (b != 0.99 || raw_ece > 0.1);
    pass = pass && ece_ok && diagonal.ok() && theory.ok();
    detail += " b=" + fmt(b) + ": raw ECE " + fmt(raw_ece) + ", corrected ECE " +
              fmt(fixed_ece) + ", diagonal " + diagonal.str() + ", theory " +
              theory.str() + ";";
  }
  detail.pop_back();
  return {pass, detail.substr(1)};
}

Outcome regret_and_sbr() {
  bool pass = true;
  std::string detail;
  for (double b : kBetas) {
    const SimulationResult& r = simulation(b);
    const SbrVerdict ok = verify_sbr(r.data, LossSpec::log(),
                                     WeightSpec::binary(b), 2e-3,
                                     Binning::distinct());
    const SbrVerdict flipped =
        verify_sbr(flip_top_bin(r.data), LossSpec::log(),
                   WeightSpec::binary(b), 2e-3, Binning::distinct());
    pass = pass && ok.has_sbr && ok.report.max_regret <= 2e-3 &&
           !flipped.has_sbr && flipped.report.max_regret > 0.01;
    detail += " b=" + fmt(b) + ": max regret " + fmt(ok.report.max_regret) +
              (ok.has_sbr ? " (SBR)" : " (no SBR)") + ", flipped " +
              fmt(flipped.report.max_regret) +
              (flipped.has_sbr ? " (SBR)" : " (no SBR)") + ";";
  }
  detail.pop_back();
  return {pass, detail.substr(1)};
}

double report_gap(const RegretReport& a, const RegretReport& b) {
  if (a.bins.size() != b.bins.size()) return INFINITY;
  double gap = std::max(std::abs(a.max_regret - b.max_regret),
                        std::abs(a.mean_regret - b.mean_regret));
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    gap = std::max({gap, std::abs(a.bins[i].regret - b.bins[i].regret),
                    std::abs(a.bins[i].realized_loss - b.bins[i].realized_loss),
                    std::abs(a.bins[i].minimal_loss - b.bins[i].minimal_loss)});
  }
  return gap;
}

Outcome joint_vs_conditional() {
  double gap = 0.0;
  int reports = 0;
  auto compare = [&](const ScoredDataset& data, const WeightSpec& weights) {
    for (const LossSpec& loss : {LossSpec::log(), LossSpec::brier()}) {
      for (const Binning& binning :
           {Binning::equal_count(10), Binning::equal_width(10),
            Binning::distinct()}) {
        gap = std::max(
            gap, report_gap(regret_test(data, loss, weights, binning,
                                        RegretMode::analytic(),
                                        RegretForm::kConditional),
                            regret_test(data, loss, weights, binning,
                                        RegretMode::analytic(),
                                        RegretForm::kJoint)));
        ++reports;
      }
    }
  };
  for (double b : kBetas) {
    const SimulationResult& r = simulation(b);
    for (double wb : kBetas) {
      compare(r.data, WeightSpec::binary(wb));
      compare(flip_top_bin(r.data), WeightSpec::binary(wb));
    }
    compare(corrected(r.data, b), WeightSpec::binary(0.5));
  }

  Eigen::VectorXd prior(3);
  prior << 0.6, 0.3, 0.1;
  Eigen::MatrixXd cond(4, 3);
  cond << 0.5, 0.1, 0.1, 0.3, 0.5, 0.1, 0.1, 0.3, 0.2, 0.1, 0.1, 0.6;
  Eigen::MatrixXd m(3, 3);
  m << 1, 2, 4, 1, 1, 3, 1, 1, 1;
  const WeightSpec weights = WeightSpec::matrix(WeightMatrix(m));
  const SimulationResult multi = simulate(
      {StatisticalExperiment(prior, cond), LossSpec::log(), weights, 200000, kSeed});
  compare(multi.data, weights);
  compare(multi.data, WeightSpec::matrix(WeightMatrix::ones(3)));

  return {gap <= 1e-12, std::to_string(reports) + " reports, max gap " +
                            fmt(gap) + " (tol 1e-12)"};
}

Outcome binary_multi_consistency() {
  double err = 0.0;
  for (double b : grid99()) {
    const WeightMatrix beta = WeightMatrix::from_binary(b);
    for (double g : grid99()) {
      const ScoreVector c = optimal_score_multi(beta, PosteriorBelief::binary(g));
      err = std::max(err, std::abs(c[1] - optimal_score_binary(b, g)));
      const std::vector<double> a = {1.0 - g, g};
      err = std::max(err, std::abs(loss_correct_multi(beta, a).gamma1() -
                                   loss_correct_binary(b, g)));
      for (const LossSpec& loss : {LossSpec::log(), LossSpec::brier()}) {
        for (int y : {0, 1}) {
          err = std::max(err, std::abs(weighted_loss_component(loss, beta, y, 1, g) -
                                       weighted_loss_binary(loss, b, g, y)));
        }
      }
    }
  }

  // Regret on the two-column form counts the coordinate-0 term too, which
  // for these losses equals the coordinate-1 term.
  for (double b : kBetas) {
    const SimulationResult& r = simulation(b);
    const ScoredDataset two = as_two_class(r.data);
    for (const LossSpec& loss : {LossSpec::log(), LossSpec::brier()}) {
      const RegretReport binary = regret_test(r.data, loss, WeightSpec::binary(b),
                                              Binning::distinct());
      const RegretReport matrix =
          regret_test(two, loss, WeightSpec::matrix(WeightMatrix::from_binary(b)),
                      Binning::distinct());
      if (binary.bins.size() != matrix.bins.size()) return {false, "bin count differs"};
      // Two-column cells are ordered by coordinate 0, so pair bins by score.
      std::vector<RegretBin> cells = matrix.bins;
      std::sort(cells.begin(), cells.end(), [](const auto& x, const auto& y) {
        return x.bin_score[1] < y.bin_score[1];
      });
      for (std::size_t i = 0; i < binary.bins.size(); ++i) {
        err = std::max({err,
                        std::abs(cells[i].bin_score[1] - binary.bins[i].bin_score[0]),
                        std::abs(cells[i].regret - 2 * binary.bins[i].regret),
                        std::abs(cells[i].argmin_score[1] -
                                 binary.bins[i].argmin_score[0]),
                        std::abs(cells[i].label_freq[1] -
                                 binary.bins[i].label_freq[1])});
      }
    }
  }
  return {err <= 1e-12, "max diff " + fmt(err) + " (tol 1e-12)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_round_trip() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "losscal_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream out;
  std::ostringstream err;

  auto simulate_to = [&](const fs::path& path) {
    cli::RunConfig c;
    c.command = cli::Command::kSimulate;
    c.beta = 0.99;
    c.rows = 200000;
    c.seed = kSeed;
    c.sidecar = true;
    c.output = path;
    return cli::run(c, out, err);
  };
  auto correct_to = [&](const fs::path& in, const fs::path& path) {
    cli::RunConfig c;
    c.command = cli::Command::kCorrect;
    c.beta = 0.99;
    c.input = in;
    c.output = path;
    return cli::run(c, out, err);
  };

  if (simulate_to(dir / "a.csv") || simulate_to(dir / "b.csv") ||
      correct_to(dir / "a.csv", dir / "ca.csv") ||
      correct_to(dir / "b.csv", dir / "cb.csv")) {
    return {false, "command failed: " + err.str()};
  }
  const bool identical = slurp(dir / "a.csv") == slurp(dir / "b.csv") &&
                         slurp(dir / "ca.csv") == slurp(dir / "cb.csv");

  // Columns: score,label,signal,true_posterior,corrected.
  std::istringstream rows(slurp(dir / "ca.csv"));
  std::string line;
  std::getline(rows, line);
  double worst = 0.0;
  std::size_t count = 0;
  while (std::getline(rows, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    worst = std::max(worst, std::abs(parse_double(f[4], count + 2) -
                                     parse_double(f[3], count + 2)));
    ++count;
  }
  const bool round_trip =
      ingest(dir / "a.csv", FileFormat::kCsv) ==
      simulate({imbalance_preset(0.02, 10, 1.0), LossSpec::log(),
                WeightSpec::binary(0.99), 200000, kSeed})
          .data;
  fs::remove_all(dir);
  return {identical && round_trip && count == 200000 && worst <= 1e-12,
          std::to_string(count) + " rows, max |corrected - true posterior| " +
              fmt(worst) + " (tol 1e-12), repeated runs " +
              (identical ? "byte-identical" : "DIFFER") + ", re-ingest " +
              (round_trip ? "equal" : "DIFFERS")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed form vs grid oracle", closed_form_vs_oracle},
      {"round-trip inversion", round_trip_inversion},
      {"point values", point_values},
      {"prior-shift equivalence", prior_shift_equivalence},
      {"derivative characterization", derivative_characterization},
      {"end-to-end calibration curves", end_to_end_curves},
      {"regret and SBR verification", regret_and_sbr},
      {"joint vs conditional regret", joint_vs_conditional},
      {"binary vs two-class matrix", binary_multi_consistency},
      {"CLI determinism and round trip", cli_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
