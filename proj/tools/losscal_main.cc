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

// losscal: loss-corrected calibration for class-weighted classifiers.
//
//   losscal correct  --input scores.csv --beta 0.99 --output corrected.csv
//   losscal curve    --input scores.csv --bins 10 --beta 0.99 --svg plot.svg
//   losscal diagnose --input scores.csv --loss log --beta 0.99
//   losscal simulate --rows 1000000 --beta 0.99 --seed 7 --sidecar
//   losscal compare  --input scores.csv --beta 0.9 --delta 0.2

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "losscal/cli.h"
#include "losscal/error.h"

namespace {

using losscal::cli::Command;
using losscal::cli::RunConfig;

struct Flags {
  std::string format;
  std::string loss = "log";
  std::string binning = "quantile";
  int bins = 10;
  int grid = 0;
  std::string input;
  std::string output;
  std::string beta_matrix;
  std::string svg;
  std::string experiment;
};

void add_io(CLI::App* cmd, Flags& flags, bool needs_input) {
  auto* input = cmd->add_option("--input", flags.input, "Input dataset");
  if (needs_input) input->required();
  cmd->add_option("--output", flags.output,
                  "Output file (standard output when omitted)");
  cmd->add_option("--format", flags.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
}

void add_weights(CLI::App* cmd, RunConfig& config, Flags& flags) {
  cmd->add_option("--beta", config.beta, "Positive-class weight beta1");
  cmd->add_option("--beta-matrix", flags.beta_matrix,
                  "CSV file with an n x n weight matrix");
  cmd->add_option("--delta", config.delta, "Prior-shift ratio delta");
}

void add_binning(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--bins", flags.bins, "Number of bins")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--binning", flags.binning, "quantile, width or distinct")
      ->check(CLI::IsMember({"quantile", "width", "distinct"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loss-corrected calibration for class-weighted classifiers"};
  app.require_subcommand(1);
  RunConfig config;
  Flags flags;

  auto* correct = app.add_subcommand("correct", "Append loss-corrected scores");
  add_io(correct, flags, true);
  add_weights(correct, config, flags);

  auto* curve = app.add_subcommand("curve", "Binned calibration curve");
  add_io(curve, flags, true);
  add_binning(curve, flags);
  add_weights(curve, config, flags);
  curve->add_option("--class", config.class_index, "Class to plot")
      ->check(CLI::NonNegativeNumber);
  curve->add_option("--svg", flags.svg, "Write a log-log reliability diagram");

  auto* diagnose = app.add_subcommand("diagnose", "Loss-calibration regret test");
  add_io(diagnose, flags, true);
  add_binning(diagnose, flags);
  add_weights(diagnose, config, flags);
  diagnose->add_option("--loss", flags.loss, "log or brier")
      ->check(CLI::IsMember({"log", "brier"}));
  diagnose->add_option("--tolerance", config.tolerance,
                       "Maximum regret for a loss-calibrated verdict");
  diagnose->add_option("--grid", flags.grid,
                       "Use a grid search with this many points")
      ->check(CLI::Range(3, 100000000));

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  add_io(sim, flags, false);
  add_weights(sim, config, flags);
  sim->add_option("--loss", flags.loss, "log or brier")
      ->check(CLI::IsMember({"log", "brier"}));
  sim->add_option("--seed", config.seed, "Random seed");
  sim->add_flag("--sidecar", config.sidecar,
                "Append the true signal and posterior of each row");
  sim->add_option("--rows", config.rows, "Number of rows");
  sim->add_option("--positive-rate", config.positive_rate,
                  "Prior positive rate of the preset experiment");
  sim->add_option("--signals", config.signals, "Signals in the preset");
  sim->add_option("--informativeness", config.informativeness,
                  "Posterior spread of the preset, in [0,1]");
  sim->add_option("--experiment", flags.experiment,
                  "JSON experiment file replacing the preset");

  auto* compare = app.add_subcommand(
      "compare", "Loss-correction next to the prior-shift correction");
  add_io(compare, flags, true);
  add_weights(compare, config, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : losscal::cli::kUsageError;
  }

  const std::map<CLI::App*, Command> commands = {
      {correct, Command::kCorrect},   {curve, Command::kCurve},
      {diagnose, Command::kDiagnose}, {sim, Command::kSimulate},
      {compare, Command::kCompare}};
  for (const auto& [sub, command] : commands) {
    if (sub->parsed()) config.command = command;
  }

  try {
    config.input = flags.input;
    config.output = flags.output;
    if (!flags.format.empty()) config.format = losscal::parse_format(flags.format);
    config.loss = losscal::parse_loss_family(flags.loss);
    if (!flags.beta_matrix.empty()) config.beta_matrix = flags.beta_matrix;
    if (!flags.svg.empty()) config.svg = flags.svg;
    if (!flags.experiment.empty()) config.experiment = flags.experiment;
    if (flags.grid > 0) config.grid_size = flags.grid;
    if (flags.binning == "quantile") {
      config.binning = losscal::Binning::equal_count(flags.bins);
    } else if (flags.binning == "width") {
      config.binning = losscal::Binning::equal_width(flags.bins);
    } else {
      config.binning = losscal::Binning::distinct();
    }
  } catch (const losscal::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return losscal::cli::kUsageError;
  }

  return losscal::cli::run(config, std::cout, std::cerr);
}
