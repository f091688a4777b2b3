// Copyright 2026 The dlocc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Experiment runner behind the dlocc command-line tool: config parsing, sweep
// evaluation and CSV/manifest output.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlocc/channels.hpp"
#include "dlocc/train.hpp"

namespace dlocc::cli {

enum class Experiment {
  DistillS,
  DistillIsoDynamic,
  DistillIso16,
  DistillGadUnilocal,
  DistillAdBilocal,
  DistillQutrit,
  Discriminate,
  OracleTable,
  Verify
};

/// Name used in the CSV experiment column and output file names.
std::string to_string(Experiment e);

/// Malformed or out-of-domain configuration. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OracleFamily { SState, Isotropic };

struct ExperimentConfig {
  Experiment experiment = Experiment::DistillS;
  std::vector<double> gamma;
  std::vector<double> p;
  std::vector<int> copies;
  /// Isotropic oracle tables sweep recurrence stages instead of copies.
  std::vector<int> stages;
  double q = 0.8;
  NoiseKind noise = NoiseKind::AmplitudeDamping;
  OracleFamily family = OracleFamily::SState;
  /// Ansatz depth; 0 keeps each builder's default.
  int layers = 0;
  OptimizerConfig optimizer;
  /// Restarts for the later greedy stages of isotropic training.
  int later_restarts = 2;
  /// Isotropic training: round-by-round greedy, all rounds jointly, or both.
  enum class IsoTraining { Greedy, Joint, Both } iso_training = IsoTraining::Both;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  /// Sweep workers; 0 means one per hardware thread.
  int jobs = 0;
  /// Echo of every key that was set, in file order.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Documented defaults for the experiment.
ExperimentConfig default_config(Experiment e);

/// Inclusive grid "a:b:step" or comma list "a,b,c".
std::vector<double> parse_real_grid(const std::string& text);
std::vector<int> parse_int_grid(const std::string& text);

/// Line-oriented "key = value" under [sweep], [optimizer] or [run] headers;
/// '#' starts a comment. Unknown sections or keys are errors.
ExperimentConfig parse_config_text(const std::string& text, Experiment e);
ExperimentConfig parse_config(const std::string& path, Experiment e);

/// Checks grids and parameter domains; throws ConfigError.
void validate(const ExperimentConfig& cfg);

struct CsvRow {
  std::string experiment;
  std::string method;
  std::string param_name;
  double param_value = 0.0;
  int n_copies = 0;
  double value = 0.0;
};

/// Evaluates every sweep point; rows are ordered by sweep index regardless of jobs.
std::vector<CsvRow> compute_rows(const ExperimentConfig& cfg);

std::string to_csv(const std::vector<CsvRow>& rows);

/// Writes <out>/<experiment>.csv and <out>/<experiment>_manifest.json; the
/// manifest is written even when evaluation fails. Returns the exit status:
/// 0 success, 2 configuration error, 3 capacity error, 1 anything else.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace dlocc::cli
