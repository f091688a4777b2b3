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


// dlocc: run distillation, discrimination and oracle experiments from the shell.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "dlocc/cli.hpp"
#include "dlocc/text.hpp"

using dlocc::cli::Experiment;

int main(int argc, char** argv) {
  CLI::App app{"Dynamic LOCC protocol simulator and trainer"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<Experiment, std::string>> commands{
      {"distill-s", {Experiment::DistillS, "S-state distillation: oracles, fixed protocols, training"}},
      {"distill-iso", {Experiment::DistillIsoDynamic, "isotropic distillation (scheme = dynamic | iso16)"}},
      {"distill-gad", {Experiment::DistillGadUnilocal, "unilocal generalized amplitude damping distillation"}},
      {"distill-ad", {Experiment::DistillAdBilocal, "bilocal amplitude damping distillation"}},
      {"distill-qutrit", {Experiment::DistillQutrit, "qutrit isotropic 2-in-1-out distillation"}},
      {"discriminate", {Experiment::Discriminate, "distributed Bell-state discrimination"}},
      {"oracle", {Experiment::OracleTable, "closed-form fidelity tables (family = s | iso)"}},
      {"verify", {Experiment::Verify, "oracle against simulation"}},
  };

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int jobs = -1;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "config file (key = value under [sweep], [optimizer], [run])")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "base RNG seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "sweep workers, 0 = one per hardware thread")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (const char* env = std::getenv("DLOCC_MAX_DIM")) {
    try {
      const auto cap = dlocc::text::parse_int<std::size_t>(env);
      if (cap < 1) throw std::invalid_argument("zero");
      dlocc::set_max_dimension(cap);
    } catch (const std::exception&) {
      std::cerr << "config error: DLOCC_MAX_DIM must be a positive integer, got '" << env << "'\n";
      return 2;
    }
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const Experiment experiment = commands.at(chosen->get_name()).first;
  dlocc::cli::ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? dlocc::cli::default_config(experiment)
                              : dlocc::cli::parse_config(config_path, experiment);
    if (chosen->count("--seed")) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (jobs >= 0) cfg.jobs = jobs;
    dlocc::cli::validate(cfg);
  } catch (const dlocc::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return dlocc::cli::run_experiment(cfg, std::cerr);
}
