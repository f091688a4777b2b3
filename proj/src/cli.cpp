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


#include "dlocc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dlocc/protocols.hpp"
#include "dlocc/text.hpp"

namespace dlocc::cli {

namespace {

using json = nlohmann::json;

const char* kVersion = "0.1.0";

const std::map<std::string, std::set<std::string>> kSections{
    {"sweep", {"gamma", "p", "q", "copies", "stages", "noise", "family", "scheme"}},
    {"optimizer",
     {"method", "step_size", "max_iters", "restarts", "later_restarts", "grad_tolerance", "layers", "beta1", "beta2",
      "iso_training"}},
    {"run", {"seed", "out", "jobs"}},
};

double round_grid(double x) { return std::round(x * 1e12) / 1e12; }

template <typename T, typename Parse>
std::vector<T> parse_grid(const std::string& text, Parse parse) {
  const std::string t = text::trim(text);
  if (t.empty()) throw ConfigError("empty grid");
  std::vector<T> out;
  if (t.find(':') != std::string::npos) {
    const auto parts = text::split(t, ':');
    if (parts.size() != 3) throw ConfigError("grid '" + t + "' must have the form start:stop:step");
    const double a = parse(parts[0]);
    const double b = parse(parts[1]);
    const double step = parse(parts[2]);
    if (!(step > 0.0)) throw ConfigError("grid step must be positive in '" + t + "'");
    if (b < a) throw ConfigError("grid stop is below start in '" + t + "'");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long k = 0; k < count; ++k) out.push_back(static_cast<T>(round_grid(a + k * step)));
  } else {
    for (const auto& item : text::split(t, ',')) out.push_back(static_cast<T>(parse(item)));
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    return text::parse_double(text::trim(value));
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + value + "'");
  }
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& value) {
  try {
    return text::parse_int<Int>(text::trim(value));
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + value + "'");
  }
}

// ---- sweep evaluation ----------------------------------------------------------

using Task = std::function<std::vector<CsvRow>()>;

std::vector<CsvRow> run_tasks(const std::vector<Task>& tasks, int jobs) {
  std::vector<std::vector<CsvRow>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  auto work = [&](std::size_t i) {
    try {
      results[i] = tasks[i]();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  int workers = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<CsvRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

double bell_fidelity(const RunOutcome& out) {
  return fidelity_pure(out.conditional_state, max_entangled(out.conditional_state.dims()[0]));
}

OptimizerConfig point_optimizer(const ExperimentConfig& cfg, std::size_t index) {
  OptimizerConfig o = cfg.optimizer;
  o.rng_seed = cfg.seed + 7919 * static_cast<std::uint64_t>(index);
  o.jobs = 1;
  return o;
}

double trained_fidelity(const DynamicProtocol& p, const OptimizerConfig& o) {
  const TrainReport r = optimize(LossSpec::distillation(p), o);
  return bell_fidelity(execute(p, r.best_params));
}

struct RowSink {
  std::string experiment;
  std::string param_name;
  double param_value;
  int n_copies;
  std::vector<CsvRow> rows;
  void add(const std::string& method, double value) {
    rows.push_back({experiment, method, param_name, param_value, n_copies, value});
  }
};

std::vector<Task> distill_s_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  for (double g : cfg.gamma)
    for (int n : cfg.copies)
      tasks.push_back([&cfg, g, n, idx = tasks.size()] {
        RowSink s{to_string(cfg.experiment), "gamma", g, n, {}};
        if (ddejmps_in_range(n, g)) s.add("ddejmps_oracle", oracle_ddejmps(n, g));
        s.add("dloccnet_oracle", oracle_dloccnet_s(n, g));
        const DynamicProtocol dd = build_dynamic_dejmps(n, g);
        s.add("ddejmps_sim", bell_fidelity(execute(dd, empty_params(dd))));
        const DynamicProtocol learned = build_s_learned_protocol(n, g);
        s.add("learned_sim", bell_fidelity(execute(learned, empty_params(learned))));
        const DynamicProtocol ansatz =
            cfg.layers > 0 ? build_s_ansatz_protocol(n, g, cfg.layers) : build_s_ansatz_protocol(n, g);
        s.add("trained", trained_fidelity(ansatz, point_optimizer(cfg, idx)));
        return s.rows;
      });
  return tasks;
}

std::vector<Task> distill_iso_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  const int layers = cfg.layers > 0 ? cfg.layers : 3;
  for (double p : cfg.p)
    for (int n : cfg.copies)
      tasks.push_back([&cfg, p, n, layers, idx = tasks.size()] {
        RowSink s{to_string(cfg.experiment), "p", p, n, {}};
        s.add("input", (1 + 3 * p) / 4);
        if ((n - 1) % 3 == 0) s.add("dyn_oracle", oracle_dyn_iso((n - 1) / 3, p));
        for (int i = 1, c = 4; c <= n; ++i, c *= 4)
          if (c == n) s.add("itr_oracle", oracle_itr_iso(i, p));
        using Mode = ExperimentConfig::IsoTraining;
        const OptimizerConfig first = point_optimizer(cfg, idx);
        if (cfg.iso_training != Mode::Joint) {
          OptimizerConfig later = first;
          later.restarts = cfg.later_restarts;
          const GreedyIsoReport r = train_iso_greedy(n, p, layers, first, later);
          s.add("trained_greedy", r.fidelity);
          s.add("trained_greedy_success", r.success_probability);
        }
        if (cfg.iso_training != Mode::Greedy) {
          const DynamicProtocol proto = build_iso_dynamic_protocol(n, p, layers);
          const TrainReport r = optimize(LossSpec::distillation(proto), first);
          const RunOutcome out = execute(proto, r.best_params);
          s.add("trained_joint", bell_fidelity(out));
          s.add("trained_joint_success", out.success_probability);
        }
        return s.rows;
      });
  return tasks;
}

std::vector<Task> distill_iso16_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  for (double p : cfg.p)
    tasks.push_back([&cfg, p] {
      RowSink s{to_string(cfg.experiment), "p", p, 16, {}};
      s.add("input", (1 + 3 * p) / 4);
      s.add("itr_oracle", oracle_itr_iso(2, p));
      s.add("itr_composed", compose_iterative_4to1(p, 2).back());
      s.add("dyn_oracle", oracle_dyn_iso(5, p));
      return s.rows;
    });
  return tasks;
}

std::vector<Task> pair_distill_tasks(const ExperimentConfig& cfg, bool unilocal) {
  std::vector<Task> tasks;
  for (double g : cfg.gamma)
    for (int n : cfg.copies)
      tasks.push_back([&cfg, g, n, unilocal, idx = tasks.size()] {
        RowSink s{to_string(cfg.experiment), "gamma", g, n, {}};
        const NoisyStateSpec pair =
            unilocal ? NoisyStateSpec::unilocal_gad_bell(g, cfg.q) : NoisyStateSpec::bilocal_ad_bell(g);
        s.add("input", fidelity_pure(make_state(pair), max_entangled(2)));
        s.add("trained", trained_fidelity(build_gad_ansatz_protocol(n, pair), point_optimizer(cfg, idx)));
        return s.rows;
      });
  return tasks;
}

std::vector<Task> qutrit_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  for (double p : cfg.p)
    for (int n : cfg.copies)
      tasks.push_back([&cfg, p, n, idx = tasks.size()] {
        RowSink s{to_string(cfg.experiment), "p", p, n, {}};
        s.add("input", fidelity_pure(make_state(NoisyStateSpec::qutrit_isotropic(p)), max_entangled(3)));
        const DynamicProtocol proto =
            cfg.layers > 0 ? build_qutrit_protocol(n, p, cfg.layers) : build_qutrit_protocol(n, p);
        s.add("trained", trained_fidelity(proto, point_optimizer(cfg, idx)));
        return s.rows;
      });
  return tasks;
}

std::vector<Task> discriminate_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  const bool ad = cfg.noise == NoiseKind::AmplitudeDamping;
  const std::vector<double>& levels = ad ? cfg.gamma : cfg.p;
  for (double level : levels)
    for (int n : cfg.copies)
      tasks.push_back([&cfg, level, n, ad, idx = tasks.size()] {
        RowSink s{to_string(cfg.experiment), ad ? "gamma" : "p", level, n, {}};
        const NoisyStateSpec phi0 = NoisyStateSpec::isotropic(1.0);
        const NoisyStateSpec phi1 = NoisyStateSpec::noisy_bell_minus(cfg.noise, level);
        const DynamicProtocol p = cfg.layers > 0 ? build_discrimination_protocol(n, phi0, cfg.layers)
                                                 : build_discrimination_protocol(n, phi0);
        const TrainReport r = optimize(LossSpec::discrimination(p, phi0, phi1), point_optimizer(cfg, idx));
        s.add("trained", execute_discrimination(p, r.best_params, phi0, phi1));
        s.add("helstrom", helstrom_bound(make_state(phi0), make_state(phi1), n));
        return s.rows;
      });
  return tasks;
}

std::vector<Task> oracle_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  if (cfg.family == OracleFamily::SState) {
    for (double g : cfg.gamma)
      for (int n : cfg.copies)
        tasks.push_back([&cfg, g, n] {
          RowSink s{to_string(cfg.experiment), "gamma", g, n, {}};
          s.add("ddejmps_oracle", oracle_ddejmps(n, g));
          s.add("dloccnet_oracle", oracle_dloccnet_s(n, g));
          return s.rows;
        });
  } else {
    for (double p : cfg.p)
      for (int i : cfg.stages)
        tasks.push_back([&cfg, p, i] {
          std::vector<CsvRow> rows;
          rows.push_back({to_string(cfg.experiment), "itr_oracle", "p", p, copies_consumed(IsoMethod::Iterative, i),
                          oracle_itr_iso(i, p)});
          rows.push_back({to_string(cfg.experiment), "dyn_oracle", "p", p, copies_consumed(IsoMethod::Dynamic, i),
                          oracle_dyn_iso(i, p)});
          return rows;
        });
  }
  return tasks;
}

std::vector<Task> verify_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  if (cfg.family == OracleFamily::SState) {
    for (double g : cfg.gamma)
      for (int n : cfg.copies)
        tasks.push_back([&cfg, g, n] {
          RowSink s{to_string(cfg.experiment), "gamma", g, n, {}};
          const DynamicProtocol learned = build_s_learned_protocol(n, g);
          s.add("learned_abs_error",
                std::abs(bell_fidelity(execute(learned, empty_params(learned))) - oracle_dloccnet_s(n, g)));
          const DynamicProtocol dd = build_dynamic_dejmps(n, g);
          const double sim = bell_fidelity(execute(dd, empty_params(dd)));
          if (n == 2) s.add("dejmps_abs_error", std::abs(sim - oracle_lemma_de_s((1 + g) / 2, (1 + g) / 2)));
          if (ddejmps_in_range(n, g)) s.add("ddejmps_abs_error", std::abs(sim - oracle_ddejmps(n, g)));
          return s.rows;
        });
  } else {
    for (double p : cfg.p)
      for (int i : cfg.stages)
        tasks.push_back([&cfg, p, i] {
          RowSink s{to_string(cfg.experiment), "p", p, copies_consumed(IsoMethod::Iterative, i), {}};
          s.add("itr_composed_abs_error", std::abs(compose_iterative_4to1(p, i).back() - oracle_itr_iso(i, p)));
          return s.rows;
        });
  }
  return tasks;
}

json config_json(const ExperimentConfig& cfg) {
  json c = json::object();
  c["experiment"] = to_string(cfg.experiment);
  for (const auto& [k, v] : cfg.echo) c["set"][k] = v;
  c["gamma"] = cfg.gamma;
  c["p"] = cfg.p;
  c["q"] = cfg.q;
  c["copies"] = cfg.copies;
  c["stages"] = cfg.stages;
  c["noise"] = to_string(cfg.noise);
  c["family"] = cfg.family == OracleFamily::SState ? "s" : "iso";
  c["layers"] = cfg.layers;
  c["optimizer"] = {{"method", cfg.optimizer.method == OptimizerConfig::Method::AdamLike ? "adam" : "fd"},
                    {"step_size", cfg.optimizer.step_size},
                    {"max_iters", cfg.optimizer.max_iters},
                    {"restarts", cfg.optimizer.restarts},
                    {"later_restarts", cfg.later_restarts},
                    {"iso_training", cfg.iso_training == ExperimentConfig::IsoTraining::Greedy  ? "greedy"
                                     : cfg.iso_training == ExperimentConfig::IsoTraining::Joint ? "joint"
                                                                                                 : "both"},
                    {"grad_tolerance", cfg.optimizer.grad_tolerance},
                    {"beta1", cfg.optimizer.beta1},
                    {"beta2", cfg.optimizer.beta2}};
  c["out"] = cfg.out_dir;
  c["jobs"] = cfg.jobs;
  return c;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::DistillS:
      return "distill-s";
    case Experiment::DistillIsoDynamic:
      return "distill-iso";
    case Experiment::DistillIso16:
      return "distill-iso16";
    case Experiment::DistillGadUnilocal:
      return "distill-gad";
    case Experiment::DistillAdBilocal:
      return "distill-ad";
    case Experiment::DistillQutrit:
      return "distill-qutrit";
    case Experiment::Discriminate:
      return "discriminate";
    case Experiment::OracleTable:
      return "oracle";
    case Experiment::Verify:
      return "verify";
  }
  return "unknown";
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::DistillS:
      c.gamma = parse_real_grid("0.1:0.9:0.2");
      c.copies = parse_int_grid("2:6:1");
      break;
    case Experiment::DistillIsoDynamic:
      c.p = {0.7};
      c.copies = parse_int_grid("4:6:1");
      break;
    case Experiment::DistillIso16:
      c.p = parse_real_grid("0.5:1:0.05");
      break;
    case Experiment::DistillGadUnilocal:
    case Experiment::DistillAdBilocal:
      c.gamma = parse_real_grid("0.1:0.5:0.1");
      c.copies = parse_int_grid("2:4:1");
      break;
    case Experiment::DistillQutrit:
      c.p = {0.5, 0.7, 0.9};
      c.copies = {2, 3};
      break;
    case Experiment::Discriminate:
      c.gamma = {0.3};
      c.p = {0.2};
      c.copies = parse_int_grid("1:3:1");
      break;
    case Experiment::OracleTable:
    case Experiment::Verify:
      c.gamma = parse_real_grid("0.1:0.9:0.1");
      c.p = parse_real_grid("0.5:1:0.1");
      c.copies = parse_int_grid("2:7:1");
      c.stages = parse_int_grid("1:4:1");
      break;
  }
  return c;
}

std::vector<double> parse_real_grid(const std::string& t) {
  return parse_grid<double>(t, [&](const std::string& x) { return parse_real("grid", x); });
}

std::vector<int> parse_int_grid(const std::string& t) {
  return parse_grid<int>(t, [&](const std::string& x) { return static_cast<double>(parse_integer<int>("grid", x)); });
}

ExperimentConfig parse_config_text(const std::string& doc, Experiment e) {
  ExperimentConfig c = default_config(e);
  std::istringstream in(doc);
  std::string line;
  std::string section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = text::trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section)) throw ConfigError(where + "unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = text::trim(line.substr(0, eq));
    const std::string value = text::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' appears before any section header");
    if (!kSections.at(section).count(key)) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "." + key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "key '" + key + "' has no value");
    c.echo.emplace_back(section + "." + key, value);
    try {
      if (key == "gamma") {
        c.gamma = parse_real_grid(value);
      } else if (key == "p") {
        c.p = parse_real_grid(value);
      } else if (key == "q") {
        c.q = parse_real(key, value);
      } else if (key == "copies") {
        c.copies = parse_int_grid(value);
      } else if (key == "stages") {
        c.stages = parse_int_grid(value);
      } else if (key == "noise") {
        c.noise = parse_noise_kind(value);
      } else if (key == "family") {
        if (value == "s")
          c.family = OracleFamily::SState;
        else if (value == "iso")
          c.family = OracleFamily::Isotropic;
        else
          throw ConfigError("family must be 's' or 'iso'");
      } else if (key == "scheme") {
        if (e != Experiment::DistillIsoDynamic && e != Experiment::DistillIso16)
          throw ConfigError("scheme applies to distill-iso only");
        if (value == "dynamic") {
          c.experiment = Experiment::DistillIsoDynamic;
        } else if (value == "iso16") {
          c.experiment = Experiment::DistillIso16;
        } else {
          throw ConfigError("scheme must be 'dynamic' or 'iso16'");
        }
      } else if (key == "method") {
        if (value == "adam")
          c.optimizer.method = OptimizerConfig::Method::AdamLike;
        else if (value == "fd")
          c.optimizer.method = OptimizerConfig::Method::FiniteDiffDescent;
        else
          throw ConfigError("method must be 'adam' or 'fd'");
      } else if (key == "step_size") {
        c.optimizer.step_size = parse_real(key, value);
      } else if (key == "max_iters") {
        c.optimizer.max_iters = parse_integer<int>(key, value);
      } else if (key == "restarts") {
        c.optimizer.restarts = parse_integer<int>(key, value);
      } else if (key == "iso_training") {
        if (value == "greedy")
          c.iso_training = ExperimentConfig::IsoTraining::Greedy;
        else if (value == "joint")
          c.iso_training = ExperimentConfig::IsoTraining::Joint;
        else if (value == "both")
          c.iso_training = ExperimentConfig::IsoTraining::Both;
        else
          throw ConfigError("iso_training must be 'greedy', 'joint' or 'both'");
      } else if (key == "later_restarts") {
        c.later_restarts = parse_integer<int>(key, value);
      } else if (key == "grad_tolerance") {
        c.optimizer.grad_tolerance = parse_real(key, value);
      } else if (key == "layers") {
        c.layers = parse_integer<int>(key, value);
      } else if (key == "beta1") {
        c.optimizer.beta1 = parse_real(key, value);
      } else if (key == "beta2") {
        c.optimizer.beta2 = parse_real(key, value);
      } else if (key == "seed") {
        c.seed = parse_integer<std::uint64_t>(key, value);
      } else if (key == "out") {
        c.out_dir = value;
      } else if (key == "jobs") {
        c.jobs = parse_integer<int>(key, value);
      }
    } catch (const ConfigError& err) {
      throw ConfigError(where + "key '" + key + "': " + err.what());
    } catch (const std::invalid_argument& err) {
      throw ConfigError(where + "key '" + key + "': " + err.what());
    }
  }
  if (c.experiment == Experiment::DistillIso16 && !seen.count("sweep.p")) c.p = default_config(c.experiment).p;
  return c;
}

ExperimentConfig parse_config(const std::string& path, Experiment e) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), e);
}

void validate(const ExperimentConfig& c) {
  auto unit = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw ConfigError(std::string(name) + " grid is empty");
    for (double x : v)
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(std::string(name) + " value outside [0, 1]");
  };
  auto ints = [](const std::vector<int>& v, int lo, const char* name) {
    if (v.empty()) throw ConfigError(std::string(name) + " grid is empty");
    for (int x : v)
      if (x < lo) throw ConfigError(std::string(name) + " must be at least " + std::to_string(lo));
  };
  if (!(c.q >= 0.0 && c.q <= 1.0)) throw ConfigError("q outside [0, 1]");
  if (c.layers < 0) throw ConfigError("layers must be nonnegative");
  if (c.jobs < 0) throw ConfigError("jobs must be nonnegative");
  if (c.later_restarts < 1) throw ConfigError("later_restarts must be at least 1");
  try {
    c.optimizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const bool s_family = c.family == OracleFamily::SState;
  switch (c.experiment) {
    case Experiment::DistillS:
      unit(c.gamma, "gamma");
      ints(c.copies, 2, "copies");
      break;
    case Experiment::DistillIsoDynamic:
      unit(c.p, "p");
      ints(c.copies, 4, "copies");
      break;
    case Experiment::DistillIso16:
      unit(c.p, "p");
      break;
    case Experiment::DistillGadUnilocal:
    case Experiment::DistillAdBilocal:
      unit(c.gamma, "gamma");
      ints(c.copies, 2, "copies");
      break;
    case Experiment::DistillQutrit:
      unit(c.p, "p");
      ints(c.copies, 2, "copies");
      break;
    case Experiment::Discriminate:
      unit(c.noise == NoiseKind::AmplitudeDamping ? c.gamma : c.p, c.noise == NoiseKind::AmplitudeDamping ? "gamma" : "p");
      ints(c.copies, 1, "copies");
      break;
    case Experiment::OracleTable:
    case Experiment::Verify:
      if (s_family) {
        unit(c.gamma, "gamma");
        ints(c.copies, 2, "copies");
      } else {
        unit(c.p, "p");
        ints(c.stages, 1, "stages");
      }
      break;
  }
}

std::vector<CsvRow> compute_rows(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<Task> tasks;
  switch (cfg.experiment) {
    case Experiment::DistillS:
      tasks = distill_s_tasks(cfg);
      break;
    case Experiment::DistillIsoDynamic:
      tasks = distill_iso_tasks(cfg);
      break;
    case Experiment::DistillIso16:
      tasks = distill_iso16_tasks(cfg);
      break;
    case Experiment::DistillGadUnilocal:
      tasks = pair_distill_tasks(cfg, true);
      break;
    case Experiment::DistillAdBilocal:
      tasks = pair_distill_tasks(cfg, false);
      break;
    case Experiment::DistillQutrit:
      tasks = qutrit_tasks(cfg);
      break;
    case Experiment::Discriminate:
      tasks = discriminate_tasks(cfg);
      break;
    case Experiment::OracleTable:
      tasks = oracle_tasks(cfg);
      break;
    case Experiment::Verify:
      tasks = verify_tasks(cfg);
      break;
  }
  return run_tasks(tasks, cfg.jobs);
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os << "experiment,method,param_name,param_value,n_copies,value\n";
  for (const auto& r : rows)
    os << r.experiment << ',' << r.method << ',' << r.param_name << ',' << text::format_double(r.param_value) << ','
       << r.n_copies << ',' << text::format_double(r.value) << '\n';
  return os.str();
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::string name = to_string(cfg.experiment);
  const std::filesystem::path dir(cfg.out_dir);
  const std::filesystem::path csv_path = dir / (name + ".csv");
  const std::filesystem::path manifest_path = dir / (name + "_manifest.json");

  json manifest;
  manifest["tool"] = "dlocc";
  manifest["version"] = kVersion;
  manifest["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  manifest["compiler"] = __VERSION__;
  manifest["seed"] = cfg.seed;
  manifest["max_dimension"] = max_dimension();
  manifest["config"] = config_json(cfg);
  manifest["csv"] = csv_path.string();

  int status = 0;
  try {
    std::filesystem::create_directories(dir);
  } catch (const std::exception& e) {
    log << "error: cannot create output directory: " << e.what() << '\n';
    return 1;
  }
  try {
    const std::vector<CsvRow> rows = compute_rows(cfg);
    std::ofstream(csv_path, std::ios::binary) << to_csv(rows);
    manifest["rows"] = rows.size();
    manifest["status"] = "ok";
    if (cfg.experiment == Experiment::Verify) {
      double worst = 0.0;
      for (const auto& r : rows) worst = std::max(worst, r.value);
      manifest["max_abs_error"] = worst;
      log << "verify: max |oracle - simulation| = " << text::format_double(worst) << '\n';
    }
  } catch (const CapacityError& e) {
    status = 3;
    manifest["status"] = "capacity_error";
    manifest["error"] = e.what();
    log << "capacity error: " << e.what() << '\n';
  } catch (const ConfigError& e) {
    status = 2;
    manifest["status"] = "config_error";
    manifest["error"] = e.what();
    log << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    status = 1;
    manifest["status"] = "error";
    manifest["error"] = e.what();
    log << "error: " << e.what() << '\n';
  }
  manifest["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream(manifest_path) << manifest.dump(2) << '\n';
  if (status == 0) log << "wrote " << csv_path.string() << " and " << manifest_path.string() << '\n';
  return status;
}

}  // namespace dlocc::cli
