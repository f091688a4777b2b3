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


#include "dlocc/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dlocc/protocols.hpp"
#include "dlocc/text.hpp"

namespace dlocc {

namespace {

const double kPi = std::acos(-1.0);

struct Forward {
  double loss;
  // loss = 1 - numerator / denominator; each term is linear in every gate conjugation.
  double numerator = 0.0;
  double denominator = 1.0;
  std::vector<ProtocolRun> runs;
  std::vector<std::vector<MatrixXc>> observables;  // per run, per leaf: dLoss/d(leaf)
};

Forward forward_distillation(const LossSpec& spec, const ParamTable& params, bool with_observables) {
  const DynamicProtocol& p = spec.protocol;
  Forward fw;
  fw.runs.emplace_back(p, params, nullptr, spec.initial_state ? &*spec.initial_state : nullptr);
  const ProtocolRun& run = fw.runs.front();
  const double w = run.accepted_weight();
  if (!(w > 0.0)) throw ZeroWeightError("no branch is accepted with nonzero probability");
  const Wires out{p.output.alice_wire, p.n_alice_wires + p.output.bob_wire};
  const SubsystemSplit split(run.dims(), out);
  const auto& lo = split.local_offset();
  const auto& ro = split.rest_offset();
  const MatrixXc target = spec.target->projector();
  double overlap = 0.0;
  for (const auto& leaf : run.leaves())
    for (std::size_t l = 0; l < lo.size(); ++l)
      for (std::size_t m = 0; m < lo.size(); ++m) {
        const auto t = target(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m));
        if (t == std::complex<double>(0.0)) continue;
        std::complex<double> acc(0.0);
        for (std::size_t r = 0; r < ro.size(); ++r) acc += leaf.op(lo[m] + ro[r], lo[l] + ro[r]);
        overlap += (t * acc).real();
      }
  const double fidelity = overlap / w;
  fw.loss = 1.0 - fidelity;
  fw.numerator = overlap;
  fw.denominator = w;
  if (with_observables) {
    // L = 1 - tr(T rho)/tr(rho): dL = -tr((T - F I) d rho) / w
    const auto dim = static_cast<Eigen::Index>(product(run.dims()));
    MatrixXc obs = MatrixXc::Zero(dim, dim);
    for (std::size_t l = 0; l < lo.size(); ++l)
      for (std::size_t m = 0; m < lo.size(); ++m)
        for (std::size_t r = 0; r < ro.size(); ++r)
          obs(lo[l] + ro[r], lo[m] + ro[r]) = target(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m));
    obs.diagonal().array() -= fidelity;
    obs *= -1.0 / w;
    fw.observables.emplace_back(run.leaves().size(), obs);
  }
  return fw;
}

Forward forward_discrimination(const LossSpec& spec, const ParamTable& params, bool with_observables) {
  const DynamicProtocol& p = spec.protocol;
  if (!p.verdict_wire) throw std::invalid_argument("discrimination needs a verdict wire");
  const auto [p0, p1] = spec.priors;
  if (p0 < 0.0 || p1 < 0.0 || std::abs(p0 + p1 - 1.0) > 1e-12)
    throw std::invalid_argument("priors must be nonnegative and sum to 1");
  const std::vector<int> verdict = outcome_codes(p.global_dims(), {p.n_alice_wires + *p.verdict_wire});
  Forward fw;
  double success = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double prior = k == 0 ? p0 : p1;
    fw.runs.emplace_back(p, params, k == 0 ? &spec.state0 : &spec.state1);
    const ProtocolRun& run = fw.runs.back();
    for (const auto& leaf : run.leaves())
      for (Eigen::Index i = 0; i < leaf.op.rows(); ++i)
        if (verdict[i] == k) success += prior * leaf.op(i, i).real();
    if (with_observables) {
      const auto dim = static_cast<Eigen::Index>(verdict.size());
      MatrixXc obs = MatrixXc::Zero(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i)
        if (verdict[i] == k) obs(i, i) = -prior;
      fw.observables.emplace_back(run.leaves().size(), obs);
    }
  }
  fw.loss = 1.0 - success;
  fw.numerator = success;
  return fw;
}

Forward forward(const LossSpec& spec, const ParamTable& params, bool with_observables) {
  return spec.kind == LossSpec::Kind::Infidelity ? forward_distillation(spec, params, with_observables)
                                                 : forward_discrimination(spec, params, with_observables);
}

ParamTable add_tables(const ParamTable& a, const ParamTable& b) {
  ParamTable out = a;
  for (const auto& [key, v] : b.entries()) {
    if (out.contains(key.first, key.second))
      out.set(key.first, key.second, out.at(key.first, key.second) + v);
    else
      out.set(key.first, key.second, v);
  }
  return out;
}

// Loss with one gate occurrence at (round, history) shifted by delta. The gate
// gets a private slot so other gates sharing its slot are left untouched.
std::pair<double, double> shifted_terms(const LossSpec& spec, const ParamTable& params, int round,
                                        const std::string& history, bool bob, std::size_t gate, double delta) {
  LossSpec s = spec;
  RoundSpec& r = s.protocol.rounds[round];
  ParamCircuit& c = bob ? r.bob : r.alice;
  const int old_slot = *c.gates[gate].param_slot;
  const int new_slot = c.n_params;
  c.gates[gate].param_slot = new_slot;
  c.n_params += 1;
  const int na_old = bob ? r.alice.n_params : r.alice.n_params - 1;
  const int offset = bob ? na_old : 0;
  const int insert_at = bob ? r.alice.n_params + new_slot : new_slot;
  ParamTable shifted;
  for (const auto& [key, v] : params.entries()) {
    if (key.first != round) {
      shifted.set(key.first, key.second, v);
      continue;
    }
    Eigen::VectorXd w(v.size() + 1);
    w.head(insert_at) = v.head(insert_at);
    w(insert_at) = v(offset + old_slot) + (key.second == history ? delta : 0.0);
    w.tail(v.size() - insert_at) = v.tail(v.size() - insert_at);
    shifted.set(key.first, key.second, std::move(w));
  }
  const Forward fw = forward(s, shifted, false);
  return {fw.numerator, fw.denominator};
}

double safe_loss(const LossSpec& spec, const ParamTable& params) {
  try {
    return evaluate_loss(spec, params);
  } catch (const ZeroWeightError&) {
    return 1.0;
  }
}

Eigen::VectorXd finite_difference_flat(const LossSpec& spec, const Eigen::VectorXd& x, double h, bool safe) {
  const DynamicProtocol& p = spec.protocol;
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd up = x;
    Eigen::VectorXd dn = x;
    up(k) += h;
    dn(k) -= h;
    const ParamTable tu = ParamTable::unflatten(p, up);
    const ParamTable td = ParamTable::unflatten(p, dn);
    const double lu = safe ? safe_loss(spec, tu) : evaluate_loss(spec, tu);
    const double ld = safe ? safe_loss(spec, td) : evaluate_loss(spec, td);
    g(k) = (lu - ld) / (2 * h);
  }
  return g;
}

struct RestartResult {
  double best_loss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  std::vector<double> trace;
};

RestartResult run_restart(const LossSpec& spec, const OptimizerConfig& cfg, Eigen::VectorXd x) {
  const DynamicProtocol& p = spec.protocol;
  RestartResult res;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
  auto record = [&](double loss, const Eigen::VectorXd& at) {
    if (loss < res.best_loss) {
      res.best_loss = loss;
      res.best_x = at;
    }
    res.trace.push_back(res.best_loss);
  };
  for (int it = 0; it < cfg.max_iters; ++it) {
    double loss;
    Eigen::VectorXd g;
    if (cfg.method == OptimizerConfig::Method::AdamLike) {
      const LossAndGradient lg = loss_and_gradient(spec, ParamTable::unflatten(p, x));
      loss = lg.loss;
      g = lg.grad.flatten(p);
    } else {
      loss = safe_loss(spec, ParamTable::unflatten(p, x));
      g = finite_difference_flat(spec, x, 1e-5, true);
    }
    record(loss, x);
    if (!(g.norm() > cfg.grad_tolerance)) break;
    if (cfg.method == OptimizerConfig::Method::AdamLike) {
      m = cfg.beta1 * m + (1 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1 - cfg.beta2) * g.cwiseAbs2();
      const double c1 = 1 - std::pow(cfg.beta1, it + 1);
      const double c2 = 1 - std::pow(cfg.beta2, it + 1);
      x -= cfg.step_size * ((m / c1).array() / ((v / c2).array().sqrt() + 1e-12)).matrix();
    } else {
      x -= cfg.step_size * g;
    }
  }
  return res;
}

}  // namespace

LossSpec LossSpec::infidelity(DynamicProtocol p, PureVector target) {
  LossSpec s;
  s.kind = Kind::Infidelity;
  s.protocol = std::move(p);
  if (target.dims() != Dims{s.protocol.local_dim(), s.protocol.local_dim()})
    throw DimensionError("target does not match the output pair");
  s.target = std::move(target);
  return s;
}

LossSpec LossSpec::discrimination(DynamicProtocol p, NoisyStateSpec s0, NoisyStateSpec s1,
                                  std::pair<double, double> priors) {
  LossSpec s;
  s.kind = Kind::DiscriminationError;
  s.protocol = std::move(p);
  s.state0 = s0;
  s.state1 = s1;
  s.priors = priors;
  return s;
}

LossSpec LossSpec::distillation(DynamicProtocol p) {
  const int d = p.local_dim();
  return infidelity(std::move(p), max_entangled(d));
}

double evaluate_loss(const LossSpec& spec, const ParamTable& params) { return forward(spec, params, false).loss; }

LossAndGradient loss_and_gradient(const LossSpec& spec, const ParamTable& params) {
  Forward fw;
  try {
    fw = forward(spec, params, true);
  } catch (const ZeroWeightError&) {
    ParamTable zero;
    for (const auto& [key, v] : params.entries()) zero.set(key.first, key.second, Eigen::VectorXd::Zero(v.size()));
    return {1.0, std::move(zero)};
  }
  ParamTable grad = fw.runs.front().backward(fw.observables.front());
  for (std::size_t k = 1; k < fw.runs.size(); ++k) grad = add_tables(grad, fw.runs[k].backward(fw.observables[k]));
  return {fw.loss, std::move(grad)};
}

ParamTable gradient(const LossSpec& spec, const ParamTable& params, GradientMethod method) {
  const DynamicProtocol& p = spec.protocol;
  if (method == GradientMethod::Adjoint) {
    const Forward fw = forward(spec, params, true);
    ParamTable grad = fw.runs.front().backward(fw.observables.front());
    for (std::size_t k = 1; k < fw.runs.size(); ++k) grad = add_tables(grad, fw.runs[k].backward(fw.observables[k]));
    return grad;
  }
  if (method == GradientMethod::FiniteDifference)
    return ParamTable::unflatten(p, finite_difference_flat(spec, params.flatten(p), 1e-5, false));

  // Shift rules hold for each linear term; the quotient rule combines them.
  const Forward base = forward(spec, params, false);
  const double n0 = base.numerator;
  const double w0 = base.denominator;
  ParamTable grad;
  for (const auto& [round, history] : parameter_keys(p)) {
    const RoundSpec& r = p.rounds[round];
    Eigen::VectorXd g = Eigen::VectorXd::Zero(round_param_count(r));
    for (int party = 0; party < 2; ++party) {
      const ParamCircuit& c = party ? r.bob : r.alice;
      const int offset = party ? r.alice.n_params : 0;
      for (std::size_t k = 0; k < c.gates.size(); ++k) {
        const Gate& gate = c.gates[k];
        if (!gate.param_slot) continue;
        const bool ps = parameter_shift_applicable(gate);
        const double s = ps ? kPi / 2 : 1e-5;
        const auto up = shifted_terms(spec, params, round, history, party == 1, k, s);
        const auto dn = shifted_terms(spec, params, round, history, party == 1, k, -s);
        const double scale = ps ? 0.5 : 1.0 / (2 * s);
        const double dn_num = scale * (up.first - dn.first);
        const double dn_den = scale * (up.second - dn.second);
        g(offset + *gate.param_slot) -= (dn_num * w0 - n0 * dn_den) / (w0 * w0);
      }
    }
    grad.set(round, history, std::move(g));
  }
  return grad;
}

void OptimizerConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (jobs < 0) throw std::invalid_argument("jobs must be nonnegative");
}

TrainReport optimize(const LossSpec& spec, const OptimizerConfig& cfg, const std::vector<ParamTable>& warm_starts) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const DynamicProtocol& p = spec.protocol;
  const Eigen::Index n = ParamTable::zeros(p).flatten(p).size();

  std::vector<RestartResult> results(static_cast<std::size_t>(cfg.restarts));
  auto work = [&](int i) {
    Eigen::VectorXd x(n);
    if (static_cast<std::size_t>(i) < warm_starts.size()) {
      x = warm_starts[i].flatten(p);
    } else {
      std::mt19937_64 rng(cfg.rng_seed + static_cast<std::uint64_t>(i));
      std::uniform_real_distribution<double> u(0.0, 2 * kPi);
      for (Eigen::Index k = 0; k < n; ++k) x(k) = u(rng);
    }
    results[i] = run_restart(spec, cfg, std::move(x));
  };

  int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, cfg.restarts);
  if (jobs <= 1) {
    for (int i = 0; i < cfg.restarts; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int i = next++; i < cfg.restarts; i = next++) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  TrainReport report;
  report.seed = cfg.rng_seed;
  int best = 0;
  for (int i = 1; i < cfg.restarts; ++i)
    if (results[i].best_loss < results[best].best_loss) best = i;
  report.best_restart = best;
  report.best_loss = results[best].best_loss;
  report.best_params = ParamTable::unflatten(p, results[best].best_x);
  report.loss_trace = results[best].trace;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string serialize_report(const TrainReport& report) {
  std::ostringstream os;
  os << "train_report 1\n";
  os << "seed=" << report.seed << '\n';
  os << "best_loss=" << text::format_double(report.best_loss) << '\n';
  os << "best_restart=" << report.best_restart << '\n';
  os << "wall_time=" << text::format_double(report.wall_time) << '\n';
  os << "params_begin\n";
  for (const auto& [key, v] : report.best_params.entries()) {
    os << key.first << " @" << key.second;
    for (Eigen::Index k = 0; k < v.size(); ++k) os << ' ' << text::format_double(v(k));
    os << '\n';
  }
  os << "params_end\n";
  os << "loss_trace_begin\niteration,loss\n";
  for (std::size_t k = 0; k < report.loss_trace.size(); ++k)
    os << k << ',' << text::format_double(report.loss_trace[k]) << '\n';
  os << "loss_trace_end\n";
  return os.str();
}

TrainReport parse_report(const std::string& doc) {
  std::istringstream in(doc);
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "train_report 1")
    throw std::invalid_argument("expected 'train_report 1' header");
  TrainReport r;
  enum { Header, Params, Trace } section = Header;
  bool done = false;
  while (std::getline(in, line)) {
    line = text::trim(line);
    if (line.empty()) continue;
    if (section == Header) {
      if (line == "params_begin") {
        section = Params;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad report line '" + line + "'");
      const std::string key = line.substr(0, eq);
      const std::string val = line.substr(eq + 1);
      if (key == "seed")
        r.seed = text::parse_int<std::uint64_t>(val);
      else if (key == "best_loss")
        r.best_loss = text::parse_double(val);
      else if (key == "best_restart")
        r.best_restart = text::parse_int(val);
      else if (key == "wall_time")
        r.wall_time = text::parse_double(val);
      else
        throw std::invalid_argument("unknown report key '" + key + "'");
    } else if (section == Params) {
      if (line == "params_end") {
        if (!std::getline(in, line) || text::trim(line) != "loss_trace_begin" || !std::getline(in, line))
          throw std::invalid_argument("missing loss trace block");
        section = Trace;
        continue;
      }
      std::istringstream ls(line);
      std::string round, history;
      ls >> round >> history;
      if (history.empty() || history[0] != '@') throw std::invalid_argument("bad parameter line '" + line + "'");
      std::vector<double> values;
      for (std::string tok; ls >> tok;) values.push_back(text::parse_double(tok));
      r.best_params.set(text::parse_int(round), history.substr(1),
                        Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    } else {
      if (line == "loss_trace_end") {
        done = true;
        break;
      }
      const auto parts = text::split(line, ',');
      if (parts.size() != 2) throw std::invalid_argument("bad trace line '" + line + "'");
      r.loss_trace.push_back(text::parse_double(parts[1]));
    }
  }
  if (!done) throw std::invalid_argument("report is truncated");
  return r;
}

GreedyIsoReport train_iso_greedy(int n_copies, double p, int layers, const OptimizerConfig& first_stage,
                                 const OptimizerConfig& later_stages) {
  const auto start = std::chrono::steady_clock::now();
  GreedyIsoReport out;
  out.protocol = build_iso_dynamic_protocol(n_copies, p, layers);
  const DynamicProtocol final_only = build_iso_dynamic_protocol(4, p, layers);
  const DynamicProtocol window = build_iso_dynamic_protocol(5, p, layers);
  DynamicProtocol step = window;
  step.rounds.resize(1);
  const std::string final_key = parameter_keys(window)[1].second;

  MatrixXc state = initial_global_state(final_only, isotropic_state(p)).op();
  TrainReport base = optimize(LossSpec::distillation(final_only), first_stage);
  Eigen::VectorXd final_params = base.best_params.at(0, "");
  out.stage_fidelity.push_back(1.0 - base.best_loss);

  std::vector<Eigen::VectorXd> intermediate;
  Eigen::VectorXd previous = Eigen::VectorXd::Zero(round_param_count(window.rounds[0]));
  for (int k = 1; k <= n_copies - 4; ++k) {
    LossSpec spec = LossSpec::distillation(window);
    spec.initial_state = state;
    ParamTable warm;
    warm.set(0, "", previous);
    warm.set(1, final_key, final_params);
    OptimizerConfig cfg = later_stages;
    cfg.rng_seed = later_stages.rng_seed + 1000 * static_cast<std::uint64_t>(k);
    const TrainReport rep = optimize(spec, cfg, {warm});
    previous = rep.best_params.at(0, "");
    final_params = rep.best_params.at(1, final_key);
    out.stage_fidelity.push_back(1.0 - rep.best_loss);
    intermediate.push_back(previous);

    ParamTable frozen;
    frozen.set(0, "", previous);
    const ProtocolRun run(step, frozen, nullptr, &state);
    state = run.leaves().front().op / run.leaves().front().weight;
  }

  const auto keys = parameter_keys(out.protocol);
  for (std::size_t k = 0; k < intermediate.size(); ++k) out.params.set(keys[k].first, keys[k].second, intermediate[k]);
  out.params.set(keys.back().first, keys.back().second, final_params);
  const RunOutcome res = execute(out.protocol, out.params);
  out.fidelity = fidelity_pure(res.conditional_state, max_entangled(2));
  out.success_probability = res.success_probability;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace dlocc
