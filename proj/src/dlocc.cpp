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


#include "dlocc/dlocc.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dlocc/text.hpp"

namespace dlocc {

namespace {

std::string join_history(const std::string& history, const std::string& token) {
  return history.empty() ? token : history + "/" + token;
}

Wires alice_block(int na) {
  Wires w(static_cast<std::size_t>(na));
  for (int k = 0; k < na; ++k) w[k] = k;
  return w;
}

Wires bob_block(int na, int nb) {
  Wires w(static_cast<std::size_t>(nb));
  for (int k = 0; k < nb; ++k) w[k] = na + k;
  return w;
}

Wires measured_global(const DynamicProtocol& p, const RoundSpec& r) {
  Wires m = r.measured_alice;
  for (int w : r.measured_bob) m.push_back(p.n_alice_wires + w);
  return m;
}

std::vector<int> code_digits(int code, std::size_t n, int d) {
  std::vector<int> digits(n);
  for (std::size_t k = n; k-- > 0;) {
    digits[k] = code % d;
    code /= d;
  }
  return digits;
}

std::string outcome_token(const RoundSpec& r, const std::vector<int>& digits) {
  std::string t = "A";
  for (std::size_t k = 0; k < r.measured_alice.size(); ++k) t += std::to_string(digits[k]);
  t += "B";
  for (std::size_t k = r.measured_alice.size(); k < digits.size(); ++k) t += std::to_string(digits[k]);
  return t;
}

std::string postselect_token(const RoundSpec& r) {
  std::string t;
  for (std::size_t k = 0; k < r.policy.accepted.size(); ++k) {
    if (k) t += "|";
    t += outcome_token(r, r.policy.accepted[k]);
  }
  return t;
}

int outcome_count(const RoundSpec& r, int d) {
  int n = 1;
  for (std::size_t k = 0; k < r.measured_alice.size() + r.measured_bob.size(); ++k) n *= d;
  return n;
}

int pattern_code(const std::vector<int>& pattern, int d) {
  int code = 0;
  for (int digit : pattern) code = code * d + digit;
  return code;
}

// X -> W X W^dagger with W = ua (x) ub on the party blocks; empty matrices mean identity.
MatrixXc conjugate(const MatrixXc& x, const MatrixXc& ua, const MatrixXc& ub, const Dims& dims, const Wires& a,
                   const Wires& b) {
  auto left = [&](const MatrixXc& m) {
    MatrixXc out = ua.size() ? apply_left<double>(m, ua, dims, a) : m;
    return ub.size() ? apply_left<double>(out, ub, dims, b) : out;
  };
  const MatrixXc once = left(x);
  return left(once.adjoint()).adjoint();
}

MatrixXc permute_matrix(const MatrixXc& m, const Dims& dims, const Wires& order) {
  const SubsystemSplit split(dims, order);
  const auto& lo = split.local_offset();
  const auto dim = static_cast<Eigen::Index>(lo.size());
  MatrixXc out(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) out(i, j) = m(lo[i], lo[j]);
  return out;
}

Dims permuted_dims(const Dims& dims, const Wires& order) {
  Dims out;
  for (int w : order) out.push_back(dims[w]);
  return out;
}

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Layout of a refresh: surviving wires in global order, then fresh pair halves.
struct RefreshLayout {
  Wires keep;
  Wires fresh;          // global wires receiving fresh halves, pair by pair (A, B)
  Wires tensor_order;   // keep ++ fresh
  Wires to_global;      // tensor position of each global wire
};

RefreshLayout refresh_layout(const DynamicProtocol& p, const RoundSpec& r) {
  RefreshLayout lay;
  for (std::size_t k = 0; k < r.refreshed_alice().size(); ++k) {
    lay.fresh.push_back(r.refreshed_alice()[k]);
    lay.fresh.push_back(p.n_alice_wires + r.refreshed_bob()[k]);
  }
  const int n = p.n_alice_wires + p.n_bob_wires;
  for (int g = 0; g < n; ++g)
    if (std::find(lay.fresh.begin(), lay.fresh.end(), g) == lay.fresh.end()) lay.keep.push_back(g);
  lay.tensor_order = lay.keep;
  lay.tensor_order.insert(lay.tensor_order.end(), lay.fresh.begin(), lay.fresh.end());
  lay.to_global.assign(static_cast<std::size_t>(n), 0);
  for (int t = 0; t < n; ++t) lay.to_global[lay.tensor_order[t]] = t;
  return lay;
}

MatrixXc refresh_forward(const MatrixXc& rho, const Dims& dims, const RefreshLayout& lay, const MatrixXc& fresh) {
  const Dims td = permuted_dims(dims, lay.tensor_order);
  const MatrixXc ordered = permute_matrix(rho, dims, lay.tensor_order);
  const Eigen::Index df = fresh.rows();
  const Eigen::Index dk = ordered.rows() / df;
  MatrixXc reduced = MatrixXc::Zero(dk, dk);
  for (Eigen::Index f = 0; f < df; ++f) reduced += ordered(Eigen::seqN(f, dk, df), Eigen::seqN(f, dk, df));
  return permute_matrix(kron(reduced, fresh), td, lay.to_global);
}

// Adjoint of refresh_forward in the Hilbert-Schmidt inner product.
MatrixXc refresh_adjoint(const MatrixXc& obs, const Dims& dims, const RefreshLayout& lay, const MatrixXc& fresh) {
  const Dims td = permuted_dims(dims, lay.tensor_order);
  const MatrixXc ordered = permute_matrix(obs, dims, lay.tensor_order);
  const Eigen::Index df = fresh.rows();
  const Eigen::Index dk = ordered.rows() / df;
  // x(i, j) = sum_{f,g} ordered(i f, j g) fresh(g, f)
  MatrixXc x = MatrixXc::Zero(dk, dk);
  for (Eigen::Index f = 0; f < df; ++f)
    for (Eigen::Index g = 0; g < df; ++g) {
      const auto coef = fresh(g, f);
      if (coef == std::complex<double>(0.0)) continue;
      x += coef * ordered(Eigen::seqN(f, dk, df), Eigen::seqN(g, dk, df));
    }
  return permute_matrix(kron(x, MatrixXc::Identity(df, df)), td, lay.to_global);
}

// Keeps entries whose row and column share an outcome code, using per-code children.
MatrixXc merge_projected(const std::vector<const MatrixXc*>& per_code, const std::vector<int>& codes) {
  const auto dim = static_cast<Eigen::Index>(codes.size());
  MatrixXc out = MatrixXc::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const MatrixXc* src = per_code[codes[j]];
    if (!src) continue;
    for (Eigen::Index i = 0; i < dim; ++i)
      if (codes[i] == codes[j]) out(i, j) = (*src)(i, j);
  }
  return out;
}

double real_trace_product(const MatrixXc& x, const MatrixXc& g) {
  // Re tr(x g)
  return (x.transpose().cwiseProduct(g)).sum().real();
}

std::string state_to_text(const NoisyStateSpec& s) {
  return to_string(s.family) + ":" + text::format_double(s.gamma) + ":" + text::format_double(s.p) + ":" +
         text::format_double(s.q) + ":" + to_string(s.noise);
}

NoisyStateSpec state_from_text(const std::string& t) {
  const auto parts = text::split(t, ':');
  if (parts.size() != 5) throw std::invalid_argument("bad state spec '" + t + "'");
  NoisyStateSpec s;
  s.family = parse_state_family(parts[0]);
  s.gamma = text::parse_double(parts[1]);
  s.p = text::parse_double(parts[2]);
  s.q = text::parse_double(parts[3]);
  s.noise = parse_noise_kind(parts[4]);
  return s;
}

std::string wires_to_text(const Wires& w) {
  if (w.empty()) return "-";
  std::string s;
  for (std::size_t k = 0; k < w.size(); ++k) s += (k ? "," : "") + std::to_string(w[k]);
  return s;
}

Wires wires_from_text(const std::string& t) {
  Wires w;
  if (t == "-") return w;
  for (const auto& part : text::split(t, ',')) w.push_back(text::parse_int(part));
  return w;
}

}  // namespace

int round_param_count(const RoundSpec& r) { return r.alice.n_params + r.bob.n_params; }

int DynamicProtocol::copies_consumed() const {
  int n = static_cast<int>(layout.size());
  for (const auto& r : rounds)
    if (r.refresh) n += static_cast<int>(r.refreshed_alice().size());
  return n;
}

void DynamicProtocol::validate() const {
  if (n_alice_wires < 1 || n_bob_wires < 1) throw std::invalid_argument("each party needs at least one wire");
  if (rounds.empty()) throw std::invalid_argument("protocol needs at least one round");
  const int d = local_dim();
  std::vector<int> a_used(static_cast<std::size_t>(n_alice_wires), 0);
  std::vector<int> b_used(static_cast<std::size_t>(n_bob_wires), 0);
  for (const auto& c : layout) {
    if (c.alice_wire < 0 || c.alice_wire >= n_alice_wires || c.bob_wire < 0 || c.bob_wire >= n_bob_wires)
      throw std::invalid_argument("copy placement out of range");
    ++a_used[c.alice_wire];
    ++b_used[c.bob_wire];
  }
  for (int u : a_used)
    if (u != 1) throw std::invalid_argument("initial copies must cover every Alice wire exactly once");
  for (int u : b_used)
    if (u != 1) throw std::invalid_argument("initial copies must cover every Bob wire exactly once");
  if (output.alice_wire < 0 || output.alice_wire >= n_alice_wires || output.bob_wire < 0 ||
      output.bob_wire >= n_bob_wires)
    throw std::invalid_argument("output pair out of range");
  if (verdict_wire && (*verdict_wire < 0 || *verdict_wire >= n_bob_wires))
    throw std::invalid_argument("verdict wire out of range");
  for (const auto& r : rounds) {
    for (const auto* c : {&r.alice, &r.bob}) c->validate();
    if (r.alice.n_wires != n_alice_wires || r.bob.n_wires != n_bob_wires)
      throw std::invalid_argument("round circuit width does not match the party block");
    for (const auto* c : {&r.alice, &r.bob})
      for (int x : c->dims())
        if (x != d) throw std::invalid_argument("circuit wire dimension does not match the shared state");
    auto check_measured = [](const Wires& m, int n) {
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      for (int w : m) {
        if (w < 0 || w >= n || seen[w]) throw std::invalid_argument("measured wire out of range or repeated");
        seen[w] = true;
      }
    };
    check_measured(r.measured_alice, n_alice_wires);
    check_measured(r.measured_bob, n_bob_wires);
    const std::size_t m = r.measured_alice.size() + r.measured_bob.size();
    if (r.policy.mode == BranchPolicy::Mode::Postselect) {
      if (r.policy.accepted.empty()) throw std::invalid_argument("postselection needs at least one pattern");
      for (const auto& pat : r.policy.accepted) {
        if (pat.size() != m) throw std::invalid_argument("postselect pattern length differs from measured wires");
        for (int digit : pat)
          if (digit < 0 || digit >= d) throw std::invalid_argument("postselect digit out of range");
      }
    }
    if (r.refresh_alice.empty() != r.refresh_bob.empty())
      throw std::invalid_argument("explicit refresh positions must be given for both parties");
    check_measured(r.refresh_alice, n_alice_wires);
    check_measured(r.refresh_bob, n_bob_wires);
    if (r.refresh) {
      if (r.refreshed_alice().empty() || r.refreshed_alice().size() != r.refreshed_bob().size())
        throw std::invalid_argument("refresh needs the same nonzero number of wires per party");
      if (r.refresh->local_dim() != d) throw std::invalid_argument("refresh dimension does not match freed wires");
    }
  }
}

const Eigen::VectorXd& ParamTable::at(int round, const std::string& history) const {
  const auto it = entries_.find({round, history});
  if (it == entries_.end())
    throw std::out_of_range("missing parameters for round " + std::to_string(round) + " history '" + history + "'");
  return it->second;
}

ParamTable ParamTable::zeros(const DynamicProtocol& p) {
  ParamTable t;
  for (const auto& [round, history] : parameter_keys(p))
    t.set(round, history, Eigen::VectorXd::Zero(round_param_count(p.rounds[round])));
  return t;
}

Eigen::VectorXd ParamTable::flatten(const DynamicProtocol& p) const {
  const auto keys = parameter_keys(p);
  Eigen::Index total = 0;
  for (const auto& k : keys) total += at(k.first, k.second).size();
  Eigen::VectorXd flat(total);
  Eigen::Index pos = 0;
  for (const auto& k : keys) {
    const auto& v = at(k.first, k.second);
    flat.segment(pos, v.size()) = v;
    pos += v.size();
  }
  return flat;
}

ParamTable ParamTable::unflatten(const DynamicProtocol& p, const Eigen::VectorXd& flat) {
  ParamTable t;
  Eigen::Index pos = 0;
  for (const auto& [round, history] : parameter_keys(p)) {
    const int n = round_param_count(p.rounds[round]);
    if (pos + n > flat.size()) throw std::invalid_argument("flat parameter vector too short");
    t.set(round, history, flat.segment(pos, n));
    pos += n;
  }
  if (pos != flat.size()) throw std::invalid_argument("flat parameter vector too long");
  return t;
}

std::vector<ParamKey> parameter_keys(const DynamicProtocol& p) {
  std::vector<ParamKey> keys;
  std::vector<std::string> level{""};
  const int d = p.local_dim();
  for (int r = 0; r < static_cast<int>(p.rounds.size()); ++r) {
    const RoundSpec& spec = p.rounds[r];
    std::vector<std::string> next;
    for (const auto& h : level) {
      keys.emplace_back(r, h);
      if (spec.policy.mode == BranchPolicy::Mode::Postselect) {
        next.push_back(join_history(h, postselect_token(spec)));
      } else {
        const std::size_t m = spec.measured_alice.size() + spec.measured_bob.size();
        for (int code = 0; code < outcome_count(spec, d); ++code)
          next.push_back(join_history(h, outcome_token(spec, code_digits(code, m, d))));
      }
    }
    level = std::move(next);
  }
  return keys;
}

std::vector<std::string> reachable_histories(const DynamicProtocol& p) {
  std::vector<std::string> level{""};
  const int d = p.local_dim();
  for (const RoundSpec& spec : p.rounds) {
    std::vector<std::string> next;
    for (const auto& h : level) {
      if (spec.policy.mode == BranchPolicy::Mode::Postselect) {
        next.push_back(join_history(h, postselect_token(spec)));
      } else {
        const std::size_t m = spec.measured_alice.size() + spec.measured_bob.size();
        for (int code = 0; code < outcome_count(spec, d); ++code)
          next.push_back(join_history(h, outcome_token(spec, code_digits(code, m, d))));
      }
    }
    level = std::move(next);
  }
  return level;
}

DensityState initial_global_state(const DynamicProtocol& p, const DensityState& pair) {
  const Dims dims = p.global_dims();
  check_capacity(product(dims));
  MatrixXc op = MatrixXc::Ones(1, 1);
  Dims tensor_dims;
  for (std::size_t c = 0; c < p.layout.size(); ++c) {
    op = kron(op, pair.op());
    tensor_dims.insert(tensor_dims.end(), pair.dims().begin(), pair.dims().end());
  }
  Wires order(dims.size());
  for (std::size_t c = 0; c < p.layout.size(); ++c) {
    order[p.layout[c].alice_wire] = static_cast<int>(2 * c);
    order[p.n_alice_wires + p.layout[c].bob_wire] = static_cast<int>(2 * c + 1);
  }
  return DensityState(dims, permute_matrix(op, tensor_dims, order));
}

ProtocolRun::ProtocolRun(const DynamicProtocol& p, const ParamTable& params, const NoisyStateSpec* source,
                         const MatrixXc* initial)
    : protocol_(p), params_(params), dims_(p.global_dims()) {
  p.validate();
  check_capacity(product(dims_));
  const int d = p.local_dim();
  const int na = p.n_alice_wires;
  const Wires a = alice_block(na);
  const Wires b = bob_block(na, p.n_bob_wires);

  const DensityState pair = make_state(source ? *source : p.initial_state);
  if (pair.dims() != Dims{d, d}) throw DimensionError("shared pair dimension does not match the protocol");
  std::map<std::size_t, MatrixXc> fresh_cache;
  fresh_ops_.resize(p.rounds.size());
  for (std::size_t r = 0; r < p.rounds.size(); ++r) {
    const auto& spec = p.rounds[r];
    if (!spec.refresh) continue;
    const DensityState one = source ? pair : make_state(*spec.refresh);
    MatrixXc op = MatrixXc::Ones(1, 1);
    for (std::size_t k = 0; k < spec.refreshed_alice().size(); ++k) op = kron(op, one.op());
    fresh_ops_[r] = std::move(op);
  }

  std::vector<std::pair<std::string, MatrixXc>> level;
  if (initial) {
    const auto dim = static_cast<Eigen::Index>(product(dims_));
    if (initial->rows() != dim || initial->cols() != dim) throw DimensionError("initial state has the wrong size");
    level.emplace_back("", *initial);
  } else {
    level.emplace_back("", initial_global_state(p, pair).op());
  }
  levels_.resize(p.rounds.size());

  for (int r = 0; r < static_cast<int>(p.rounds.size()); ++r) {
    const RoundSpec& spec = p.rounds[r];
    const Wires m = measured_global(p, spec);
    const std::vector<int> codes = outcome_codes(dims_, m);
    const int n_out = outcome_count(spec, d);
    const std::optional<RefreshLayout> lay =
        spec.refresh ? std::optional<RefreshLayout>(refresh_layout(p, spec)) : std::nullopt;
    auto finish = [&](MatrixXc child) {
      return lay ? refresh_forward(child, dims_, *lay, fresh_ops_[r]) : child;
    };

    std::vector<std::pair<std::string, MatrixXc>> next;
    for (auto& [history, rho] : level) {
      const Eigen::VectorXd& theta = params.at(r, history);
      if (theta.size() != round_param_count(spec))
        throw std::invalid_argument("parameter vector for round " + std::to_string(r) + " has wrong length");
      Node node;
      node.round = r;
      node.history = history;
      if (!spec.alice.gates.empty()) node.ua = circuit_unitary(spec.alice, theta.head(spec.alice.n_params));
      if (!spec.bob.gates.empty()) node.ub = circuit_unitary(spec.bob, theta.tail(spec.bob.n_params));
      node.rho_rot = conjugate(rho, node.ua, node.ub, dims_, a, b);
      node.codes_to_child.assign(static_cast<std::size_t>(n_out), -1);

      if (spec.policy.mode == BranchPolicy::Mode::Postselect) {
        std::vector<bool> accepted(static_cast<std::size_t>(n_out), false);
        for (const auto& pat : spec.policy.accepted) accepted[pattern_code(pat, d)] = true;
        MatrixXc kept = project_outcomes<double>(node.rho_rot, codes, accepted);
        const double rejected = node.rho_rot.trace().real() - kept.trace().real();
        branches_.push_back({join_history(history, "reject"), rejected, false});
        for (int c = 0; c < n_out; ++c)
          if (accepted[c]) node.codes_to_child[c] = static_cast<int>(next.size());
        next.emplace_back(join_history(history, postselect_token(spec)), finish(std::move(kept)));
      } else {
        const std::size_t nm = m.size();
        for (int c = 0; c < n_out; ++c) {
          std::vector<bool> accepted(static_cast<std::size_t>(n_out), false);
          accepted[c] = true;
          node.codes_to_child[c] = static_cast<int>(next.size());
          next.emplace_back(join_history(history, outcome_token(spec, code_digits(c, nm, d))),
                            finish(project_outcomes<double>(node.rho_rot, codes, accepted)));
        }
      }
      levels_[r].push_back(std::move(node));
    }
    level = std::move(next);
  }

  for (auto& [history, rho] : level) {
    const double w = rho.trace().real();
    branches_.push_back({history, w, true});
    leaves_.push_back({history, std::move(rho), w});
  }
}

double ProtocolRun::accepted_weight() const {
  double w = 0.0;
  for (const auto& leaf : leaves_) w += leaf.weight;
  return w;
}

ParamTable ProtocolRun::backward(const std::vector<MatrixXc>& leaf_observables) const {
  if (leaf_observables.size() != leaves_.size()) throw std::invalid_argument("one observable per leaf is required");
  const DynamicProtocol& p = protocol_;
  const int na = p.n_alice_wires;
  const Wires a = alice_block(na);
  const Wires b = bob_block(na, p.n_bob_wires);
  ParamTable grad;

  std::vector<MatrixXc> child_obs = leaf_observables;
  for (int r = static_cast<int>(p.rounds.size()) - 1; r >= 0; --r) {
    const RoundSpec& spec = p.rounds[r];
    const std::vector<int> codes = outcome_codes(dims_, measured_global(p, spec));
    const std::optional<RefreshLayout> lay =
        spec.refresh ? std::optional<RefreshLayout>(refresh_layout(p, spec)) : std::nullopt;
    if (lay)
      for (auto& o : child_obs) o = refresh_adjoint(o, dims_, *lay, fresh_ops_[r]);

    std::vector<MatrixXc> parent_obs;
    parent_obs.reserve(levels_[r].size());
    for (const Node& node : levels_[r]) {
      std::vector<const MatrixXc*> per_code(node.codes_to_child.size(), nullptr);
      for (std::size_t c = 0; c < per_code.size(); ++c)
        if (node.codes_to_child[c] >= 0) per_code[c] = &child_obs[node.codes_to_child[c]];
      const MatrixXc obs = merge_projected(per_code, codes);

      const Eigen::VectorXd& theta = params_.at(r, node.history);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
      auto party_grad = [&](const ParamCircuit& c, const MatrixXc& u, const Wires& wires, Eigen::Index offset,
                            const Eigen::VectorXd& slots) {
        if (c.n_params == 0) return;
        const MatrixXc env = partial_trace_of_product<double>(node.rho_rot, obs, dims_, wires);
        const MatrixXc u_dag = u.adjoint();
        const auto derivs = circuit_unitary_derivatives(c, slots);
        for (int k = 0; k < c.n_params; ++k) g(offset + k) = 2.0 * real_trace_product(derivs[k] * u_dag, env);
      };
      party_grad(spec.alice, node.ua, a, 0, theta.head(spec.alice.n_params));
      party_grad(spec.bob, node.ub, b, spec.alice.n_params, theta.tail(spec.bob.n_params));
      grad.set(r, node.history, std::move(g));

      const MatrixXc ua_dag = node.ua.size() ? MatrixXc(node.ua.adjoint()) : MatrixXc();
      const MatrixXc ub_dag = node.ub.size() ? MatrixXc(node.ub.adjoint()) : MatrixXc();
      parent_obs.push_back(conjugate(obs, ua_dag, ub_dag, dims_, a, b));
    }
    child_obs = std::move(parent_obs);
  }
  return grad;
}

RunOutcome execute(const DynamicProtocol& p, const ParamTable& params) { return summarize(p, ProtocolRun(p, params)); }

RunOutcome summarize(const DynamicProtocol& p, const ProtocolRun& run) {
  const double w = run.accepted_weight();
  if (!(w > 0.0)) throw ZeroWeightError("no branch is accepted with nonzero probability");
  MatrixXc sum = MatrixXc::Zero(run.leaves().front().op.rows(), run.leaves().front().op.cols());
  for (const auto& leaf : run.leaves()) sum += leaf.op;
  const DensityState global(run.dims(), std::move(sum));
  const Wires keep{p.output.alice_wire, p.n_alice_wires + p.output.bob_wire};
  RunOutcome out{w, partial_trace(global, keep).normalized(), run.branches()};
  return out;
}

double execute_discrimination(const DynamicProtocol& p, const ParamTable& params, const NoisyStateSpec& state0,
                              const NoisyStateSpec& state1, std::pair<double, double> priors) {
  if (!p.verdict_wire) throw std::invalid_argument("discrimination needs a verdict wire");
  if (priors.first < 0.0 || priors.second < 0.0 || std::abs(priors.first + priors.second - 1.0) > 1e-12)
    throw std::invalid_argument("priors must be nonnegative and sum to 1");
  const std::vector<int> verdict = outcome_codes(p.global_dims(), {p.n_alice_wires + *p.verdict_wire});
  double success = 0.0;
  for (int k = 0; k < 2; ++k) {
    const ProtocolRun run(p, params, k == 0 ? &state0 : &state1);
    double correct = 0.0;
    for (const auto& leaf : run.leaves())
      for (Eigen::Index i = 0; i < leaf.op.rows(); ++i)
        if (verdict[i] == k) correct += leaf.op(i, i).real();
    success += (k == 0 ? priors.first : priors.second) * correct;
  }
  return success;
}

double helstrom_bound(const DensityState& rho0, const DensityState& rho1, int copies,
                      std::pair<double, double> priors) {
  if (copies < 1) throw std::invalid_argument("copies must be positive");
  DensityState a = rho0;
  DensityState b = rho1;
  for (int k = 1; k < copies; ++k) {
    a = tensor(a, rho0);
    b = tensor(b, rho1);
  }
  const MatrixXc diff = priors.first * a.op() - priors.second * b.op();
  const MatrixXc herm = (diff + diff.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * (1.0 + solver.eigenvalues().cwiseAbs().sum());
}

std::string serialize_protocol(const DynamicProtocol& p) {
  std::vector<const ParamCircuit*> unique;
  auto name_of = [&](const ParamCircuit& c) {
    for (std::size_t k = 0; k < unique.size(); ++k)
      if (*unique[k] == c) return "c" + std::to_string(k);
    unique.push_back(&c);
    return "c" + std::to_string(unique.size() - 1);
  };
  std::ostringstream rounds;
  for (const auto& r : p.rounds) {
    rounds << "round alice=" << name_of(r.alice) << " bob=" << name_of(r.bob)
           << " measure_alice=" << wires_to_text(r.measured_alice) << " measure_bob=" << wires_to_text(r.measured_bob)
           << " policy=";
    if (r.policy.mode == BranchPolicy::Mode::ConditionOnOutcomes) {
      rounds << "condition";
    } else {
      rounds << "postselect:";
      for (std::size_t k = 0; k < r.policy.accepted.size(); ++k) {
        if (k) rounds << '|';
        for (int digit : r.policy.accepted[k]) rounds << digit;
      }
    }
    rounds << " refresh=" << (r.refresh ? state_to_text(*r.refresh) : "none");
    if (!r.refresh_alice.empty())
      rounds << " refresh_alice=" << wires_to_text(r.refresh_alice) << " refresh_bob=" << wires_to_text(r.refresh_bob);
    rounds << '\n';
  }
  std::ostringstream os;
  os << "protocol 1\n";
  os << "wires " << p.n_alice_wires << ' ' << p.n_bob_wires << '\n';
  os << "state " << state_to_text(p.initial_state) << '\n';
  for (const auto& c : p.layout) os << "copy " << c.alice_wire << ' ' << c.bob_wire << '\n';
  os << "output " << p.output.alice_wire << ' ' << p.output.bob_wire << '\n';
  if (p.verdict_wire) os << "verdict " << *p.verdict_wire << '\n';
  for (std::size_t k = 0; k < unique.size(); ++k) os << "define c" << k << '\n' << serialize_circuit(*unique[k]);
  os << rounds.str();
  os << "end\n";
  return os.str();
}

DynamicProtocol parse_protocol(const std::string& doc) {
  std::istringstream in(doc);
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "protocol 1")
    throw std::invalid_argument("expected 'protocol 1' header");
  DynamicProtocol p;
  std::map<std::string, ParamCircuit> circuits;
  bool closed = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "end") {
      closed = true;
      break;
    }
    if (key == "wires") {
      ls >> p.n_alice_wires >> p.n_bob_wires;
    } else if (key == "state") {
      std::string s;
      ls >> s;
      p.initial_state = state_from_text(s);
    } else if (key == "copy") {
      PairPlacement c;
      ls >> c.alice_wire >> c.bob_wire;
      p.layout.push_back(c);
    } else if (key == "output") {
      ls >> p.output.alice_wire >> p.output.bob_wire;
    } else if (key == "verdict") {
      int v = 0;
      ls >> v;
      p.verdict_wire = v;
    } else if (key == "define") {
      std::string name;
      ls >> name;
      circuits[name] = read_circuit(in);
      continue;
    } else if (key == "round") {
      RoundSpec r;
      for (std::string field; ls >> field;) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad round field '" + field + "'");
        const std::string k = field.substr(0, eq);
        const std::string v = field.substr(eq + 1);
        auto circuit = [&]() -> const ParamCircuit& {
          const auto it = circuits.find(v);
          if (it == circuits.end()) throw std::invalid_argument("undefined circuit '" + v + "'");
          return it->second;
        };
        if (k == "alice") {
          r.alice = circuit();
        } else if (k == "bob") {
          r.bob = circuit();
        } else if (k == "measure_alice") {
          r.measured_alice = wires_from_text(v);
        } else if (k == "measure_bob") {
          r.measured_bob = wires_from_text(v);
        } else if (k == "policy") {
          if (v == "condition") {
            r.policy = BranchPolicy::condition();
          } else if (v.rfind("postselect:", 0) == 0) {
            r.policy.mode = BranchPolicy::Mode::Postselect;
            for (const auto& pat : text::split(v.substr(11), '|')) {
              std::vector<int> digits;
              for (char ch : pat) digits.push_back(ch - '0');
              r.policy.accepted.push_back(std::move(digits));
            }
          } else {
            throw std::invalid_argument("bad policy '" + v + "'");
          }
        } else if (k == "refresh_alice") {
          r.refresh_alice = wires_from_text(v);
        } else if (k == "refresh_bob") {
          r.refresh_bob = wires_from_text(v);
        } else if (k == "refresh") {
          if (v != "none") r.refresh = state_from_text(v);
        } else {
          throw std::invalid_argument("unknown round field '" + k + "'");
        }
      }
      p.rounds.push_back(std::move(r));
      continue;
    } else {
      throw std::invalid_argument("unknown protocol line '" + key + "'");
    }
    if (ls.fail()) throw std::invalid_argument("malformed protocol line '" + line + "'");
  }
  if (!closed) throw std::invalid_argument("protocol document is not closed by 'end'");
  p.validate();
  return p;
}

}  // namespace dlocc
