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


#include "dlocc/protocols.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dlocc {

namespace {

const double kPi = std::acos(-1.0);

void require_copies(int n, int minimum) {
  if (n < minimum) throw std::invalid_argument("need at least " + std::to_string(minimum) + " copies");
}

RoundSpec make_round(ParamCircuit alice, ParamCircuit bob, Wires ma, Wires mb, BranchPolicy policy,
                     std::optional<NoisyStateSpec> refresh) {
  RoundSpec r;
  r.alice = std::move(alice);
  r.bob = std::move(bob);
  r.measured_alice = std::move(ma);
  r.measured_bob = std::move(mb);
  r.policy = std::move(policy);
  r.refresh = std::move(refresh);
  return r;
}

DynamicProtocol two_wire_frame(const NoisyStateSpec& pair) {
  DynamicProtocol p;
  p.n_alice_wires = 2;
  p.n_bob_wires = 2;
  p.initial_state = pair;
  p.layout = {{0, 0}, {1, 1}};
  p.output = {0, 0};
  return p;
}

ParamCircuit ry_cnot_ry() {
  ParamCircuit c(2, 4);
  c.add(Gate::ry(0, Slot{0})).add(Gate::ry(1, Slot{1}));
  c.add(Gate::cnot(0, 1));
  c.add(Gate::ry(0, Slot{2})).add(Gate::ry(1, Slot{3}));
  return c;
}

}  // namespace

double oracle_lemma_de_s(double fj, double fk) {
  const double den = 1.0 - fj - fk + 2.0 * fj * fk;
  if (!(den > 0.0)) throw std::domain_error("nonpositive denominator");
  return fj * fk / den;
}

double oracle_ddejmps(int n, double gamma) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  const double f1 = (1.0 + gamma) / 2.0;
  double f = f1;
  for (int m = 2; m <= n; ++m) {
    switch (m % 3) {
      case 2:  // m = 3k - 1
        f = f1 * f / (1.0 - f1 + (2.0 * f1 - 1.0) * f);
        break;
      case 0:  // m = 3k
        f = f1 * f / (f + f1 - 1.0);
        break;
      default:  // m = 3k + 1
        f = f / (2.0 * f - 1.0);
        break;
    }
  }
  return f;
}

bool ddejmps_in_range(int n, double gamma) {
  const double f = oracle_ddejmps(n, gamma);
  return std::isfinite(f) && f >= 0.0 && f <= 1.0;
}

double oracle_dloccnet_s(int n, double gamma) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  const double f1 = (1.0 + gamma) / 2.0;
  double f = 0.5 * (1.0 + std::sqrt(gamma * (2.0 - gamma)));
  for (int m = 3; m <= n; ++m) f = f1 * f / (1.0 - f1 + (2.0 * f1 - 1.0) * f);
  return f;
}

EtaUpdate oracle_eta_update(double a, double gamma_star) {
  const double den = 1.0 + gamma_star + 2.0 * a * gamma_star;
  if (std::abs(den) < std::numeric_limits<double>::min()) throw std::domain_error("vanishing denominator");
  return {a * (1.0 - gamma_star) / den, (1.0 + a) * (1.0 + gamma_star) / den};
}

double oracle_iso_4to1(double fj, double fk) {
  const double den = 3.0 + fj * (1.0 - 4.0 * fk) * (1.0 - 4.0 * fk) - 3.0 * fk;
  if (!(den > 0.0)) throw std::domain_error("nonpositive denominator");
  return (1.0 - (2.0 + 3.0 * fj) * fk + (1.0 + 12.0 * fj) * fk * fk) / den;
}

double oracle_itr_iso(int i, double p) {
  if (i < 1) throw std::invalid_argument("iteration count must be positive");
  double f = (1.0 + 3.0 * p) / 4.0;
  for (int k = 0; k < i; ++k) f = (1.0 - 4.0 * f + 6.0 * f * f) / (3.0 - 8.0 * f + 8.0 * f * f);
  return f;
}

double oracle_dyn_iso(int i, double p) {
  if (i < 1) throw std::invalid_argument("iteration count must be positive");
  const double f0 = (1.0 + 3.0 * p) / 4.0;
  double f = (1.0 - 2.0 * p + 9.0 * p * p) / (4.0 - 8.0 * p + 12.0 * p * p);
  for (int k = 2; k <= i; ++k)
    f = (1.0 - 2.0 * f0 + f0 * f0 - 3.0 * f0 * f + 12.0 * f0 * f0 * f) /
        (3.0 - 3.0 * f0 + f - 8.0 * f0 * f + 16.0 * f0 * f0 * f);
  return f;
}

int copies_consumed(IsoMethod method, int i) {
  if (i < 1) throw std::invalid_argument("iteration count must be positive");
  if (method == IsoMethod::Dynamic) return 3 * i + 1;
  int n = 1;
  for (int k = 0; k < i; ++k) n *= 4;
  return n;
}

std::vector<double> compose_iterative_4to1(double p, int stages) {
  if (stages < 1) throw std::invalid_argument("stage count must be positive");
  const auto bell = max_entangled(2);
  DensityState stage = isotropic_state(p);
  std::vector<double> out;
  for (int s = 0; s < stages; ++s) {
    const double f_in = fidelity_pure(stage, bell);
    stage = isotropic_with_fidelity(oracle_iso_4to1(f_in, f_in));
    out.push_back(fidelity_pure(stage, bell));
  }
  return out;
}

FixedRound dejmps_round() {
  FixedRound r{ParamCircuit(2, 0), ParamCircuit(2, 0), BranchPolicy::postselect_any({{0, 0}, {1, 1}})};
  for (int w : {0, 1}) {
    r.alice.add(Gate::rx(w, kPi / 2));
    r.bob.add(Gate::rx(w, -kPi / 2));
  }
  r.alice.add(Gate::cnot(0, 1));
  r.bob.add(Gate::cnot(0, 1));
  return r;
}

DynamicProtocol build_dynamic_dejmps(int n, double gamma) {
  require_copies(n, 2);
  const NoisyStateSpec pair = NoisyStateSpec::s_state(gamma);
  DynamicProtocol p = two_wire_frame(pair);
  const FixedRound d = dejmps_round();
  for (int r = 0; r < n - 1; ++r)
    p.rounds.push_back(make_round(d.alice, d.bob, {1}, {1}, d.policy,
                                  r < n - 2 ? std::optional<NoisyStateSpec>(pair) : std::nullopt));
  return p;
}

DynamicProtocol build_s_learned_protocol(int n, double gamma) {
  require_copies(n, 2);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::domain_error("gamma must lie in [0, 1]");
  const NoisyStateSpec pair = NoisyStateSpec::s_state(gamma);
  DynamicProtocol p = two_wire_frame(pair);
  for (int r = 0; r < n - 1; ++r) {
    const double theta = r == 0 ? std::acos(1.0 - gamma) + kPi : -kPi / 2;
    ParamCircuit alice(2, 0);
    alice.add(Gate::cnot(1, 0)).add(Gate::ry(1, theta));
    ParamCircuit bob(2, 0);
    bob.add(Gate::cnot(1, 0)).add(Gate::cnot(0, 1)).add(Gate::ry(1, theta));
    p.rounds.push_back(make_round(alice, bob, {1}, {1}, BranchPolicy::postselect({0, 0}),
                                  r < n - 2 ? std::optional<NoisyStateSpec>(pair) : std::nullopt));
  }
  return p;
}

DynamicProtocol build_s_ansatz_protocol(int n, double gamma, int layers) {
  require_copies(n, 2);
  const NoisyStateSpec pair = NoisyStateSpec::s_state(gamma);
  DynamicProtocol p = two_wire_frame(pair);
  const ParamCircuit block = hardware_efficient_ansatz(2, layers);
  for (int r = 0; r < n - 1; ++r)
    p.rounds.push_back(make_round(block, block, {1}, {1}, BranchPolicy::postselect({0, 0}),
                                  r < n - 2 ? std::optional<NoisyStateSpec>(pair) : std::nullopt));
  return p;
}

DynamicProtocol build_gad_ansatz_protocol(int n_copies, const NoisyStateSpec& pair) {
  require_copies(n_copies, 2);
  DynamicProtocol p = two_wire_frame(pair);
  const ParamCircuit block = ry_cnot_ry();
  for (int r = 0; r < n_copies - 1; ++r)
    p.rounds.push_back(make_round(block, block, {1}, {1}, BranchPolicy::postselect({0, 0}),
                                  r < n_copies - 2 ? std::optional<NoisyStateSpec>(pair) : std::nullopt));
  return p;
}

DynamicProtocol build_iso_dynamic_protocol(int n_copies, double p, int layers) {
  require_copies(n_copies, 4);
  const NoisyStateSpec pair = NoisyStateSpec::isotropic(p);
  DynamicProtocol proto;
  proto.n_alice_wires = 4;
  proto.n_bob_wires = 4;
  proto.initial_state = pair;
  proto.layout = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  proto.output = {0, 0};
  const ParamCircuit block = hardware_efficient_ansatz(4, layers);
  for (int r = 0; r < n_copies - 4; ++r)
    proto.rounds.push_back(make_round(block, block, {3}, {3}, BranchPolicy::postselect({0, 0}), pair));
  proto.rounds.push_back(
      make_round(block, block, {1, 2, 3}, {1, 2, 3}, BranchPolicy::postselect({0, 0, 0, 0, 0, 0}), std::nullopt));
  return proto;
}

DynamicProtocol build_discrimination_protocol(int n_copies, const NoisyStateSpec& pair, int layers) {
  require_copies(n_copies, 1);
  DynamicProtocol p;
  p.initial_state = pair;
  if (n_copies == 1) {
    p.n_alice_wires = p.n_bob_wires = 1;
    p.layout = {{0, 0}};
    p.verdict_wire = 0;
    p.rounds.push_back(make_round(hardware_efficient_ansatz(1, layers), ParamCircuit(1, 0), {0}, {},
                                  BranchPolicy::condition(), std::nullopt));
    p.rounds.push_back(make_round(ParamCircuit(1, 0), hardware_efficient_ansatz(1, layers), {}, {},
                                  BranchPolicy::condition(), std::nullopt));
    return p;
  }
  p.n_alice_wires = p.n_bob_wires = 2;
  p.layout = {{0, 0}, {1, 1}};
  p.verdict_wire = 1;
  const ParamCircuit block = hardware_efficient_ansatz(2, layers);
  const ParamCircuit idle(2, 0);
  for (int e = 1; e <= n_copies - 1; ++e) {
    p.rounds.push_back(make_round(block, idle, {0}, {}, BranchPolicy::condition(), std::nullopt));
    RoundSpec bob = make_round(idle, block, {}, {0}, BranchPolicy::condition(), std::nullopt);
    if (e < n_copies - 1) {
      bob.refresh = pair;
      bob.refresh_alice = {0};
      bob.refresh_bob = {0};
    }
    p.rounds.push_back(std::move(bob));
  }
  p.rounds.push_back(make_round(block, idle, {0, 1}, {}, BranchPolicy::condition(), std::nullopt));
  p.rounds.push_back(make_round(idle, block, {}, {}, BranchPolicy::condition(), std::nullopt));
  return p;
}

DynamicProtocol build_qutrit_protocol(int n_copies, double p, int layers) {
  require_copies(n_copies, 2);
  const NoisyStateSpec pair = NoisyStateSpec::qutrit_isotropic(p);
  DynamicProtocol proto = two_wire_frame(pair);
  const ParamCircuit block = qudit_ansatz(2, 3, layers);
  for (int r = 0; r < n_copies - 1; ++r)
    proto.rounds.push_back(make_round(block, block, {1}, {1}, BranchPolicy::postselect({0, 0}),
                                      r < n_copies - 2 ? std::optional<NoisyStateSpec>(pair) : std::nullopt));
  return proto;
}

ParamTable empty_params(const DynamicProtocol& p) { return ParamTable::zeros(p); }

}  // namespace dlocc
