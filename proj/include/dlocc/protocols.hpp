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


// Reference protocols and closed-form fidelity recurrences.
#pragma once

#include <utility>

#include "dlocc/circuits.hpp"
#include "dlocc/dlocc.hpp"

namespace dlocc {

// ---- closed forms ---------------------------------------------------------

/// DEJMPS on two S-family pairs with fidelities fj, fk.
double oracle_lemma_de_s(double fj, double fk);

/// Dynamic DEJMPS recurrence on S states, evaluated exactly as the piecewise
/// cycle n = 3k-1, 3k, 3k+1 reads. Values outside [0, 1] are returned as is;
/// see ddejmps_in_range.
double oracle_ddejmps(int n, double gamma);
bool ddejmps_in_range(int n, double gamma);

/// f_2 = (1 + sqrt(gamma (2 - gamma)))/2, then f_n = f1 f_{n-1} / (1 - f1 + (2 f1 - 1) f_{n-1}).
double oracle_dloccnet_s(int n, double gamma);

struct EtaUpdate {
  double b;
  double f_eta;
};
/// One learned round on (Phi+ + a (|00><11| + h.c.)) (x) S(gamma_star).
EtaUpdate oracle_eta_update(double a, double gamma_star);

/// 4 -> 1 isotropic map on inputs with fidelities (fj, fk, fk, fk).
double oracle_iso_4to1(double fj, double fk);
/// i iterations of the 4 -> 1 map on 4^i copies.
double oracle_itr_iso(int i, double p);
/// i dynamic rounds of the 4 -> 1 map on 3i + 1 copies.
double oracle_dyn_iso(int i, double p);

enum class IsoMethod { Iterative, Dynamic };
int copies_consumed(IsoMethod method, int i);

/// Builds isotropic states stage by stage, using oracle_iso_4to1 as the map
/// each stage realizes, and returns the measured fidelity after every stage.
std::vector<double> compose_iterative_4to1(double p, int stages);

// ---- protocols ------------------------------------------------------------

struct FixedRound {
  ParamCircuit alice;
  ParamCircuit bob;
  BranchPolicy policy;
};

/// Bilateral RX(+-pi/2), CNOT from wire 0 to wire 1 on each side, accept equal outcomes.
FixedRound dejmps_round();

/// DEJMPS applied round after round, each fresh S pair entering on wire 1.
DynamicProtocol build_dynamic_dejmps(int n, double gamma);

/// The two-wire learned circuit with closed-form angles; n - 1 rounds.
DynamicProtocol build_s_learned_protocol(int n, double gamma);

/// Same round structure with a trainable hardware-efficient block per party.
DynamicProtocol build_s_ansatz_protocol(int n, double gamma, int layers = 3);

/// RY per wire, CNOT, RY per wire on each side (4 slots per party per round).
DynamicProtocol build_gad_ansatz_protocol(int n_copies, const NoisyStateSpec& pair);

/// Four pairs per party block. Intermediate rounds measure the last wire of
/// each block and refresh it; the final round measures wires 1..3. n - 3 rounds.
DynamicProtocol build_iso_dynamic_protocol(int n_copies, double p, int layers = 3);

/// Alternating Alice/Bob sub-rounds with outcome conditioning. One register per
/// party for a single copy, two otherwise; the verdict is Bob's last register.
DynamicProtocol build_discrimination_protocol(int n_copies, const NoisyStateSpec& pair, int layers = 2);

/// Two qutrits per party, Givens rotations around a CSUM, postselect 00.
DynamicProtocol build_qutrit_protocol(int n_copies, double p, int layers = 1);

/// Parameters for protocols whose circuits carry no slots.
ParamTable empty_params(const DynamicProtocol& p);

}  // namespace dlocc
