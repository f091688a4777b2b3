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


// Exact execution of dynamic LOCC protocols.
//
// Global wire order is [A_0 .. A_{na-1}, B_0 .. B_{nb-1}]. Each round applies
// Alice's and Bob's local circuits, measures some wires in the computational
// basis, branches, and optionally replaces the measured wires with fresh
// pairs. Branches are kept as unnormalized density operators, so every weight
// is an exact probability.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlocc/channels.hpp"
#include "dlocc/circuits.hpp"
#include "dlocc/qmath.hpp"

namespace dlocc {

struct BranchPolicy {
  enum class Mode { Postselect, ConditionOnOutcomes };

  Mode mode = Mode::Postselect;
  /// Postselect only. Each pattern lists one outcome per measured wire (Alice's
  /// wires first); branches matching any pattern are kept and summed.
  std::vector<std::vector<int>> accepted;

  static BranchPolicy postselect(std::vector<int> pattern) { return {Mode::Postselect, {std::move(pattern)}}; }
  static BranchPolicy postselect_any(std::vector<std::vector<int>> patterns) {
    return {Mode::Postselect, std::move(patterns)};
  }
  static BranchPolicy condition() { return {Mode::ConditionOnOutcomes, {}}; }

  friend bool operator==(const BranchPolicy&, const BranchPolicy&) = default;
};

/// Measured wire indices are local to each party's block.
struct RoundSpec {
  ParamCircuit alice;
  ParamCircuit bob;
  Wires measured_alice;
  Wires measured_bob;
  BranchPolicy policy;
  /// Fresh pair placed on (refreshed_alice()[i], refreshed_bob()[i]) for every i.
  std::optional<NoisyStateSpec> refresh;
  /// Explicit refresh positions, for wires collapsed in an earlier sub-round.
  Wires refresh_alice;
  Wires refresh_bob;

  const Wires& refreshed_alice() const { return refresh_alice.empty() ? measured_alice : refresh_alice; }
  const Wires& refreshed_bob() const { return refresh_bob.empty() ? measured_bob : refresh_bob; }

  friend bool operator==(const RoundSpec&, const RoundSpec&) = default;
};

struct PairPlacement {
  int alice_wire = 0;
  int bob_wire = 0;
  friend bool operator==(const PairPlacement&, const PairPlacement&) = default;
};

struct DynamicProtocol {
  int n_alice_wires = 0;
  int n_bob_wires = 0;
  NoisyStateSpec initial_state;
  /// One entry per initial copy; together they must cover every wire once.
  std::vector<PairPlacement> layout;
  std::vector<RoundSpec> rounds;
  /// Pair whose reduced state is the distillation output.
  PairPlacement output;
  /// Bob's wire read out as the discrimination verdict.
  std::optional<int> verdict_wire;

  int local_dim() const { return initial_state.local_dim(); }
  Dims global_dims() const {
    return Dims(static_cast<std::size_t>(n_alice_wires + n_bob_wires), local_dim());
  }
  int copies_consumed() const;
  /// Throws std::invalid_argument when the structure is inconsistent.
  void validate() const;

  friend bool operator==(const DynamicProtocol&, const DynamicProtocol&) = default;
};

/// Key of the parameters used at `round` after the outcome history `history`.
/// Histories are '/'-joined per-round tokens; the root history is "".
/// A conditioned round contributes "A<digits>B<digits>", a postselected round
/// its accepted patterns in the same form joined by '|'.
using ParamKey = std::pair<int, std::string>;

/// Per-(round, history) parameter vectors; each vector is Alice's slots then Bob's.
class ParamTable {
 public:
  void set(int round, const std::string& history, Eigen::VectorXd params) {
    entries_[{round, history}] = std::move(params);
  }
  const Eigen::VectorXd& at(int round, const std::string& history) const;
  bool contains(int round, const std::string& history) const { return entries_.count({round, history}) > 0; }
  std::size_t size() const { return entries_.size(); }
  const std::map<ParamKey, Eigen::VectorXd>& entries() const { return entries_; }

  /// Every reachable key of `p`, filled with zeros.
  static ParamTable zeros(const DynamicProtocol& p);
  /// Concatenates vectors in parameter_keys order.
  Eigen::VectorXd flatten(const DynamicProtocol& p) const;
  static ParamTable unflatten(const DynamicProtocol& p, const Eigen::VectorXd& flat);

  friend bool operator==(const ParamTable&, const ParamTable&) = default;

 private:
  std::map<ParamKey, Eigen::VectorXd> entries_;
};

struct BranchRecord {
  std::string history;
  double weight = 0.0;
  bool accepted = false;
};

struct RunOutcome {
  double success_probability = 0.0;
  /// Normalized reduced state of the output pair over the accepted branches.
  DensityState conditional_state = DensityState::maximally_mixed({2, 2});
  std::vector<BranchRecord> branches;
};

/// Every history reaching the end of the protocol (structure only).
std::vector<std::string> reachable_histories(const DynamicProtocol& p);
/// Every (round, history) at which parameters are read, in execution order.
std::vector<ParamKey> parameter_keys(const DynamicProtocol& p);
/// Parameter count of each round (Alice's slots plus Bob's).
int round_param_count(const RoundSpec& r);

/// Forward pass with cached intermediates, reusable for adjoint gradients.
/// `source` overrides the protocol's initial and refresh states when set.
class ProtocolRun {
 public:
  /// `initial` replaces the product of initial copies with an arbitrary global state.
  ProtocolRun(const DynamicProtocol& p, const ParamTable& params, const NoisyStateSpec* source = nullptr,
              const MatrixXc* initial = nullptr);
  ProtocolRun(const DynamicProtocol& p, const ParamTable& params, const NoisyStateSpec& source)
      : ProtocolRun(p, params, &source) {}

  struct Leaf {
    std::string history;
    MatrixXc op;  // unnormalized global state
    double weight;
  };

  const std::vector<Leaf>& leaves() const { return leaves_; }
  const std::vector<BranchRecord>& branches() const { return branches_; }
  double accepted_weight() const;
  const Dims& dims() const { return dims_; }

  /// Gradient of L = sum_k tr(O_k leaf_k) with respect to every parameter,
  /// given one Hermitian observable per leaf.
  ParamTable backward(const std::vector<MatrixXc>& leaf_observables) const;

 private:
  struct Node {
    int round;
    std::string history;
    MatrixXc rho_rot;
    MatrixXc ua;
    MatrixXc ub;
    std::vector<int> codes_to_child;  // child index per outcome code, -1 if dropped
  };

  DynamicProtocol protocol_;
  ParamTable params_;
  Dims dims_;
  std::vector<std::vector<Node>> levels_;
  std::vector<Leaf> leaves_;
  std::vector<BranchRecord> branches_;
  std::vector<MatrixXc> fresh_ops_;  // per round, tensor of fresh pairs (empty if none)
};

RunOutcome execute(const DynamicProtocol& p, const ParamTable& params);
/// Aggregates the accepted leaves of a finished run; throws ZeroWeightError if none carry weight.
RunOutcome summarize(const DynamicProtocol& p, const ProtocolRun& run);

/// Average success of reading Bob's verdict wire as the hypothesis index. Both
/// the initial copies and every refresh use the hypothesis state.
double execute_discrimination(const DynamicProtocol& p, const ParamTable& params, const NoisyStateSpec& state0,
                              const NoisyStateSpec& state1, std::pair<double, double> priors = {0.5, 0.5});

/// Global-order density operator of `copies` pairs placed by `layout`.
DensityState initial_global_state(const DynamicProtocol& p, const DensityState& pair);

/// Helstrom bound 1/2 (1 + || p0 rho0 - p1 rho1 ||_1) on n-copy product states.
double helstrom_bound(const DensityState& rho0, const DensityState& rho1, int copies,
                      std::pair<double, double> priors = {0.5, 0.5});

/// Structured text form; circuits are stored once and referenced by name.
std::string serialize_protocol(const DynamicProtocol& p);
DynamicProtocol parse_protocol(const std::string& text);

}  // namespace dlocc
