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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dlocc/protocols.hpp"

using namespace dlocc;

namespace {

const double kPi = std::acos(-1.0);

ParamTable random_table(const DynamicProtocol& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  Eigen::VectorXd flat = ParamTable::zeros(p).flatten(p);
  for (Eigen::Index k = 0; k < flat.size(); ++k) flat(k) = u(rng);
  return ParamTable::unflatten(p, flat);
}

MatrixXc random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  MatrixXc g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = {n01(rng), n01(rng)};
  return (g + g.adjoint()) / 2.0;
}

double linear_functional(const ProtocolRun& run, const std::vector<MatrixXc>& obs) {
  double total = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) total += (obs[k] * run.leaves()[k].op).trace().real();
  return total;
}

double total_branch_weight(const std::vector<BranchRecord>& branches) {
  double w = 0.0;
  for (const auto& b : branches) w += b.weight;
  return w;
}

}  // namespace

TEST(Engine, NoMeasurementLeavesStateUnchanged) {
  DynamicProtocol p;
  p.n_alice_wires = p.n_bob_wires = 1;
  p.initial_state = NoisyStateSpec::isotropic(0.6);
  p.layout = {{0, 0}};
  RoundSpec r;
  r.alice = ParamCircuit(1, 0);
  r.bob = ParamCircuit(1, 0);
  r.policy = BranchPolicy::condition();
  p.rounds = {r};
  const RunOutcome out = execute(p, empty_params(p));
  EXPECT_NEAR(out.success_probability, 1.0, 1e-15);
  EXPECT_LT((out.conditional_state.op() - isotropic_state(0.6).op()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Engine, DejmpsOnSStates) {
  const auto bell = max_entangled(2);
  for (double gamma : {0.1, 0.5, 0.9}) {
    const auto p = build_dynamic_dejmps(2, gamma);
    const RunOutcome out = execute(p, empty_params(p));
    const double f1 = (1 + gamma) / 2;
    EXPECT_NEAR(fidelity_pure(out.conditional_state, bell), (1 + gamma) * (1 + gamma) / (2 * (1 + gamma * gamma)),
                1e-12);
    // The acceptance probability is the Lemma's denominator 1 - 2 f1 + 2 f1^2.
    EXPECT_NEAR(out.success_probability, 1 - 2 * f1 + 2 * f1 * f1, 1e-12);
  }
  const auto noiseless = build_dynamic_dejmps(2, 1.0);
  const RunOutcome out = execute(noiseless, empty_params(noiseless));
  EXPECT_NEAR(out.success_probability, 1.0, 1e-12);
  EXPECT_NEAR(fidelity_pure(out.conditional_state, bell), 1.0, 1e-12);
}

TEST(Engine, LearnedSProtocolTwoCopies) {
  const auto p = build_s_learned_protocol(2, 0.5);
  const RunOutcome out = execute(p, empty_params(p));
  EXPECT_NEAR(fidelity_pure(out.conditional_state, max_entangled(2)), (1 + std::sqrt(0.75)) / 2, 1e-12);
}

TEST(Engine, LearnedOutputStaysInSigmaFamily) {
  // Output must be Phi+ + a (|00><11| + |11><00|) with a = f - 1 and all else zero.
  for (int n : {2, 3, 4}) {
    const auto p = build_s_learned_protocol(n, 0.35);
    const MatrixXc rho = execute(p, empty_params(p)).conditional_state.op();
    const double f = oracle_dloccnet_s(n, 0.35);
    MatrixXc expected = max_entangled(2).projector();
    expected(0, 3) += f - 1;
    expected(3, 0) += f - 1;
    EXPECT_LT((rho - expected).cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
  }
}

TEST(Engine, ProbabilityConservationAndDeterminism) {
  std::mt19937_64 rng(5);
  const auto p = build_s_ansatz_protocol(4, 0.4, 2);
  const ParamTable t = random_table(p, rng);
  const RunOutcome a = execute(p, t);
  const RunOutcome b = execute(p, t);
  EXPECT_NEAR(total_branch_weight(a.branches), 1.0, 1e-12);
  EXPECT_EQ(a.success_probability, b.success_probability);
  EXPECT_TRUE(a.conditional_state.op() == b.conditional_state.op());
  EXPECT_EQ(p.copies_consumed(), 4);
}

TEST(Engine, HistoryCounting) {
  DynamicProtocol p;
  p.n_alice_wires = p.n_bob_wires = 1;
  p.initial_state = NoisyStateSpec::isotropic(0.9);
  p.layout = {{0, 0}};
  RoundSpec r;
  r.alice = ParamCircuit(1, 0);
  r.bob = ParamCircuit(1, 0);
  r.measured_alice = {0};
  r.measured_bob = {0};
  r.policy = BranchPolicy::condition();
  p.rounds = {r};
  EXPECT_EQ(reachable_histories(p).size(), 4u);
  EXPECT_EQ(reachable_histories(p)[2], "A1B0");
  p.rounds[0].policy = BranchPolicy::postselect({0, 0});
  EXPECT_EQ(reachable_histories(p), std::vector<std::string>{"A0B0"});

  const auto d = build_discrimination_protocol(2, NoisyStateSpec::isotropic(1.0));
  std::vector<int> per_round(d.rounds.size(), 0);
  for (const auto& key : parameter_keys(d)) ++per_round[key.first];
  EXPECT_EQ(per_round, (std::vector<int>{1, 2, 4, 16}));
  EXPECT_EQ(reachable_histories(d).size(), 16u);
  EXPECT_EQ(d.copies_consumed(), 2);
  EXPECT_EQ(build_discrimination_protocol(3, NoisyStateSpec::isotropic(1.0)).copies_consumed(), 3);
}

TEST(Engine, MissingParametersAreReported) {
  const auto p = build_s_ansatz_protocol(2, 0.5, 1);
  EXPECT_THROW(execute(p, ParamTable()), std::out_of_range);
  ParamTable wrong;
  wrong.set(0, "", Eigen::VectorXd::Zero(3));
  EXPECT_THROW(execute(p, wrong), std::invalid_argument);
}

TEST(Engine, CapacityErrorsPropagate) {
  const std::size_t saved = max_dimension();
  set_max_dimension(64);
  const auto p = build_iso_dynamic_protocol(4, 0.7, 1);
  EXPECT_THROW(execute(p, empty_params(p)), CapacityError);
  set_max_dimension(saved);
}

TEST(Engine, AdjointGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(31);
  const std::vector<DynamicProtocol> protocols = {
      build_s_ansatz_protocol(3, 0.6, 1), build_gad_ansatz_protocol(3, NoisyStateSpec::unilocal_gad_bell(0.4, 0.7)),
      build_discrimination_protocol(3, NoisyStateSpec::noisy_bell_minus(NoiseKind::AmplitudeDamping, 0.3), 1),
      build_qutrit_protocol(3, 0.7, 1)};
  for (const auto& p : protocols) {
    const ParamTable t = random_table(p, rng);
    const ProtocolRun run(p, t);
    std::vector<MatrixXc> obs;
    for (const auto& leaf : run.leaves()) obs.push_back(random_hermitian(leaf.op.rows(), rng));
    const Eigen::VectorXd adjoint = run.backward(obs).flatten(p);
    const Eigen::VectorXd flat = t.flatten(p);
    const double h = 1e-5;
    std::uniform_int_distribution<Eigen::Index> pick(0, flat.size() - 1);
    for (int trial = 0; trial < 12; ++trial) {
      const Eigen::Index k = pick(rng);
      Eigen::VectorXd up = flat;
      Eigen::VectorXd dn = flat;
      up(k) += h;
      dn(k) -= h;
      const double fd = (linear_functional(ProtocolRun(p, ParamTable::unflatten(p, up)), obs) -
                         linear_functional(ProtocolRun(p, ParamTable::unflatten(p, dn)), obs)) /
                        (2 * h);
      EXPECT_NEAR(adjoint(k), fd, 1e-6 * std::max(1.0, std::abs(fd))) << "slot " << k;
    }
  }
}

TEST(Engine, DiscriminationOfIdenticalStatesIsChance) {
  std::mt19937_64 rng(3);
  const NoisyStateSpec s = NoisyStateSpec::isotropic(0.8);
  for (int n : {1, 2}) {
    const auto p = build_discrimination_protocol(n, s, 1);
    EXPECT_NEAR(execute_discrimination(p, random_table(p, rng), s, s), 0.5, 1e-12);
  }
}

TEST(Engine, DiscriminationNeverBeatsHelstrom) {
  std::mt19937_64 rng(4);
  const NoisyStateSpec s0 = NoisyStateSpec::isotropic(1.0);
  const NoisyStateSpec s1 = NoisyStateSpec::noisy_bell_minus(NoiseKind::AmplitudeDamping, 0.3);
  for (int n : {1, 2}) {
    const double bound = helstrom_bound(make_state(s0), make_state(s1), n);
    const auto p = build_discrimination_protocol(n, s0, 1);
    for (int trial = 0; trial < 10; ++trial)
      EXPECT_LE(execute_discrimination(p, random_table(p, rng), s0, s1), bound + 1e-12);
  }
  const double one_copy = helstrom_bound(make_state(s0), make_state(s1), 1);
  EXPECT_NEAR(one_copy, 0.5 + 0.5 * trace_distance(make_state(s0), make_state(s1)), 1e-12);
}

TEST(Engine, SerializationRoundTrip) {
  for (const auto& p : {build_s_learned_protocol(4, 0.3), build_dynamic_dejmps(3, 0.7),
                        build_discrimination_protocol(3, NoisyStateSpec::noisy_bell_minus(NoiseKind::Dephasing, 0.2)),
                        build_qutrit_protocol(3, 0.5), build_iso_dynamic_protocol(6, 0.7)}) {
    const std::string text = serialize_protocol(p);
    const DynamicProtocol back = parse_protocol(text);
    EXPECT_EQ(back, p);
    EXPECT_EQ(serialize_protocol(back), text);
  }
  EXPECT_THROW(parse_protocol("protocol 1\nwires 1 1\n"), std::invalid_argument);
}

TEST(Engine, ValidationRejectsBrokenLayouts) {
  auto p = build_s_learned_protocol(3, 0.5);
  p.layout.pop_back();
  EXPECT_THROW(p.validate(), std::invalid_argument);
  auto q = build_s_learned_protocol(3, 0.5);
  q.rounds[0].policy = BranchPolicy::postselect({0});
  EXPECT_THROW(q.validate(), std::invalid_argument);
  auto r = build_s_learned_protocol(3, 0.5);
  r.rounds.clear();
  EXPECT_THROW(r.validate(), std::invalid_argument);
}
