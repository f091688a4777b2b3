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

#include <gtest/gtest.h>

#include "dlocc/train.hpp"

using namespace dlocc;

namespace {

std::vector<double> gamma_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 19; ++k) g.push_back(0.05 * k);
  return g;
}

double simulated_fidelity(const DynamicProtocol& p, const ParamTable& params) {
  const RunOutcome out = execute(p, params);
  return fidelity_pure(out.conditional_state, max_entangled(p.local_dim()));
}

// Weights of a two-qubit state on (Phi+, Phi-, Psi+, Psi-).
std::array<double, 4> bell_weights(const DensityState& s) {
  const double r = 1.0 / std::sqrt(2.0);
  const std::array<std::array<double, 4>, 4> basis{{{r, 0, 0, r}, {r, 0, 0, -r}, {0, r, r, 0}, {0, r, -r, 0}}};
  std::array<double, 4> w{};
  for (int k = 0; k < 4; ++k) {
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v(i) = basis[k][i];
    w[k] = (v.adjoint() * s.op() * v)(0, 0).real();
  }
  return w;
}

}  // namespace

TEST(Oracles, LemmaDeSExamples) {
  EXPECT_DOUBLE_EQ(oracle_lemma_de_s(1.0, 1.0), 1.0);
  EXPECT_NEAR(oracle_lemma_de_s(0.75, 0.75), 0.9, 1e-15);
  EXPECT_NEAR(oracle_lemma_de_s(0.9, 0.75), 0.675 / (1 - 0.9 - 0.75 + 2 * 0.675), 1e-15);
}

TEST(Oracles, DDejmpsExamples) {
  EXPECT_NEAR(oracle_ddejmps(2, 0.5), 0.9, 1e-15);
  EXPECT_NEAR(oracle_ddejmps(3, 0.5), 0.75 * 0.9 / 0.65, 1e-14);
  EXPECT_FALSE(ddejmps_in_range(3, 0.5));
  for (int n = 2; n <= 9; ++n) EXPECT_NEAR(oracle_ddejmps(n, 1.0), 1.0, 1e-15);
  EXPECT_THROW(oracle_ddejmps(1, 0.5), std::invalid_argument);
}

TEST(Oracles, DloccnetSExamples) {
  for (int n = 2; n <= 7; ++n) EXPECT_NEAR(oracle_dloccnet_s(n, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(oracle_dloccnet_s(2, 0.5), 0.5 * (1 + std::sqrt(0.75)), 1e-15);
  EXPECT_NEAR(oracle_dloccnet_s(2, 0.5), 0.93301270, 1e-8);
  const double f2 = oracle_dloccnet_s(2, 0.5);
  EXPECT_NEAR(oracle_dloccnet_s(3, 0.5), 0.75 * f2 / (0.25 + 0.5 * f2), 1e-15);
  EXPECT_NEAR(oracle_dloccnet_s(3, 0.5), 0.976627, 1e-6);
  EXPECT_THROW(oracle_dloccnet_s(1, 0.5), std::invalid_argument);
}

TEST(Oracles, EtaUpdateExamples) {
  const EtaUpdate zero = oracle_eta_update(0.0, 0.4);
  EXPECT_EQ(zero.b, 0.0);
  EXPECT_DOUBLE_EQ(zero.f_eta, 1.0);
  for (double a : {-0.9, -0.5, -0.1}) EXPECT_NEAR(oracle_eta_update(a, 1.0).f_eta, 1.0, 1e-15);
  EXPECT_THROW(oracle_eta_update(-1.0, 1.0), std::domain_error);
}

TEST(Oracles, EtaUpdateTracksLearnedRecurrence) {
  for (double g : {0.2, 0.5, 0.8}) {
    double a = oracle_dloccnet_s(2, g) - 1.0;
    for (int n = 3; n <= 7; ++n) {
      const EtaUpdate u = oracle_eta_update(a, g);
      EXPECT_NEAR(u.f_eta, oracle_dloccnet_s(n, g), 1e-12) << "n=" << n << " gamma=" << g;
      a = u.f_eta - 1.0;
    }
  }
}

TEST(Oracles, IsoExamples) {
  EXPECT_DOUBLE_EQ(oracle_iso_4to1(1.0, 1.0), 1.0);
  EXPECT_NEAR(oracle_iso_4to1(0.775, 0.775), 0.936916, 1e-6);
  EXPECT_NEAR(oracle_itr_iso(1, 0.7), 0.936916, 1e-6);
  EXPECT_NEAR(oracle_itr_iso(2, 0.7), 0.99685, 1e-5);
  EXPECT_NEAR(oracle_iso_4to1(oracle_dyn_iso(1, 0.7), 0.775), oracle_dyn_iso(2, 0.7), 1e-12);
  for (int i = 1; i <= 5; ++i) {
    EXPECT_NEAR(oracle_itr_iso(i, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(oracle_dyn_iso(i, 1.0), 1.0, 1e-15);
  }
  EXPECT_THROW(oracle_itr_iso(0, 0.7), std::invalid_argument);
}

TEST(Oracles, IsoMapsAgreeAlgebraically) {
  for (int k = 250; k <= 1000; ++k) {
    const double f = k * 1e-3;
    const double p = (4 * f - 1) / 3;
    EXPECT_NEAR(oracle_iso_4to1(f, f), oracle_itr_iso(1, p), 1e-12);
    EXPECT_NEAR(oracle_iso_4to1(f, f), oracle_dyn_iso(1, p), 1e-12);
    double prev = oracle_dyn_iso(1, p);
    for (int i = 2; i <= 4; ++i) {
      const double next = oracle_dyn_iso(i, p);
      EXPECT_NEAR(oracle_iso_4to1(prev, f), next, 1e-12);
      prev = next;
    }
  }
}

TEST(Oracles, CopiesConsumed) {
  EXPECT_EQ(copies_consumed(IsoMethod::Iterative, 2), 16);
  EXPECT_EQ(copies_consumed(IsoMethod::Dynamic, 5), 16);
  EXPECT_EQ(copies_consumed(IsoMethod::Dynamic, 1), 4);
  EXPECT_EQ(copies_consumed(IsoMethod::Iterative, 1), 4);
  EXPECT_THROW(copies_consumed(IsoMethod::Dynamic, 0), std::invalid_argument);
}

TEST(Oracles, DloccnetDominatesDDejmpsInRange) {
  for (int n = 2; n <= 7; ++n)
    for (double g : gamma_grid())
      if (ddejmps_in_range(n, g)) EXPECT_GE(oracle_dloccnet_s(n, g), oracle_ddejmps(n, g)) << n << " " << g;
}

TEST(Protocols, DejmpsRoundShape) {
  const FixedRound r = dejmps_round();
  EXPECT_EQ(r.alice.n_params, 0);
  EXPECT_EQ(r.bob.n_params, 0);
  ASSERT_EQ(r.policy.accepted.size(), 2u);
  EXPECT_EQ(r.policy.accepted[0], (std::vector<int>{0, 0}));
  EXPECT_EQ(r.policy.accepted[1], (std::vector<int>{1, 1}));
}

TEST(Protocols, DejmpsOnPerfectPairsIsFixedPoint) {
  const DynamicProtocol p = build_dynamic_dejmps(2, 1.0);
  const RunOutcome out = execute(p, empty_params(p));
  EXPECT_NEAR(out.success_probability, 1.0, 1e-12);
  EXPECT_NEAR(fidelity_pure(out.conditional_state, max_entangled(2)), 1.0, 1e-12);
}

TEST(Protocols, DynamicDejmpsMatchesPrintedValuesInRange) {
  int compared = 0;
  for (int n = 2; n <= 7; ++n)
    for (double g : gamma_grid()) {
      if (!ddejmps_in_range(n, g)) continue;
      const DynamicProtocol p = build_dynamic_dejmps(n, g);
      EXPECT_NEAR(simulated_fidelity(p, empty_params(p)), oracle_ddejmps(n, g), 1e-10) << n << " " << g;
      ++compared;
    }
  EXPECT_GT(compared, 0);
}

TEST(Protocols, DynamicDejmpsPrintedMultipleOfThreeIsOutOfRange) {
  for (int n = 3; n <= 9; n += 3)
    for (double g : gamma_grid()) EXPECT_FALSE(ddejmps_in_range(n, g)) << n << " " << g;
}

// Each round leaves a rank-two Bell-diagonal state whose non-Phi+ component
// cycles Psi+ -> Psi- -> Phi-, which is the period-3 structure of the recurrence.
TEST(Protocols, DynamicDejmpsIntermediateFamiliesCycle) {
  const int expected[3] = {2, 3, 1};  // n % 3 == 2, 0, 1
  for (double g : {0.3, 0.5, 0.8})
    for (int n = 2; n <= 7; ++n) {
      const DynamicProtocol p = build_dynamic_dejmps(n, g);
      const auto w = bell_weights(execute(p, empty_params(p)).conditional_state);
      const int other = expected[(n - 2) % 3];
      EXPECT_NEAR(w[0] + w[other], 1.0, 1e-10) << n << " " << g;
      EXPECT_GT(w[other], 1e-6);
    }
}

TEST(Protocols, DejmpsAcceptanceOnSStates) {
  for (double g : gamma_grid()) {
    const DynamicProtocol p = build_dynamic_dejmps(2, g);
    const RunOutcome out = execute(p, empty_params(p));
    const double f1 = (1 + g) / 2;
    EXPECT_NEAR(out.success_probability, 1 - 2 * f1 + 2 * f1 * f1, 1e-12);
  }
}

TEST(Protocols, LearnedSMatchesOracleOnGrid) {
  for (int n = 2; n <= 6; ++n)
    for (double g : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const DynamicProtocol p = build_s_learned_protocol(n, g);
      EXPECT_NEAR(simulated_fidelity(p, empty_params(p)), oracle_dloccnet_s(n, g), 1e-9) << n << " " << g;
    }
}

TEST(Protocols, LearnedSNoiselessIsPerfect) {
  for (int n = 2; n <= 5; ++n) {
    const DynamicProtocol p = build_s_learned_protocol(n, 1.0);
    EXPECT_NEAR(simulated_fidelity(p, empty_params(p)), 1.0, 1e-12);
  }
}

TEST(Protocols, CopyCountsMatchConstruction) {
  EXPECT_EQ(build_s_learned_protocol(5, 0.5).copies_consumed(), 5);
  EXPECT_EQ(build_dynamic_dejmps(4, 0.5).copies_consumed(), 4);
  EXPECT_EQ(build_iso_dynamic_protocol(7, 0.7).copies_consumed(), 7);
  EXPECT_EQ(build_gad_ansatz_protocol(4, NoisyStateSpec::unilocal_gad_bell(0.3, 0.8)).copies_consumed(), 4);
  EXPECT_EQ(build_qutrit_protocol(3, 0.7).copies_consumed(), 3);
  EXPECT_EQ(build_discrimination_protocol(3, NoisyStateSpec::isotropic(1.0)).copies_consumed(), 3);
}

TEST(Protocols, GadAnsatzShape) {
  const DynamicProtocol p = build_gad_ansatz_protocol(3, NoisyStateSpec::unilocal_gad_bell(0.3, 0.8));
  for (const auto& r : p.rounds) {
    EXPECT_EQ(r.alice.n_params, 4);
    EXPECT_EQ(r.bob.n_params, 4);
  }
  DynamicProtocol perfect = build_gad_ansatz_protocol(3, NoisyStateSpec::isotropic(1.0));
  EXPECT_NEAR(simulated_fidelity(perfect, ParamTable::zeros(perfect)), 1.0, 1e-12);
}

TEST(Protocols, TrainedGadBeatsInput) {
  const NoisyStateSpec pair = NoisyStateSpec::unilocal_gad_bell(0.3, 0.8);
  const double input = fidelity_pure(make_state(pair), max_entangled(2));
  OptimizerConfig cfg;
  cfg.restarts = 2;
  cfg.max_iters = 200;
  const TrainReport r = optimize(LossSpec::distillation(build_gad_ansatz_protocol(4, pair)), cfg);
  EXPECT_GT(1.0 - r.best_loss, input + 1e-3);
}

TEST(Protocols, ComposedIterativeMatchesOracle) {
  const std::vector<double> f = compose_iterative_4to1(0.7, 2);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_NEAR(f[0], oracle_itr_iso(1, 0.7), 1e-12);
  EXPECT_NEAR(f[1], oracle_itr_iso(2, 0.7), 1e-12);
}

TEST(Protocols, IsoDynamicShape) {
  const DynamicProtocol p = build_iso_dynamic_protocol(6, 0.7);
  EXPECT_EQ(p.n_alice_wires, 4);
  EXPECT_EQ(p.rounds.size(), 3u);
  EXPECT_EQ(p.rounds.back().measured_alice, (Wires{1, 2, 3}));
  EXPECT_THROW(build_iso_dynamic_protocol(3, 0.7), std::invalid_argument);
}
