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


#include "dlocc/channels.hpp"

#include <random>

#include <gtest/gtest.h>

using namespace dlocc;

namespace {

MatrixXc apply_map(const KrausChannel& ch, const MatrixXc& rho) {
  MatrixXc out = MatrixXc::Zero(ch.out_dim, ch.out_dim);
  for (const auto& e : ch.kraus_ops) out += e * rho * e.adjoint();
  return out;
}

MatrixXc random_density(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  MatrixXc g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = {n01(rng), n01(rng)};
  MatrixXc rho = g * g.adjoint();
  return rho / rho.trace();
}

double max_abs(const MatrixXc& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Channels, AllFamiliesAreComplete) {
  for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    EXPECT_LT(erasure_channel(x).completeness_error(), 1e-12);
    EXPECT_LT(depolarizing_channel(x, 2).completeness_error(), 1e-12);
    EXPECT_LT(depolarizing_channel(x, 3).completeness_error(), 1e-12);
    EXPECT_LT(amplitude_damping(x).completeness_error(), 1e-12);
    EXPECT_LT(dephasing(x).completeness_error(), 1e-12);
    for (double q : {0.0, 0.3, 1.0}) EXPECT_LT(generalized_amplitude_damping(x, q).completeness_error(), 1e-12);
  }
}

TEST(Channels, ErasureMatchesDefinition) {
  const MatrixXc half = MatrixXc::Identity(2, 2) / 2.0;
  MatrixXc expected = 0.4 * half;
  expected(0, 0) += 0.6;
  EXPECT_LT(max_abs(apply_map(erasure_channel(0.4), half) - expected), 1e-15);
  std::mt19937_64 rng(1);
  const MatrixXc rho = random_density(2, rng);
  EXPECT_LT(max_abs(apply_map(erasure_channel(1.0), rho) - rho), 1e-15);
  MatrixXc zero = MatrixXc::Zero(2, 2);
  zero(0, 0) = 1.0;
  EXPECT_LT(max_abs(apply_map(erasure_channel(0.0), rho) - zero), 1e-15);
}

TEST(Channels, DepolarizingMatchesDefinitionEntrywise) {
  std::mt19937_64 rng(2);
  for (int d : {2, 3}) {
    for (double p : {0.0, 0.35, 1.0}) {
      const MatrixXc rho = random_density(d, rng);
      const MatrixXc expected = p * rho + (1.0 - p) * MatrixXc::Identity(d, d) / static_cast<double>(d);
      EXPECT_LT(max_abs(apply_map(depolarizing_channel(p, d), rho) - expected), 1e-12);
    }
  }
}

TEST(Channels, QutritDepolarizedPairMatchesMixture) {
  const DensityState phi = DensityState::from_pure(max_entangled(3));
  const auto out = apply_channel(phi, depolarizing_channel(0.5, 3), {1});
  const MatrixXc expected = 0.5 * phi.op() + 0.5 * MatrixXc::Identity(9, 9) / 9.0;
  EXPECT_LT(max_abs(out.op() - expected), 1e-12);
  EXPECT_LT(max_abs(make_state(NoisyStateSpec::qutrit_isotropic(0.5)).op() - expected), 1e-12);
}

TEST(Channels, DampingAndDephasingAsPrinted) {
  std::mt19937_64 rng(3);
  const MatrixXc rho = random_density(2, rng);
  EXPECT_LT(max_abs(apply_map(amplitude_damping(0.0), rho) - rho), 1e-15);
  const auto gad = generalized_amplitude_damping(0.36, 1.0);
  EXPECT_NEAR(gad.kraus_ops[0](0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(gad.kraus_ops[0](1, 1).real(), 0.6, 1e-15);
  MatrixXc plus = MatrixXc::Constant(2, 2, 0.5);
  EXPECT_LT(max_abs(apply_map(dephasing(0.5), plus) - MatrixXc::Identity(2, 2) / 2.0), 1e-15);
}

TEST(Channels, RejectsOutOfRange) {
  EXPECT_THROW(erasure_channel(1.5), std::domain_error);
  EXPECT_THROW(amplitude_damping(-0.1), std::domain_error);
  EXPECT_THROW(depolarizing_channel(0.5, 1), std::invalid_argument);
  EXPECT_THROW(make_state(NoisyStateSpec::s_state(2.0)), std::domain_error);
}

TEST(Channels, StateFamilies) {
  const auto bell = max_entangled(2);
  EXPECT_NEAR(fidelity_pure(make_state(NoisyStateSpec::s_state(1.0)), bell), 1.0, 1e-15);
  for (double p : {0.0, 0.3, 0.7, 1.0})
    EXPECT_NEAR(fidelity_pure(make_state(NoisyStateSpec::isotropic(p)), bell), (1 + 3 * p) / 4, 1e-15);

  // Independent evaluation of N_ad (x) N_ad on |Phi+>: the only populations are
  // |00>: (1 + g^2)/2, |01>,|10>: g(1-g)/2, |11>: (1-g)^2/2; coherence (1-g)/2.
  const double g = 0.2;
  const auto ad = make_state(NoisyStateSpec::bilocal_ad_bell(g));
  EXPECT_NEAR(ad.weight(), 1.0, 1e-15);
  EXPECT_LT(hermiticity_error(ad), 1e-15);
  EXPECT_NEAR(ad.op()(0, 0).real(), (1 + g * g) / 2, 1e-15);
  EXPECT_NEAR(ad.op()(1, 1).real(), g * (1 - g) / 2, 1e-15);
  EXPECT_NEAR(ad.op()(3, 3).real(), (1 - g) * (1 - g) / 2, 1e-15);
  EXPECT_NEAR(ad.op()(0, 3).real(), (1 - g) / 2, 1e-15);
  EXPECT_NEAR(fidelity_pure(ad, bell), (1 + g * g) / 4 + (1 - g) * (1 - g) / 4 + (1 - g) / 2, 1e-15);
}

TEST(Channels, SStateParameterization) {
  for (double gamma : {0.0, 0.25, 0.5, 0.8, 1.0}) {
    const double f1 = (1 + gamma) / 2;
    MatrixXc expected = (2 * f1 - 1) * max_entangled(2).projector();
    expected(0, 0) += 2 * (1 - f1);
    EXPECT_LT(max_abs(s_state(gamma).op() - expected), 1e-15);
  }
}

TEST(Channels, BellMinusUnderNoise) {
  const auto minus = make_state(NoisyStateSpec::noisy_bell_minus(NoiseKind::Dephasing, 0.0));
  EXPECT_NEAR(minus.op()(0, 3).real(), -0.5, 1e-15);
  // Two dephasing channels with p each leave the coherence scaled by (1 - 2p)^2.
  const auto deph = make_state(NoisyStateSpec::noisy_bell_minus(NoiseKind::Dephasing, 0.2));
  EXPECT_NEAR(deph.op()(0, 3).real(), -0.5 * 0.6 * 0.6, 1e-15);
}

TEST(Channels, RandomStatesArePhysical) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double a = u(rng);
    const double b = u(rng);
    for (const auto& spec :
         {NoisyStateSpec::s_state(a), NoisyStateSpec::isotropic(a), NoisyStateSpec::unilocal_gad_bell(a, b),
          NoisyStateSpec::bilocal_ad_bell(a), NoisyStateSpec::qutrit_isotropic(a),
          NoisyStateSpec::noisy_bell_minus(NoiseKind::AmplitudeDamping, a),
          NoisyStateSpec::noisy_bell_minus(NoiseKind::Depolarizing, b)}) {
      const auto s = make_state(spec);
      EXPECT_NEAR(s.weight(), 1.0, 1e-12);
      EXPECT_GT(min_eigenvalue(s), -1e-12);
      EXPECT_LT(hermiticity_error(s), 1e-14);
    }
  }
}
