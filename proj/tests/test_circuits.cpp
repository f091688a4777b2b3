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


#include "dlocc/circuits.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

using namespace dlocc;

namespace {

const double kPi = std::acos(-1.0);

double max_abs(const MatrixXc& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::VectorXd random_params(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  Eigen::VectorXd v(n);
  for (int k = 0; k < n; ++k) v(k) = u(rng);
  return v;
}

// Equal up to a global phase.
double phase_distance(const MatrixXc& a, const MatrixXc& b) {
  const std::complex<double> overlap = (b.adjoint() * a).trace();
  const std::complex<double> phase = overlap / std::abs(overlap);
  return max_abs(a - phase * b);
}

}  // namespace

TEST(Circuits, EmptyCircuitIsIdentity) {
  const ParamCircuit c(3, 0);
  EXPECT_LT(max_abs(circuit_unitary(c, Eigen::VectorXd()) - MatrixXc::Identity(8, 8)), 1e-15);
}

TEST(Circuits, RotationConvention) {
  ParamCircuit c(1, 1);
  c.add(Gate::ry(0, Slot{0}));
  Eigen::VectorXd theta(1);
  theta << kPi;
  const MatrixXc u = circuit_unitary(c, theta);
  EXPECT_NEAR(std::abs(u(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(u(0, 0)), 0.0, 1e-15);
  // RZ(t) = diag(e^{-it/2}, e^{it/2})
  ParamCircuit z(1, 0);
  z.add(Gate::rz(0, 0.3));
  const MatrixXc uz = circuit_unitary(z, Eigen::VectorXd());
  EXPECT_NEAR(std::arg(uz(0, 0)), -0.15, 1e-15);
  EXPECT_NEAR(std::arg(uz(1, 1)), 0.15, 1e-15);
}

TEST(Circuits, TwoWireBlockMatchesHandMultipliedMatrix) {
  const double theta = std::acos(0.5) + kPi;
  ParamCircuit c(2, 0);
  c.add(Gate::cnot(1, 0)).add(Gate::ry(1, theta));

  // CNOT with control on wire 1: |a b> -> |a xor b, b>
  MatrixXc cnot = MatrixXc::Zero(4, 4);
  cnot(0, 0) = cnot(3, 1) = cnot(2, 2) = cnot(1, 3) = 1.0;
  const double cs = std::cos(theta / 2);
  const double sn = std::sin(theta / 2);
  MatrixXc ry_on_1 = MatrixXc::Zero(4, 4);
  for (int a = 0; a < 2; ++a) {
    ry_on_1(2 * a, 2 * a) = cs;
    ry_on_1(2 * a, 2 * a + 1) = -sn;
    ry_on_1(2 * a + 1, 2 * a) = sn;
    ry_on_1(2 * a + 1, 2 * a + 1) = cs;
  }
  EXPECT_LT(max_abs(circuit_unitary(c, Eigen::VectorXd()) - ry_on_1 * cnot), 1e-15);
}

TEST(Circuits, HardwareEfficientAnsatzShape) {
  const auto one = hardware_efficient_ansatz(1, 1);
  EXPECT_EQ(one.n_params, 2);
  int cnots = 0;
  for (const auto& g : one.gates) cnots += g.kind == GateKind::CNOT;
  EXPECT_EQ(cnots, 0);

  const auto two = hardware_efficient_ansatz(2, 2);
  EXPECT_EQ(two.n_params, 8);
  cnots = 0;
  for (const auto& g : two.gates) cnots += g.kind == GateKind::CNOT;
  EXPECT_EQ(cnots, 2);

  std::mt19937_64 rng(4);
  const auto three = hardware_efficient_ansatz(3, 3);
  EXPECT_TRUE(is_unitary<double>(circuit_unitary(three, random_params(three.n_params, rng)), 1e-10));
  EXPECT_THROW(hardware_efficient_ansatz(0, 1), std::invalid_argument);
}

TEST(Circuits, ParameterCountMismatchThrows) {
  const auto c = hardware_efficient_ansatz(2, 1);
  EXPECT_THROW(circuit_unitary(c, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(Circuits, ParameterShiftApplicability) {
  EXPECT_TRUE(parameter_shift_applicable(Gate::ry(0, Slot{0})));
  EXPECT_TRUE(parameter_shift_applicable(Gate::rx(0, 1.0)));
  EXPECT_FALSE(parameter_shift_applicable(Gate::cnot(0, 1)));
  EXPECT_FALSE(parameter_shift_applicable(Gate::fixed({0}, MatrixXc::Identity(2, 2))));
  EXPECT_FALSE(parameter_shift_applicable(Gate::givens(0, 0, 2, Slot{0})));
}

TEST(Circuits, ValidationCatchesBrokenInvariants) {
  ParamCircuit c(2, 1);
  c.add(Gate::cnot(0, 0));
  EXPECT_THROW(c.validate(), std::invalid_argument);
  ParamCircuit d(2, 1);
  d.add(Gate::ry(0, Slot{1}));
  EXPECT_THROW(d.validate(), std::invalid_argument);
  ParamCircuit e(2, 1);
  Gate both = Gate::ry(0, Slot{0});
  both.fixed_angle = 0.1;
  e.add(both);
  EXPECT_THROW(e.validate(), std::invalid_argument);
  ParamCircuit f(1, 0, {3});
  f.add(Gate::ry(0, 0.2));
  EXPECT_THROW(f.validate(), std::invalid_argument);
}

TEST(Circuits, ConcatenationIsMultiplicative) {
  std::mt19937_64 rng(8);
  const auto c1 = hardware_efficient_ansatz(2, 2);
  const auto c2 = hardware_efficient_ansatz(2, 1);
  const Eigen::VectorXd p1 = random_params(c1.n_params, rng);
  const Eigen::VectorXd p2 = random_params(c2.n_params, rng);
  ParamCircuit both(2, c1.n_params + c2.n_params);
  for (const auto& g : c1.gates) both.add(g);
  for (Gate g : c2.gates) {
    if (g.param_slot) *g.param_slot += c1.n_params;
    both.add(g);
  }
  Eigen::VectorXd p(both.n_params);
  p << p1, p2;
  EXPECT_LT(max_abs(circuit_unitary(both, p) - circuit_unitary(c2, p2) * circuit_unitary(c1, p1)), 1e-13);
}

TEST(Circuits, RotationsArePeriodicIn4Pi) {
  std::mt19937_64 rng(12);
  for (const Gate& gate : {Gate::rx(0, Slot{0}), Gate::ry(0, Slot{0}), Gate::rz(0, Slot{0})}) {
    ParamCircuit c(1, 1);
    c.add(gate);
    const Eigen::VectorXd t = random_params(1, rng);
    const Eigen::VectorXd t4 = t.array() + 4 * kPi;
    EXPECT_LT(max_abs(circuit_unitary(c, t) - circuit_unitary(c, t4)), 1e-12);
  }
  ParamCircuit g(1, 1, {3});
  g.add(Gate::givens(0, 0, 2, Slot{0}));
  const Eigen::VectorXd t = random_params(1, rng);
  EXPECT_LT(max_abs(circuit_unitary(g, t) - circuit_unitary(g, Eigen::VectorXd(t.array() + 4 * kPi))), 1e-12);
}

TEST(Circuits, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(15);
  ParamCircuit c = hardware_efficient_ansatz(2, 2);
  c.add(Gate::rx(1, Slot{3}));  // a slot shared by two gates
  const Eigen::VectorXd p = random_params(c.n_params, rng);
  const auto derivs = circuit_unitary_derivatives(c, p);
  const double h = 1e-6;
  for (int k = 0; k < c.n_params; ++k) {
    Eigen::VectorXd up = p;
    Eigen::VectorXd dn = p;
    up(k) += h;
    dn(k) -= h;
    const MatrixXc fd = (circuit_unitary(c, up) - circuit_unitary(c, dn)) / (2 * h);
    EXPECT_LT(max_abs(derivs[k] - fd), 1e-8) << "slot " << k;
  }
}

TEST(Circuits, QuditAnsatzIsUnitaryAndContainsCsum) {
  std::mt19937_64 rng(16);
  const auto c = qudit_ansatz(2, 3, 1);
  EXPECT_EQ(c.n_params, 2 * 2 * 3);
  EXPECT_TRUE(is_unitary<double>(circuit_unitary(c, random_params(c.n_params, rng)), 1e-10));
  // All angles zero leaves only the CSUM.
  EXPECT_LT(max_abs(circuit_unitary(c, Eigen::VectorXd::Zero(c.n_params)) - csum_matrix(3)), 1e-15);
}

TEST(Circuits, SerializationRoundTripIsBitExact) {
  std::mt19937_64 rng(17);
  ParamCircuit c = hardware_efficient_ansatz(3, 2);
  c.add(Gate::ry(2, 0.1 + 1e-17 * 3)).add(Gate::rx(0, -kPi / 3));
  ParamCircuit q = qudit_ansatz(2, 3, 1);
  q.add(Gate::givens(1, 1, 2, std::exp(1.0)));
  MatrixXc u = circuit_unitary(hardware_efficient_ansatz(2, 1), random_params(4, rng));
  c.add(Gate::fixed({2, 0}, u));
  for (const auto& circ : {c, q}) {
    const std::string text = serialize_circuit(circ);
    const ParamCircuit back = parse_circuit(text);
    EXPECT_EQ(back, circ);
    EXPECT_EQ(serialize_circuit(back), text);
  }
  EXPECT_THROW(parse_circuit("circuit 1 0 dims 2\nRQ 0\nend\n"), std::invalid_argument);
  EXPECT_THROW(parse_circuit("circuit 1 0 dims 2\nRY 0 angle 0.1\n"), std::invalid_argument);
}

TEST(Circuits, GlobalPhaseFreeEquivalences) {
  // H is RZ(pi) then RY(pi/2) up to phase; conjugating a CNOT by H on both wires reverses it.
  ParamCircuit rev(2, 0);
  for (int w : {0, 1}) rev.add(Gate::rz(w, kPi)).add(Gate::ry(w, kPi / 2));
  rev.add(Gate::cnot(0, 1));
  for (int w : {0, 1}) rev.add(Gate::rz(w, kPi)).add(Gate::ry(w, kPi / 2));
  ParamCircuit direct(2, 0);
  direct.add(Gate::cnot(1, 0));
  EXPECT_LT(phase_distance(circuit_unitary(rev, Eigen::VectorXd()), circuit_unitary(direct, Eigen::VectorXd())),
            1e-14);
}
