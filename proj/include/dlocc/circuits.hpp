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


// Gates, parameterized circuits, and their compilation to dense unitaries.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlocc/qmath.hpp"

namespace dlocc {

enum class GateKind { RX, RY, RZ, CNOT, FixedUnitary, QuditUnitary, Givens };

/// Index into a circuit's parameter vector.
struct Slot {
  int index;
};

/// One gate. Rotations (RX/RY/RZ/Givens) carry exactly one of a parameter slot
/// or a fixed angle. Rotation convention: exp(-i theta G / 2).
struct Gate {
  GateKind kind = GateKind::RY;
  Wires wires;
  std::optional<int> param_slot;
  std::optional<double> fixed_angle;
  MatrixXc matrix;      // FixedUnitary and QuditUnitary only
  int level_low = 0;    // Givens only: rotation acts on levels (low, high) of one qudit
  int level_high = 1;

  static Gate rx(int wire, Slot s) { return rotation(GateKind::RX, wire, s); }
  static Gate rx(int wire, double angle) { return rotation(GateKind::RX, wire, angle); }
  static Gate ry(int wire, Slot s) { return rotation(GateKind::RY, wire, s); }
  static Gate ry(int wire, double angle) { return rotation(GateKind::RY, wire, angle); }
  static Gate rz(int wire, Slot s) { return rotation(GateKind::RZ, wire, s); }
  static Gate rz(int wire, double angle) { return rotation(GateKind::RZ, wire, angle); }
  static Gate cnot(int control, int target);
  static Gate fixed(Wires wires, MatrixXc u);
  static Gate qudit(Wires wires, MatrixXc u);
  static Gate givens(int wire, int low, int high, Slot s);
  static Gate givens(int wire, int low, int high, double angle);

  bool is_rotation() const {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ || kind == GateKind::Givens;
  }

  friend bool operator==(const Gate& a, const Gate& b);

 private:
  static Gate rotation(GateKind kind, int wire, Slot s);
  static Gate rotation(GateKind kind, int wire, double angle);
};

struct ParamCircuit {
  int n_wires = 0;
  Dims wire_dims;  // one entry per wire; empty means all qubits
  std::vector<Gate> gates;
  int n_params = 0;

  ParamCircuit() = default;
  ParamCircuit(int wires, int params, Dims dims = {});

  Dims dims() const;
  Eigen::Index dim() const { return static_cast<Eigen::Index>(product(dims())); }

  ParamCircuit& add(Gate g);
  /// Throws std::invalid_argument on a broken invariant.
  void validate() const;

  friend bool operator==(const ParamCircuit& a, const ParamCircuit& b) {
    return a.n_wires == b.n_wires && a.n_params == b.n_params && a.dims() == b.dims() && a.gates == b.gates;
  }
};

/// Adds `delta` to the angle of a single gate occurrence (parameter-shift support).
struct GateShift {
  std::size_t gate_index;
  double delta;
};

/// Local matrix of one gate at the given angle (angle ignored for fixed gates).
MatrixXc gate_matrix(const Gate& g, const Dims& wire_dims, double angle);
/// d/dtheta of gate_matrix for rotation gates.
MatrixXc gate_matrix_derivative(const Gate& g, const Dims& wire_dims, double angle);
double gate_angle(const Gate& g, const Eigen::VectorXd& params);

/// Product of embedded gate unitaries; earlier gates act on the state first.
MatrixXc circuit_unitary(const ParamCircuit& c, const Eigen::VectorXd& params,
                         std::optional<GateShift> shift = std::nullopt);

/// dU/dtheta_k for every parameter slot k (slots shared by several gates sum their terms).
std::vector<MatrixXc> circuit_unitary_derivatives(const ParamCircuit& c, const Eigen::VectorXd& params);

/// Alternating per-wire RY.RZ layers and a CNOT ladder; 2 * n_wires * layers slots.
ParamCircuit hardware_efficient_ansatz(int n_wires, int layers);

/// Qudit analogue: `layers` blocks of (Givens rotations on every level pair of every wire,
/// CSUM ladder), closed by one more rotation block. (layers + 1) * n_wires * d(d-1)/2 slots.
ParamCircuit qudit_ansatz(int n_wires, int dim, int layers);

/// |a, b> -> |a, a + b mod d> on two qudits.
MatrixXc csum_matrix(int d);

bool parameter_shift_applicable(const Gate& g);

/// Line-oriented text form: a header `circuit <wires> <params> dims <d...>`,
/// then one gate per line, `KIND wires... slot <k>|angle <x>`, closed by `end`.
std::string serialize_circuit(const ParamCircuit& c);
ParamCircuit parse_circuit(const std::string& text);
/// Reads one circuit block starting at the current stream position.
ParamCircuit read_circuit(std::istream& in);

std::string to_string(GateKind kind);

}  // namespace dlocc
