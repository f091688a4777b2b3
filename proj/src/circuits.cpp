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
#include <istream>
#include <sstream>
#include <stdexcept>

#include "dlocc/text.hpp"

namespace dlocc {

namespace {

const std::complex<double> kI(0.0, 1.0);

MatrixXc pauli(GateKind kind) {
  MatrixXc p(2, 2);
  switch (kind) {
    case GateKind::RX:
      p << 0, 1, 1, 0;
      break;
    case GateKind::RY:
      p << 0, -kI, kI, 0;
      break;
    case GateKind::RZ:
      p << 1, 0, 0, -1;
      break;
    default:
      throw std::logic_error("not a Pauli rotation");
  }
  return p;
}

// Generator G with gate = exp(-i theta G / 2).
MatrixXc generator(const Gate& g, const Dims& wire_dims) {
  if (g.kind == GateKind::Givens) {
    const int d = wire_dims[g.wires[0]];
    MatrixXc y = MatrixXc::Zero(d, d);
    y(g.level_low, g.level_high) = -kI;
    y(g.level_high, g.level_low) = kI;
    return y;
  }
  return pauli(g.kind);
}

using text::format_double;
using text::parse_double;

int parse_int(const std::string& token) { return text::parse_int(token); }

GateKind parse_kind(const std::string& s) {
  if (s == "RX") return GateKind::RX;
  if (s == "RY") return GateKind::RY;
  if (s == "RZ") return GateKind::RZ;
  if (s == "CNOT") return GateKind::CNOT;
  if (s == "UNITARY") return GateKind::FixedUnitary;
  if (s == "QUDIT") return GateKind::QuditUnitary;
  if (s == "GIVENS") return GateKind::Givens;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

Dims local_dims(const Gate& g, const Dims& wire_dims) {
  Dims d;
  for (int w : g.wires) d.push_back(wire_dims.at(w));
  return d;
}

}  // namespace

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::FixedUnitary: return "UNITARY";
    case GateKind::QuditUnitary: return "QUDIT";
    case GateKind::Givens: return "GIVENS";
  }
  return "?";
}

Gate Gate::rotation(GateKind kind, int wire, Slot s) {
  Gate g;
  g.kind = kind;
  g.wires = {wire};
  g.param_slot = s.index;
  return g;
}

Gate Gate::rotation(GateKind kind, int wire, double angle) {
  Gate g;
  g.kind = kind;
  g.wires = {wire};
  g.fixed_angle = angle;
  return g;
}

Gate Gate::cnot(int control, int target) {
  Gate g;
  g.kind = GateKind::CNOT;
  g.wires = {control, target};
  return g;
}

Gate Gate::fixed(Wires wires, MatrixXc u) {
  Gate g;
  g.kind = GateKind::FixedUnitary;
  g.wires = std::move(wires);
  g.matrix = std::move(u);
  return g;
}

Gate Gate::qudit(Wires wires, MatrixXc u) {
  Gate g = fixed(std::move(wires), std::move(u));
  g.kind = GateKind::QuditUnitary;
  return g;
}

Gate Gate::givens(int wire, int low, int high, Slot s) {
  Gate g = rotation(GateKind::Givens, wire, s);
  g.level_low = low;
  g.level_high = high;
  return g;
}

Gate Gate::givens(int wire, int low, int high, double angle) {
  Gate g = rotation(GateKind::Givens, wire, angle);
  g.level_low = low;
  g.level_high = high;
  return g;
}

bool operator==(const Gate& a, const Gate& b) {
  if (a.kind != b.kind || a.wires != b.wires || a.param_slot != b.param_slot || a.fixed_angle != b.fixed_angle)
    return false;
  if (a.kind == GateKind::Givens && (a.level_low != b.level_low || a.level_high != b.level_high)) return false;
  if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols()) return false;
  return a.matrix.size() == 0 || a.matrix == b.matrix;
}

ParamCircuit::ParamCircuit(int wires, int params, Dims dims)
    : n_wires(wires), wire_dims(std::move(dims)), n_params(params) {}

Dims ParamCircuit::dims() const { return wire_dims.empty() ? Dims(static_cast<std::size_t>(n_wires), 2) : wire_dims; }

ParamCircuit& ParamCircuit::add(Gate g) {
  gates.push_back(std::move(g));
  return *this;
}

void ParamCircuit::validate() const {
  if (n_wires < 1) throw std::invalid_argument("circuit needs at least one wire");
  if (n_params < 0) throw std::invalid_argument("negative parameter count");
  if (!wire_dims.empty() && static_cast<int>(wire_dims.size()) != n_wires)
    throw std::invalid_argument("wire_dims length does not match wire count");
  const Dims d = dims();
  for (int x : d)
    if (x < 2) throw std::invalid_argument("wire dimension must be at least 2");
  for (const Gate& g : gates) {
    if (g.wires.empty()) throw std::invalid_argument("gate without wires");
    std::vector<bool> seen(static_cast<std::size_t>(n_wires), false);
    for (int w : g.wires) {
      if (w < 0 || w >= n_wires) throw std::invalid_argument("gate wire out of range");
      if (seen[w]) throw std::invalid_argument("gate repeats a wire");
      seen[w] = true;
    }
    if (g.is_rotation()) {
      if (g.wires.size() != 1) throw std::invalid_argument("rotation acts on one wire");
      if (g.param_slot.has_value() == g.fixed_angle.has_value())
        throw std::invalid_argument("rotation needs exactly one of a slot or a fixed angle");
      if (g.param_slot && (*g.param_slot < 0 || *g.param_slot >= n_params))
        throw std::invalid_argument("parameter slot out of range");
      if (g.kind == GateKind::Givens) {
        if (g.level_low < 0 || g.level_low >= g.level_high || g.level_high >= d[g.wires[0]])
          throw std::invalid_argument("Givens levels out of range");
      } else if (d[g.wires[0]] != 2) {
        throw std::invalid_argument("Pauli rotation on a non-qubit wire");
      }
    } else {
      if (g.param_slot || g.fixed_angle) throw std::invalid_argument("fixed gate cannot carry an angle");
      if (g.kind == GateKind::CNOT) {
        if (g.wires.size() != 2 || d[g.wires[0]] != 2 || d[g.wires[1]] != 2)
          throw std::invalid_argument("CNOT needs two qubit wires");
      } else {
        const auto ld = static_cast<Eigen::Index>(product(local_dims(g, d)));
        if (g.matrix.rows() != ld || g.matrix.cols() != ld)
          throw std::invalid_argument("gate matrix size does not match its wires");
        if (!is_unitary<double>(g.matrix, 1e-10)) throw std::invalid_argument("gate matrix is not unitary");
      }
    }
  }
}

double gate_angle(const Gate& g, const Eigen::VectorXd& params) {
  if (g.param_slot) return params(*g.param_slot);
  return g.fixed_angle.value_or(0.0);
}

MatrixXc gate_matrix(const Gate& g, const Dims& wire_dims, double angle) {
  if (g.is_rotation()) {
    const MatrixXc gen = generator(g, wire_dims);
    const Eigen::Index d = gen.rows();
    // G^2 restricted to the active two levels is the identity there.
    MatrixXc active = gen * gen;
    MatrixXc out = MatrixXc::Identity(d, d) - active;
    out += std::cos(angle / 2) * active - kI * std::sin(angle / 2) * gen;
    return out;
  }
  if (g.kind == GateKind::CNOT) {
    MatrixXc u = MatrixXc::Zero(4, 4);
    u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
    return u;
  }
  return g.matrix;
}

MatrixXc gate_matrix_derivative(const Gate& g, const Dims& wire_dims, double angle) {
  if (!g.is_rotation()) throw std::invalid_argument("only rotations have an angle derivative");
  const MatrixXc gen = generator(g, wire_dims);
  return (-0.5 * kI) * gen * gate_matrix(g, wire_dims, angle);
}

MatrixXc circuit_unitary(const ParamCircuit& c, const Eigen::VectorXd& params, std::optional<GateShift> shift) {
  if (params.size() != c.n_params) throw std::invalid_argument("parameter vector length mismatch");
  const Dims d = c.dims();
  MatrixXc u = MatrixXc::Identity(c.dim(), c.dim());
  for (std::size_t k = 0; k < c.gates.size(); ++k) {
    const Gate& g = c.gates[k];
    double angle = gate_angle(g, params);
    if (shift && shift->gate_index == k) angle += shift->delta;
    u = apply_left<double>(u, gate_matrix(g, d, angle), d, g.wires);
  }
  return u;
}

std::vector<MatrixXc> circuit_unitary_derivatives(const ParamCircuit& c, const Eigen::VectorXd& params) {
  if (params.size() != c.n_params) throw std::invalid_argument("parameter vector length mismatch");
  const Dims d = c.dims();
  const Eigen::Index dim = c.dim();
  const std::size_t n = c.gates.size();
  // prefix[k] = G_{k-1} ... G_0, suffix[k] = G_{n-1} ... G_{k+1}
  std::vector<MatrixXc> prefix(n + 1);
  prefix[0] = MatrixXc::Identity(dim, dim);
  for (std::size_t k = 0; k < n; ++k)
    prefix[k + 1] = apply_left<double>(prefix[k], gate_matrix(c.gates[k], d, gate_angle(c.gates[k], params)), d,
                                       c.gates[k].wires);
  std::vector<MatrixXc> out(static_cast<std::size_t>(c.n_params), MatrixXc::Zero(dim, dim));
  MatrixXc suffix = MatrixXc::Identity(dim, dim);
  for (std::size_t k = n; k-- > 0;) {
    const Gate& g = c.gates[k];
    const double angle = gate_angle(g, params);
    if (g.param_slot) {
      const MatrixXc inner = apply_left<double>(prefix[k], gate_matrix_derivative(g, d, angle), d, g.wires);
      out[static_cast<std::size_t>(*g.param_slot)] += suffix * inner;
    }
    // suffix <- suffix * G_k, computed as (G_k^dag suffix^dag)^dag
    suffix = apply_left<double>(suffix.adjoint(), gate_matrix(g, d, angle).adjoint(), d, g.wires).adjoint();
  }
  return out;
}

ParamCircuit hardware_efficient_ansatz(int n_wires, int layers) {
  if (n_wires < 1 || layers < 1) throw std::invalid_argument("ansatz needs at least one wire and one layer");
  ParamCircuit c(n_wires, 2 * n_wires * layers);
  int slot = 0;
  for (int l = 0; l < layers; ++l) {
    for (int w = 0; w < n_wires; ++w) {
      c.add(Gate::ry(w, Slot{slot++}));
      c.add(Gate::rz(w, Slot{slot++}));
    }
    for (int w = 0; w + 1 < n_wires; ++w) c.add(Gate::cnot(w, w + 1));
  }
  return c;
}

MatrixXc csum_matrix(int d) {
  MatrixXc u = MatrixXc::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) u(a * d + (a + b) % d, a * d + b) = 1.0;
  return u;
}

ParamCircuit qudit_ansatz(int n_wires, int dim, int layers) {
  if (n_wires < 1 || dim < 2 || layers < 0) throw std::invalid_argument("bad qudit ansatz shape");
  const int pairs = dim * (dim - 1) / 2;
  ParamCircuit c(n_wires, (layers + 1) * n_wires * pairs, Dims(static_cast<std::size_t>(n_wires), dim));
  int slot = 0;
  auto rotations = [&] {
    for (int w = 0; w < n_wires; ++w)
      for (int lo = 0; lo < dim; ++lo)
        for (int hi = lo + 1; hi < dim; ++hi) c.add(Gate::givens(w, lo, hi, Slot{slot++}));
  };
  for (int l = 0; l < layers; ++l) {
    rotations();
    for (int w = 0; w + 1 < n_wires; ++w) c.add(Gate::qudit({w, w + 1}, csum_matrix(dim)));
  }
  rotations();
  return c;
}

bool parameter_shift_applicable(const Gate& g) {
  return g.kind == GateKind::RX || g.kind == GateKind::RY || g.kind == GateKind::RZ;
}

std::string serialize_circuit(const ParamCircuit& c) {
  std::ostringstream os;
  os << "circuit " << c.n_wires << ' ' << c.n_params << " dims";
  for (int d : c.dims()) os << ' ' << d;
  os << '\n';
  for (const Gate& g : c.gates) {
    os << to_string(g.kind);
    for (int w : g.wires) os << ' ' << w;
    if (g.kind == GateKind::Givens) os << " levels " << g.level_low << ' ' << g.level_high;
    if (g.param_slot) os << " slot " << *g.param_slot;
    if (g.fixed_angle) os << " angle " << format_double(*g.fixed_angle);
    if (g.kind == GateKind::FixedUnitary || g.kind == GateKind::QuditUnitary) {
      os << " matrix " << g.matrix.rows();
      for (Eigen::Index i = 0; i < g.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < g.matrix.cols(); ++j)
          os << ' ' << format_double(g.matrix(i, j).real()) << ' ' << format_double(g.matrix(i, j).imag());
    }
    os << '\n';
  }
  os << "end\n";
  return os.str();
}

ParamCircuit read_circuit(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  std::istringstream head(line);
  std::string tag, dims_tag;
  ParamCircuit c;
  if (!(head >> tag >> c.n_wires >> c.n_params >> dims_tag) || tag != "circuit" || dims_tag != "dims")
    throw std::invalid_argument("expected circuit header, got '" + line + "'");
  for (int d; head >> d;) c.wire_dims.push_back(d);
  bool closed = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "end") {
      closed = true;
      break;
    }
    Gate g;
    g.kind = parse_kind(tok[0]);
    std::size_t i = 1;
    while (i < tok.size() && tok[i] != "slot" && tok[i] != "angle" && tok[i] != "levels" && tok[i] != "matrix")
      g.wires.push_back(parse_int(tok[i++]));
    while (i < tok.size()) {
      const std::string& key = tok[i++];
      auto next = [&]() -> const std::string& {
        if (i >= tok.size()) throw std::invalid_argument("truncated gate line '" + line + "'");
        return tok[i++];
      };
      if (key == "slot") {
        g.param_slot = parse_int(next());
      } else if (key == "angle") {
        g.fixed_angle = parse_double(next());
      } else if (key == "levels") {
        g.level_low = parse_int(next());
        g.level_high = parse_int(next());
      } else if (key == "matrix") {
        const int n = parse_int(next());
        if (n < 1) throw std::invalid_argument("bad matrix size");
        g.matrix.resize(n, n);
        for (int r = 0; r < n; ++r)
          for (int col = 0; col < n; ++col) {
            const double re = parse_double(next());
            g.matrix(r, col) = {re, parse_double(next())};
          }
      } else {
        throw std::invalid_argument("unknown gate field '" + key + "'");
      }
    }
    c.gates.push_back(std::move(g));
  }
  if (!closed) throw std::invalid_argument("circuit block is not closed by 'end'");
  c.validate();
  return c;
}

ParamCircuit parse_circuit(const std::string& text) {
  std::istringstream in(text);
  return read_circuit(in);
}

}  // namespace dlocc
