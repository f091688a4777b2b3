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

// Dense complex linear algebra for multipartite density operators.
//
// Subsystem 0 is the most significant digit of a basis index. All operations
// return fresh values; nothing here mutates its inputs.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dlocc {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using Matrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using Vector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

using MatrixXc = Matrix<double>;
using VectorXc = Vector<double>;
using Dims = std::vector<int>;
using Wires = std::vector<int>;

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ZeroWeightError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {
inline std::atomic<std::size_t>& max_dimension_storage() {
  static std::atomic<std::size_t> value{4096};
  return value;
}
}  // namespace detail

/// Largest global Hilbert-space dimension any state may reach.
inline std::size_t max_dimension() { return detail::max_dimension_storage().load(); }
inline void set_max_dimension(std::size_t dim) { detail::max_dimension_storage().store(dim); }

inline std::size_t product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

inline void check_capacity(std::size_t dim) {
  if (dim > max_dimension()) {
    throw CapacityError("dimension " + std::to_string(dim) + " exceeds capacity " +
                        std::to_string(max_dimension()));
  }
}

/// Splits basis indices of a multipartite space into (local, rest) parts for a
/// chosen wire subset, so that index = local_offset[l] + rest_offset[r].
class SubsystemSplit {
 public:
  SubsystemSplit(const Dims& dims, const Wires& wires) {
    const int n = static_cast<int>(dims.size());
    std::vector<std::size_t> stride(n, 1);
    for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * static_cast<std::size_t>(dims[k + 1]);

    std::vector<bool> used(n, false);
    for (int w : wires) {
      if (w < 0 || w >= n) throw std::out_of_range("wire index " + std::to_string(w) + " out of range");
      if (used[w]) throw std::invalid_argument("duplicate wire index " + std::to_string(w));
      used[w] = true;
    }
    Wires rest;
    for (int k = 0; k < n; ++k)
      if (!used[k]) rest.push_back(k);

    local_offset_ = offsets(dims, stride, wires);
    rest_offset_ = offsets(dims, stride, rest);
  }

  std::size_t local_size() const { return local_offset_.size(); }
  std::size_t rest_size() const { return rest_offset_.size(); }
  const std::vector<std::size_t>& local_offset() const { return local_offset_; }
  const std::vector<std::size_t>& rest_offset() const { return rest_offset_; }

 private:
  static std::vector<std::size_t> offsets(const Dims& dims, const std::vector<std::size_t>& stride,
                                          const Wires& subset) {
    std::vector<std::size_t> out{0};
    for (int w : subset) {
      std::vector<std::size_t> next;
      next.reserve(out.size() * static_cast<std::size_t>(dims[w]));
      for (std::size_t base : out)
        for (int digit = 0; digit < dims[w]; ++digit) next.push_back(base + digit * stride[w]);
      out = std::move(next);
    }
    return out;
  }

  std::vector<std::size_t> local_offset_;
  std::vector<std::size_t> rest_offset_;
};

/// m <- (u on wires, identity elsewhere) * m, applied row-wise.
template <typename Real>
Matrix<Real> apply_left(const Matrix<Real>& m, const Matrix<Real>& u, const Dims& dims, const Wires& wires) {
  const SubsystemSplit split(dims, wires);
  const auto dl = static_cast<Eigen::Index>(split.local_size());
  const auto dr = static_cast<Eigen::Index>(split.rest_size());
  if (u.rows() != dl || u.cols() != dl) throw DimensionError("operator size does not match wire dimensions");
  const Eigen::Index cols = m.cols();
  const auto& lo = split.local_offset();
  const auto& ro = split.rest_offset();

  Matrix<Real> gathered(dl, dr * cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < dr; ++r)
      for (Eigen::Index l = 0; l < dl; ++l) gathered(l, c * dr + r) = m(lo[l] + ro[r], c);

  const Matrix<Real> mixed = u * gathered;

  Matrix<Real> out(m.rows(), cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < dr; ++r)
      for (Eigen::Index l = 0; l < dl; ++l) out(lo[l] + ro[r], c) = mixed(l, c * dr + r);
  return out;
}

/// u embedded on wires with identity elsewhere, as an explicit matrix.
template <typename Real>
Matrix<Real> embed_operator(const Matrix<Real>& u, const Dims& dims, const Wires& wires) {
  const auto dim = static_cast<Eigen::Index>(product(dims));
  return apply_left<Real>(Matrix<Real>::Identity(dim, dim), u, dims, wires);
}

/// tr_{not wires}[a * b] as a local operator on wires, without forming a * b.
template <typename Real>
Matrix<Real> partial_trace_of_product(const Matrix<Real>& a, const Matrix<Real>& b, const Dims& dims,
                                      const Wires& wires) {
  const SubsystemSplit split(dims, wires);
  const auto dl = static_cast<Eigen::Index>(split.local_size());
  const auto dr = static_cast<Eigen::Index>(split.rest_size());
  const Eigen::Index dim = a.rows();
  const auto& lo = split.local_offset();
  const auto& ro = split.rest_offset();
  // out(l, l') = sum_r sum_x a(lo[l]+ro[r], x) b(x, lo[l']+ro[r])
  Matrix<Real> rows(dl, dr * dim);
  Matrix<Real> cols(dr * dim, dl);
  for (Eigen::Index r = 0; r < dr; ++r)
    for (Eigen::Index x = 0; x < dim; ++x)
      for (Eigen::Index l = 0; l < dl; ++l) {
        rows(l, r * dim + x) = a(lo[l] + ro[r], x);
        cols(r * dim + x, l) = b(x, lo[l] + ro[r]);
      }
  return rows * cols;
}

template <typename Real>
class BasicPureVector {
 public:
  BasicPureVector(Dims dims, Vector<Real> amplitudes) : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
    if (product(dims_) != static_cast<std::size_t>(amplitudes_.size()))
      throw DimensionError("amplitude count does not match subsystem dimensions");
    const Real norm = amplitudes_.norm();
    if (std::abs(norm - Real(1)) > Real(1e-12)) throw std::invalid_argument("pure vector is not normalized");
  }

  const Dims& dims() const { return dims_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const Vector<Real>& amplitudes() const { return amplitudes_; }
  Matrix<Real> projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  Dims dims_;
  Vector<Real> amplitudes_;
};

/// A (possibly sub-normalized) density operator over an ordered list of
/// subsystems. The weight is the trace; postselected branches keep theirs.
template <typename Real>
class BasicDensityState {
 public:
  BasicDensityState(Dims dims, Matrix<Real> op) : dims_(std::move(dims)), op_(std::move(op)) {
    for (int d : dims_)
      if (d < 2) throw DimensionError("subsystem dimension must be at least 2");
    const std::size_t dim = product(dims_);
    check_capacity(dim);
    if (op_.rows() != op_.cols() || static_cast<std::size_t>(op_.rows()) != dim)
      throw DimensionError("operator size does not match subsystem dimensions");
  }

  static BasicDensityState from_pure(const BasicPureVector<Real>& psi) {
    return BasicDensityState(psi.dims(), psi.projector());
  }

  static BasicDensityState basis(const Dims& dims, const std::vector<int>& digits) {
    if (digits.size() != dims.size()) throw DimensionError("digit count does not match subsystem count");
    std::size_t index = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + static_cast<std::size_t>(digits[k]);
    const auto dim = static_cast<Eigen::Index>(product(dims));
    Matrix<Real> op = Matrix<Real>::Zero(dim, dim);
    op(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = Real(1);
    return BasicDensityState(dims, std::move(op));
  }

  static BasicDensityState maximally_mixed(const Dims& dims) {
    const auto dim = static_cast<Eigen::Index>(product(dims));
    return BasicDensityState(dims, Matrix<Real>::Identity(dim, dim) / Real(dim));
  }

  const Dims& dims() const { return dims_; }
  const Matrix<Real>& op() const { return op_; }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }
  Eigen::Index dim() const { return op_.rows(); }
  Real weight() const { return op_.trace().real(); }

  BasicDensityState normalized() const {
    const Real w = weight();
    if (!(w > Real(0))) throw ZeroWeightError("cannot normalize a zero-weight state");
    return BasicDensityState(dims_, op_ / w);
  }

  BasicDensityState scaled(Real factor) const { return BasicDensityState(dims_, op_ * factor); }

 private:
  Dims dims_;
  Matrix<Real> op_;
};

template <typename Real>
struct BasicKrausChannel {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<Matrix<Real>> kraus_ops;

  /// max-entry deviation of sum_i E_i^dagger E_i from the identity.
  Real completeness_error() const {
    Matrix<Real> sum = Matrix<Real>::Zero(in_dim, in_dim);
    for (const auto& e : kraus_ops) sum += e.adjoint() * e;
    return (sum - Matrix<Real>::Identity(in_dim, in_dim)).cwiseAbs().maxCoeff();
  }
};

using PureVector = BasicPureVector<double>;
using DensityState = BasicDensityState<double>;
using KrausChannel = BasicKrausChannel<double>;

template <typename Real>
bool is_unitary(const Matrix<Real>& u, Real tol = Real(1e-10)) {
  if (u.rows() != u.cols()) return false;
  const Matrix<Real> id = Matrix<Real>::Identity(u.rows(), u.cols());
  return (u.adjoint() * u - id).cwiseAbs().maxCoeff() <= tol;
}

template <typename Real>
BasicDensityState<Real> tensor(const BasicDensityState<Real>& a, const BasicDensityState<Real>& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  check_capacity(product(dims));
  const Eigen::Index da = a.dim();
  const Eigen::Index db = b.dim();
  Matrix<Real> op(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) op.block(i * db, j * db, db, db) = a.op()(i, j) * b.op();
  return BasicDensityState<Real>(std::move(dims), std::move(op));
}

template <typename Real>
BasicDensityState<Real> partial_trace(const BasicDensityState<Real>& s, const Wires& keep) {
  if (keep.empty()) throw DimensionError("partial trace must keep at least one subsystem");
  const SubsystemSplit split(s.dims(), keep);
  Dims dims;
  for (int w : keep) dims.push_back(s.dims()[w]);
  const auto dk = static_cast<Eigen::Index>(split.local_size());
  const auto dt = static_cast<Eigen::Index>(split.rest_size());
  const auto& ko = split.local_offset();
  const auto& to = split.rest_offset();
  Matrix<Real> op = Matrix<Real>::Zero(dk, dk);
  for (Eigen::Index j = 0; j < dk; ++j)
    for (Eigen::Index i = 0; i < dk; ++i) {
      Complex<Real> acc(0);
      for (Eigen::Index t = 0; t < dt; ++t) acc += s.op()(ko[i] + to[t], ko[j] + to[t]);
      op(i, j) = acc;
    }
  return BasicDensityState<Real>(std::move(dims), std::move(op));
}

/// Reorders subsystems: result subsystem k is input subsystem order[k].
template <typename Real>
BasicDensityState<Real> permute_subsystems(const BasicDensityState<Real>& s, const Wires& order) {
  if (order.size() != s.dims().size()) throw DimensionError("permutation length does not match subsystem count");
  const SubsystemSplit split(s.dims(), order);
  Dims dims;
  for (int w : order) dims.push_back(s.dims()[w]);
  const auto dim = static_cast<Eigen::Index>(split.local_size());
  const auto& lo = split.local_offset();
  Matrix<Real> op(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) op(i, j) = s.op()(lo[i], lo[j]);
  return BasicDensityState<Real>(std::move(dims), std::move(op));
}

template <typename Real>
BasicDensityState<Real> apply_unitary(const BasicDensityState<Real>& s, const Matrix<Real>& u, const Wires& wires,
                                      Real tol = Real(1e-10)) {
  if (!is_unitary<Real>(u, tol)) throw std::invalid_argument("operator is not unitary within tolerance");
  const Matrix<Real> left = apply_left<Real>(s.op(), u, s.dims(), wires);
  const Matrix<Real> both = apply_left<Real>(left.adjoint(), u, s.dims(), wires).adjoint();
  return BasicDensityState<Real>(s.dims(), both);
}

template <typename Real>
BasicDensityState<Real> apply_channel(const BasicDensityState<Real>& s, const BasicKrausChannel<Real>& ch,
                                      const Wires& wires) {
  if (ch.in_dim != ch.out_dim) throw DimensionError("only dimension-preserving channels are supported");
  if (ch.kraus_ops.empty() || ch.completeness_error() > Real(1e-10))
    throw std::invalid_argument("channel fails the Kraus completeness check");
  const Matrix<Real> zero = Matrix<Real>::Zero(s.dim(), s.dim());
  Matrix<Real> out = zero;
  for (const auto& e : ch.kraus_ops) {
    const Matrix<Real> left = apply_left<Real>(s.op(), e, s.dims(), wires);
    out += apply_left<Real>(left.adjoint(), e, s.dims(), wires).adjoint();
  }
  return BasicDensityState<Real>(s.dims(), std::move(out));
}

/// Outcome code (mixed radix over wires, first wire most significant) of every basis index.
inline std::vector<int> outcome_codes(const Dims& dims, const Wires& wires) {
  const SubsystemSplit split(dims, wires);
  std::vector<int> codes(product(dims), 0);
  const auto& lo = split.local_offset();
  const auto& ro = split.rest_offset();
  for (std::size_t l = 0; l < lo.size(); ++l)
    for (std::size_t r = 0; r < ro.size(); ++r) codes[lo[l] + ro[r]] = static_cast<int>(l);
  return codes;
}

/// Keeps entries whose row and column carry the same accepted outcome code;
/// i.e. sum over accepted outcomes o of P_o m P_o.
template <typename Real>
Matrix<Real> project_outcomes(const Matrix<Real>& m, const std::vector<int>& codes, const std::vector<bool>& accepted) {
  Matrix<Real> out = Matrix<Real>::Zero(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const int cj = codes[j];
    if (!accepted[cj]) continue;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (codes[i] == cj) out(i, j) = m(i, j);
  }
  return out;
}

template <typename Real>
struct BasicMeasurementBranch {
  std::vector<int> outcome;
  BasicDensityState<Real> state;
};

/// Projective computational-basis measurement; measured wires stay in the state, collapsed.
template <typename Real>
std::vector<BasicMeasurementBranch<Real>> measure_computational(const BasicDensityState<Real>& s, const Wires& wires) {
  const std::vector<int> codes = outcome_codes(s.dims(), wires);
  Dims local;
  for (int w : wires) local.push_back(s.dims()[w]);
  const auto outcomes = static_cast<int>(product(local));
  std::vector<BasicMeasurementBranch<Real>> branches;
  branches.reserve(outcomes);
  for (int o = 0; o < outcomes; ++o) {
    std::vector<bool> accepted(outcomes, false);
    accepted[o] = true;
    std::vector<int> digits(wires.size());
    int rem = o;
    for (int k = static_cast<int>(wires.size()) - 1; k >= 0; --k) {
      digits[k] = rem % local[k];
      rem /= local[k];
    }
    branches.push_back({digits, BasicDensityState<Real>(s.dims(), project_outcomes<Real>(s.op(), codes, accepted))});
  }
  return branches;
}

template <typename Real>
Real fidelity_pure(const BasicDensityState<Real>& s, const BasicPureVector<Real>& psi) {
  if (s.dim() != psi.dim()) throw DimensionError("state and vector dimensions differ");
  const Real w = s.weight();
  if (!(w > Real(0))) throw ZeroWeightError("fidelity of a zero-weight branch is undefined");
  const Complex<Real> overlap = psi.amplitudes().dot(s.op() * psi.amplitudes());
  return overlap.real() / w;
}

template <typename Real>
Real trace_distance(const BasicDensityState<Real>& a, const BasicDensityState<Real>& b) {
  if (a.dims() != b.dims()) throw DimensionError("trace distance needs equal dimensions");
  const Matrix<Real> diff = a.op() - b.op();
  const Matrix<Real> herm = (diff + diff.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Real>> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum() / Real(2);
}

template <typename Real>
Real purity(const BasicDensityState<Real>& s) {
  const Real w = s.weight();
  if (!(w > Real(0))) throw ZeroWeightError("purity of a zero-weight branch is undefined");
  return (s.op() * s.op()).trace().real() / (w * w);
}

/// Smallest eigenvalue of the Hermitian part; O(d^3), meant for test paths.
template <typename Real>
Real min_eigenvalue(const BasicDensityState<Real>& s) {
  const Matrix<Real> herm = (s.op() + s.op().adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Real>> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

template <typename Real>
Real hermiticity_error(const BasicDensityState<Real>& s) {
  return (s.op() - s.op().adjoint()).cwiseAbs().maxCoeff();
}

template <typename Real = double>
BasicPureVector<Real> max_entangled(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be at least 2");
  Vector<Real> amps = Vector<Real>::Zero(static_cast<Eigen::Index>(d) * d);
  const Real amp = Real(1) / std::sqrt(Real(d));
  for (int i = 0; i < d; ++i) amps(static_cast<Eigen::Index>(i) * d + i) = amp;
  return BasicPureVector<Real>({d, d}, std::move(amps));
}

}  // namespace dlocc
