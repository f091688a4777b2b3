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

#include <cmath>
#include <stdexcept>

namespace dlocc {

namespace {

void require_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0))
    throw std::domain_error(std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
}

MatrixXc mat2(Complex<double> a, Complex<double> b, Complex<double> c, Complex<double> d) {
  MatrixXc m(2, 2);
  m << a, b, c, d;
  return m;
}

const PureVector& bell_minus() {
  static const PureVector psi = [] {
    VectorXc amps = VectorXc::Zero(4);
    amps(0) = 1.0 / std::sqrt(2.0);
    amps(3) = -1.0 / std::sqrt(2.0);
    return PureVector({2, 2}, amps);
  }();
  return psi;
}

KrausChannel local_noise(NoiseKind kind, double level) {
  switch (kind) {
    case NoiseKind::AmplitudeDamping:
      return amplitude_damping(level);
    case NoiseKind::Dephasing:
      return dephasing(level);
    case NoiseKind::Depolarizing:
      return depolarizing_channel(level, 2);
  }
  throw std::invalid_argument("unknown noise kind");
}

}  // namespace

KrausChannel erasure_channel(double gamma) {
  require_unit_interval(gamma, "gamma");
  const double keep = std::sqrt(gamma);
  const double lose = std::sqrt(1.0 - gamma);
  return {2, 2, {mat2(keep, 0, 0, keep), mat2(lose, 0, 0, 0), mat2(0, lose, 0, 0)}};
}

KrausChannel depolarizing_channel(double p, int d) {
  require_unit_interval(p, "p");
  if (d < 2) throw std::invalid_argument("dimension must be at least 2");
  // p rho + (1-p) I/d = p rho + (1-p)/d^2 sum_{a,b} W_ab rho W_ab^dagger
  const double pi = std::acos(-1.0);
  const Complex<double> omega = std::polar(1.0, 2.0 * pi / d);
  KrausChannel ch{d, d, {}};
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double coeff = (a == 0 && b == 0) ? p + (1.0 - p) / (d * d) : (1.0 - p) / (d * d);
      if (coeff == 0.0) continue;
      MatrixXc w = MatrixXc::Zero(d, d);
      for (int k = 0; k < d; ++k) w((k + a) % d, k) = std::pow(omega, static_cast<double>(b * k));
      ch.kraus_ops.push_back(std::sqrt(coeff) * w);
    }
  }
  return ch;
}

KrausChannel amplitude_damping(double gamma) {
  require_unit_interval(gamma, "gamma");
  return {2, 2, {mat2(1, 0, 0, std::sqrt(1.0 - gamma)), mat2(0, std::sqrt(gamma), 0, 0)}};
}

KrausChannel generalized_amplitude_damping(double gamma, double q) {
  require_unit_interval(gamma, "gamma");
  require_unit_interval(q, "q");
  const double sq = std::sqrt(q);
  const double sq1 = std::sqrt(1.0 - q);
  const double sg = std::sqrt(gamma);
  const double sg1 = std::sqrt(1.0 - gamma);
  return {2,
          2,
          {sq * mat2(1, 0, 0, sg), sq * mat2(0, sg1, 0, 0), sq1 * mat2(sg, 0, 0, 1), sq1 * mat2(0, 0, sg1, 0)}};
}

KrausChannel dephasing(double p) {
  require_unit_interval(p, "p");
  return {2, 2, {std::sqrt(1.0 - p) * mat2(1, 0, 0, 1), std::sqrt(p) * mat2(1, 0, 0, -1)}};
}

DensityState s_state(double gamma) {
  require_unit_interval(gamma, "gamma");
  MatrixXc op = gamma * max_entangled(2).projector();
  op(0, 0) += 1.0 - gamma;
  return DensityState({2, 2}, op);
}

DensityState isotropic_state(double p) {
  require_unit_interval(p, "p");
  const MatrixXc op = p * max_entangled(2).projector() + (1.0 - p) * MatrixXc::Identity(4, 4) / 4.0;
  return DensityState({2, 2}, op);
}

DensityState isotropic_with_fidelity(double f) {
  require_unit_interval(f, "f");
  const MatrixXc phi = max_entangled(2).projector();
  const MatrixXc op = f * phi + (1.0 - f) / 3.0 * (MatrixXc::Identity(4, 4) - phi);
  return DensityState({2, 2}, op);
}

DensityState make_state(const NoisyStateSpec& spec) {
  const DensityState bell = DensityState::from_pure(max_entangled(2));
  switch (spec.family) {
    case StateFamily::SState:
      return s_state(spec.gamma);
    case StateFamily::Isotropic:
      return isotropic_state(spec.p);
    case StateFamily::UnilocalGadBell:
      return apply_channel(bell, generalized_amplitude_damping(spec.gamma, spec.q), {0});
    case StateFamily::BilocalAdBell: {
      const KrausChannel ad = amplitude_damping(spec.gamma);
      return apply_channel(apply_channel(bell, ad, {0}), ad, {1});
    }
    case StateFamily::QutritIsotropic: {
      require_unit_interval(spec.p, "p");
      const MatrixXc op = spec.p * max_entangled(3).projector() + (1.0 - spec.p) * MatrixXc::Identity(9, 9) / 9.0;
      return DensityState({3, 3}, op);
    }
    case StateFamily::NoisyBellMinus: {
      const double level = spec.noise == NoiseKind::AmplitudeDamping ? spec.gamma : spec.p;
      const KrausChannel ch = local_noise(spec.noise, level);
      const DensityState minus = DensityState::from_pure(bell_minus());
      return apply_channel(apply_channel(minus, ch, {0}), ch, {1});
    }
  }
  throw std::invalid_argument("unknown state family");
}

std::string to_string(StateFamily family) {
  switch (family) {
    case StateFamily::SState:
      return "s_state";
    case StateFamily::Isotropic:
      return "isotropic";
    case StateFamily::UnilocalGadBell:
      return "unilocal_gad_bell";
    case StateFamily::BilocalAdBell:
      return "bilocal_ad_bell";
    case StateFamily::QutritIsotropic:
      return "qutrit_isotropic";
    case StateFamily::NoisyBellMinus:
      return "noisy_bell_minus";
  }
  return "unknown";
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::AmplitudeDamping:
      return "amplitude_damping";
    case NoiseKind::Dephasing:
      return "dephasing";
    case NoiseKind::Depolarizing:
      return "depolarizing";
  }
  return "unknown";
}

StateFamily parse_state_family(const std::string& text) {
  for (auto f : {StateFamily::SState, StateFamily::Isotropic, StateFamily::UnilocalGadBell,
                 StateFamily::BilocalAdBell, StateFamily::QutritIsotropic, StateFamily::NoisyBellMinus})
    if (to_string(f) == text) return f;
  throw std::invalid_argument("unknown state family '" + text + "'");
}

NoiseKind parse_noise_kind(const std::string& text) {
  for (auto k : {NoiseKind::AmplitudeDamping, NoiseKind::Dephasing, NoiseKind::Depolarizing})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown noise kind '" + text + "'");
}

}  // namespace dlocc
