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


// Noise channels as Kraus sets, and the noisy bipartite states built from them.
#pragma once

#include <string>

#include "dlocc/qmath.hpp"

namespace dlocc {

/// rho -> gamma rho + (1 - gamma) tr(rho) |0><0|
KrausChannel erasure_channel(double gamma);
/// rho -> p rho + (1 - p) I/d, realized with the Weyl (clock-and-shift) basis.
KrausChannel depolarizing_channel(double p, int d);
KrausChannel amplitude_damping(double gamma);
/// Kraus operators exactly as printed, with sqrt(gamma) on the |1><1| entry of E0.
KrausChannel generalized_amplitude_damping(double gamma, double q);
/// rho -> (1 - p) rho + p Z rho Z
KrausChannel dephasing(double p);

enum class StateFamily { SState, Isotropic, UnilocalGadBell, BilocalAdBell, QutritIsotropic, NoisyBellMinus };
enum class NoiseKind { AmplitudeDamping, Dephasing, Depolarizing };

/// Recipe for one noisy shared pair. Parameters unused by a family keep their defaults.
struct NoisyStateSpec {
  StateFamily family = StateFamily::Isotropic;
  double gamma = 1.0;
  double p = 1.0;
  double q = 1.0;
  NoiseKind noise = NoiseKind::AmplitudeDamping;

  static NoisyStateSpec s_state(double gamma) { return {StateFamily::SState, gamma}; }
  static NoisyStateSpec isotropic(double p) { return {StateFamily::Isotropic, 1.0, p}; }
  static NoisyStateSpec unilocal_gad_bell(double gamma, double q) {
    return {StateFamily::UnilocalGadBell, gamma, 1.0, q};
  }
  static NoisyStateSpec bilocal_ad_bell(double gamma) { return {StateFamily::BilocalAdBell, gamma}; }
  static NoisyStateSpec qutrit_isotropic(double p) { return {StateFamily::QutritIsotropic, 1.0, p}; }
  /// N (x) N applied to |Phi-><Phi-|; AD reads gamma, dephasing and depolarizing read p.
  static NoisyStateSpec noisy_bell_minus(NoiseKind noise, double level) {
    NoisyStateSpec spec{StateFamily::NoisyBellMinus};
    spec.noise = noise;
    if (noise == NoiseKind::AmplitudeDamping)
      spec.gamma = level;
    else
      spec.p = level;
    return spec;
  }

  /// Local dimension of each half of the pair.
  int local_dim() const { return family == StateFamily::QutritIsotropic ? 3 : 2; }

  friend bool operator==(const NoisyStateSpec&, const NoisyStateSpec&) = default;
};

DensityState make_state(const NoisyStateSpec& spec);

/// gamma |Phi+><Phi+| + (1 - gamma)|00><00|, built from the formula directly.
DensityState s_state(double gamma);
/// p |Phi+><Phi+| + (1 - p) I/4
DensityState isotropic_state(double p);
/// Bell-diagonal pair with the given fidelity: f Phi+ + (1 - f)/3 (I - Phi+).
DensityState isotropic_with_fidelity(double f);

std::string to_string(StateFamily family);
std::string to_string(NoiseKind kind);
StateFamily parse_state_family(const std::string& text);
NoiseKind parse_noise_kind(const std::string& text);

}  // namespace dlocc
