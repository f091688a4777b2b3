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


// Losses, gradients and optimizers for dynamic protocols.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlocc/dlocc.hpp"

namespace dlocc {

struct LossSpec {
  enum class Kind { Infidelity, DiscriminationError };

  Kind kind = Kind::Infidelity;
  DynamicProtocol protocol;
  /// Infidelity: pure target for the output pair.
  std::optional<PureVector> target;
  /// Infidelity: optional global state replacing the initial copies.
  std::optional<MatrixXc> initial_state;
  /// DiscriminationError: the two hypotheses and their priors.
  NoisyStateSpec state0;
  NoisyStateSpec state1;
  std::pair<double, double> priors{0.5, 0.5};

  static LossSpec infidelity(DynamicProtocol p, PureVector target);
  static LossSpec discrimination(DynamicProtocol p, NoisyStateSpec s0, NoisyStateSpec s1,
                                 std::pair<double, double> priors = {0.5, 0.5});
  /// Infidelity against |Phi+> of the protocol's local dimension.
  static LossSpec distillation(DynamicProtocol p);
};

/// 1 - F for distillation; prior-weighted misidentification probability for
/// discrimination. Throws ZeroWeightError when no distillation branch survives.
double evaluate_loss(const LossSpec& spec, const ParamTable& params);

enum class GradientMethod { Adjoint, ParameterShift, FiniteDifference };

/// Per-slot derivative in the ParamTable layout. ParameterShift falls back to
/// central differences (h = 1e-5) for slots on non-Pauli rotations.
ParamTable gradient(const LossSpec& spec, const ParamTable& params, GradientMethod method = GradientMethod::Adjoint);

struct LossAndGradient {
  double loss;
  ParamTable grad;
};
/// One forward and one backward pass. Zero acceptance yields loss 1 and a zero gradient.
LossAndGradient loss_and_gradient(const LossSpec& spec, const ParamTable& params);

struct OptimizerConfig {
  enum class Method { AdamLike, FiniteDiffDescent };

  Method method = Method::AdamLike;
  double step_size = 0.05;
  int max_iters = 500;
  double grad_tolerance = 1e-10;
  int restarts = 8;
  std::uint64_t rng_seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  /// Worker threads for restarts; 0 means one per hardware thread.
  int jobs = 1;

  void validate() const;
};

struct TrainReport {
  ParamTable best_params;
  double best_loss = 1.0;
  /// Best-so-far loss per iteration of the winning restart.
  std::vector<double> loss_trace;
  double wall_time = 0.0;
  std::uint64_t seed = 0;
  int best_restart = 0;
};

/// Restart i starts from warm_starts[i] when given, otherwise from angles drawn
/// uniformly on [0, 2 pi) with seed rng_seed + i. Ties go to the lowest restart.
TrainReport optimize(const LossSpec& spec, const OptimizerConfig& cfg,
                     const std::vector<ParamTable>& warm_starts = {});

/// Key-value header, parameter lines, then the loss trace as a CSV block.
std::string serialize_report(const TrainReport& report);
TrainReport parse_report(const std::string& text);

struct GreedyIsoReport {
  DynamicProtocol protocol;
  ParamTable params;
  double fidelity = 0.0;
  double success_probability = 0.0;
  double wall_time = 0.0;
  /// Fidelity reached by the training window at each stage.
  std::vector<double> stage_fidelity;
};

/// Trains the four-pair dynamic isotropic protocol one round at a time. The
/// first stage fits the final round on fresh copies; each later stage fits the
/// next intermediate round together with a provisional final round on the
/// state left by the frozen rounds, warm-started from the previous stage.
GreedyIsoReport train_iso_greedy(int n_copies, double p, int layers, const OptimizerConfig& first_stage,
                                 const OptimizerConfig& later_stages);

}  // namespace dlocc
