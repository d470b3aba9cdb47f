// Copyright 2026 The phri Authors.
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

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

namespace phri::model {

/// The three ablation switches: explicit dynamics (D), auxiliary policy
/// loss (A), complex reservoir (C).
struct AblationFlags {
  bool dynamics = true;
  bool auxiliary = true;
  bool complex = true;

  /// "+D+A+C" style label.
  std::string label() const;
  static AblationFlags parse(const std::string& label);

  /// All eight combinations, ordered as the result table rows: D major, then A, then C, minus before plus.
  static std::array<AblationFlags, 8> all();

  bool operator==(const AblationFlags&) const = default;
};

/// How a model without explicit dynamics predicts o_{t+1}.
enum class NoDynamicsWiring {
  kDirect,      // decoder reads s_t
  kOnesAction,  // decoder reads f(s_t, 1), the dynamics network fed an all-ones action
};

struct ModelConfig {
  AblationFlags flags;
  double beta_state = 0.1;   // KL(q || p_s)
  double beta_policy = 0.1;  // KL(pi || p_a)
  double beta_aux = 1.0;     // -log pi(a_t)
  int latent_dim = 3;
  int obs_dim = 60;
  int action_dim = 3;
  int n_rc = 1000;
  int width = 100;
  double lr = 1e-4;
  int batch_size = 44;
  int epochs = 100;
  std::uint64_t seed = 0;
  double clip_norm = 10.0;
  double initial_dof = 10.0;
  bool history_from_mean = false;  // advance h_s with the encoder mean instead of a sample
  bool teacher_forcing = false;    // feed the dataset action to the dynamics instead of a policy sample
  NoDynamicsWiring no_dynamics_wiring = NoDynamicsWiring::kDirect;

  void validate() const;

  /// Flat key/value form used by checkpoints and config files.
  std::map<std::string, std::string> to_map() const;
  /// Starts from `base` and overrides every key present; unknown keys throw.
  static ModelConfig from_map(const std::map<std::string, std::string>& values, ModelConfig base);
  static ModelConfig from_map(const std::map<std::string, std::string>& values);
};

}  // namespace phri::model
