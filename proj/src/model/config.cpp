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

#include "phri/model/config.hpp"

#include <charconv>
#include <cmath>

#include "phri/common/binary_io.hpp"
#include "phri/common/error.hpp"

namespace phri::model {
namespace {

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw ParameterError(key + ": not a number: " + text);
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& text) {
  Int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw ParameterError(key + ": not an integer: " + text);
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ParameterError(key + ": not a boolean: " + text);
}

}  // namespace

std::string AblationFlags::label() const {
  std::string s;
  s += dynamics ? "+D" : "-D";
  s += auxiliary ? "+A" : "-A";
  s += complex ? "+C" : "-C";
  return s;
}

AblationFlags AblationFlags::parse(const std::string& label) {
  AblationFlags f;
  bool seen[3] = {false, false, false};
  if (label.size() != 6) throw ParameterError("ablation label must look like +D+A+C, got '" + label + "'");
  for (std::size_t i = 0; i < 6; i += 2) {
    const char sign = label[i];
    const char letter = label[i + 1];
    if (sign != '+' && sign != '-') throw ParameterError("bad ablation label '" + label + "'");
    const bool on = sign == '+';
    const int slot = letter == 'D' ? 0 : letter == 'A' ? 1 : letter == 'C' ? 2 : -1;
    if (slot < 0 || seen[slot]) throw ParameterError("bad ablation label '" + label + "'");
    seen[slot] = true;
    (slot == 0 ? f.dynamics : slot == 1 ? f.auxiliary : f.complex) = on;
  }
  return f;
}

std::array<AblationFlags, 8> AblationFlags::all() {
  std::array<AblationFlags, 8> out;
  for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = AblationFlags{(i & 4) != 0, (i & 2) != 0, (i & 1) != 0};
  return out;
}

void ModelConfig::validate() const {
  if (!(beta_state >= 0.0 && beta_policy >= 0.0 && beta_aux >= 0.0)) throw ParameterError("loss weights must be non-negative");
  if (latent_dim < 1 || obs_dim < 1 || action_dim < 1) throw ParameterError("model dimensions must be positive");
  if (n_rc < 1 || width < 2) throw ParameterError("reservoir size must be positive and width at least 2");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ParameterError("learning rate must be positive");
  if (batch_size < 1 || epochs < 0) throw ParameterError("batch size must be positive and epochs non-negative");
  if (!(clip_norm > 0.0)) throw ParameterError("clip norm must be positive");
  if (!(initial_dof > 0.0)) throw ParameterError("initial dof must be positive");
}

std::map<std::string, std::string> ModelConfig::to_map() const {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"ablation", flags.label()},
      {"beta_state", io::format_double(beta_state)},
      {"beta_policy", io::format_double(beta_policy)},
      {"beta_aux", io::format_double(beta_aux)},
      {"latent_dim", std::to_string(latent_dim)},
      {"obs_dim", std::to_string(obs_dim)},
      {"action_dim", std::to_string(action_dim)},
      {"n_rc", std::to_string(n_rc)},
      {"width", std::to_string(width)},
      {"lr", io::format_double(lr)},
      {"batch_size", std::to_string(batch_size)},
      {"epochs", std::to_string(epochs)},
      {"seed", std::to_string(seed)},
      {"clip_norm", io::format_double(clip_norm)},
      {"initial_dof", io::format_double(initial_dof)},
      {"history_from_mean", b(history_from_mean)},
      {"teacher_forcing", b(teacher_forcing)},
      {"no_dynamics_wiring", no_dynamics_wiring == NoDynamicsWiring::kDirect ? "direct" : "ones-action"},
  };
}

ModelConfig ModelConfig::from_map(const std::map<std::string, std::string>& values, ModelConfig c) {
  for (const auto& [key, text] : values) {
    if (key == "ablation") {
      c.flags = AblationFlags::parse(text);
    } else if (key == "beta_state") {
      c.beta_state = to_double(key, text);
    } else if (key == "beta_policy") {
      c.beta_policy = to_double(key, text);
    } else if (key == "beta_aux") {
      c.beta_aux = to_double(key, text);
    } else if (key == "latent_dim") {
      c.latent_dim = to_int<int>(key, text);
    } else if (key == "obs_dim") {
      c.obs_dim = to_int<int>(key, text);
    } else if (key == "action_dim") {
      c.action_dim = to_int<int>(key, text);
    } else if (key == "n_rc") {
      c.n_rc = to_int<int>(key, text);
    } else if (key == "width") {
      c.width = to_int<int>(key, text);
    } else if (key == "lr") {
      c.lr = to_double(key, text);
    } else if (key == "batch_size") {
      c.batch_size = to_int<int>(key, text);
    } else if (key == "epochs") {
      c.epochs = to_int<int>(key, text);
    } else if (key == "seed") {
      c.seed = to_int<std::uint64_t>(key, text);
    } else if (key == "clip_norm") {
      c.clip_norm = to_double(key, text);
    } else if (key == "initial_dof") {
      c.initial_dof = to_double(key, text);
    } else if (key == "history_from_mean") {
      c.history_from_mean = to_bool(key, text);
    } else if (key == "teacher_forcing") {
      c.teacher_forcing = to_bool(key, text);
    } else if (key == "no_dynamics_wiring") {
      if (text == "direct") {
        c.no_dynamics_wiring = NoDynamicsWiring::kDirect;
      } else if (text == "ones-action") {
        c.no_dynamics_wiring = NoDynamicsWiring::kOnesAction;
      } else {
        throw ParameterError(key + ": expected direct or ones-action");
      }
    } else {
      throw ParameterError("unknown model option '" + key + "'");
    }
  }
  return c;
}

ModelConfig ModelConfig::from_map(const std::map<std::string, std::string>& values) {
  return from_map(values, ModelConfig{});
}

}  // namespace phri::model
