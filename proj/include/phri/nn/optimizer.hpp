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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phri/nn/tape.hpp"

namespace phri::nn {

struct AmsGradOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// AMSGrad with bias correction. Moments are kept per parameter, in the
/// registration order of the ParameterSet it was built for.
class AmsGrad {
 public:
  struct Slot {
    Matrix m;
    Matrix v;
    Matrix v_max;
    std::int64_t steps = 0;
  };

  AmsGrad(const ParameterSet& params, AmsGradOptions options);

  /// Applies one update using the gradients stored in `params`. Parameters
  /// with a non-finite gradient are left untouched; their names are returned.
  std::vector<std::string> step(ParameterSet& params);

  const AmsGradOptions& options() const { return options_; }
  void set_lr(double lr);

  const std::vector<Slot>& slots() const { return slots_; }
  std::vector<Slot>& slots() { return slots_; }

 private:
  AmsGradOptions options_;
  std::vector<Slot> slots_;
};

/// Global L2 norm of all parameter gradients.
double gradient_norm(const ParameterSet& params);

/// Rescales gradients so their global norm is at most `max_norm`; returns the norm before clipping.
double clip_gradient_norm(ParameterSet& params, double max_norm);

/// Versioned binary snapshot of parameter values and optimizer state.
void save_checkpoint(std::ostream& out, const ParameterSet& params, const AmsGrad& optimizer);
/// Restores values (and optimizer moments) into an already-built set with matching names and shapes.
void load_checkpoint(std::istream& in, ParameterSet& params, AmsGrad& optimizer);

}  // namespace phri::nn
