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

#include "phri/nn/tape.hpp"

namespace phri::nn {

/// Diagonal normal with strictly positive scale (rows are samples).
struct DiagNormal {
  Var mean;
  Var scale;
};

/// Diagonal student-t. `dof` is either per-entry or a 1 x d row shared by all rows.
struct DiagStudentT {
  Var loc;
  Var scale;
  Var dof;
};

/// Lower bound added after the softplus on scale and dof heads.
inline constexpr double kPositiveFloor = 1e-6;

/// softplus(x) + floor: maps any pre-activation to a positive value.
Var positive(const Var& pre);

/// Inverse of `positive`, used to initialize a head at a target value.
double positive_inverse(double target);

/// mean + scale * noise.
Var reparameterized_sample(const DiagNormal& d, const Var& noise);

/// Per-row log densities summed over dimensions (n x 1).
Var log_prob(const DiagNormal& d, const Var& x);
Var log_prob(const DiagStudentT& d, const Var& x);

/// Per-row closed-form KL(q || p) summed over dimensions (n x 1).
Var kl_diag_normal(const DiagNormal& q, const DiagNormal& p);

}  // namespace phri::nn
