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

#include <vector>

#include "phri/nn/tape.hpp"

namespace phri::nn {

// Differentiable primitives. Shapes follow the (samples x features)
// convention; a 1 x n operand named `row` is broadcast over all rows.

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var add_row(const Var& a, const Var& row);
Var mul_row(const Var& a, const Var& row);
Var scale(const Var& a, double factor);
Var add_scalar(const Var& a, double c);

Var relu(const Var& a);
Var softplus(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var square(const Var& a);

Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count);

/// 1 x 1 sum of all entries.
Var sum(const Var& a);
/// n x 1 per-row sums.
Var row_sum(const Var& a);
/// 1 x 1 value sum_i weights_i * a(i, 0) for an n x 1 column.
Var weighted_sum(const Var& column, const Eigen::VectorXd& weights);

/// Per-row normalization (x - mean) / sqrt(var + eps), then gain and bias.
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);

}  // namespace phri::nn
