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

#include <Eigen/Dense>

#include "phri/crc/reservoir.hpp"

namespace phri::crc {

struct PowerIterationOptions {
  double rel_tol = 1e-10;
  int max_iterations = 10000;
  /// Width of the iterated block; handles eigenvalues of equal modulus
  /// (conjugate pairs, cycles) up to this multiplicity.
  int block_size = 16;
};

struct PowerIterationResult {
  double radius = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue magnitude by block power iteration with Rayleigh-Ritz
/// extraction and a deterministic start block.
PowerIterationResult power_iteration(const SparseMatrix& m, const PowerIterationOptions& options = {});
PowerIterationResult power_iteration(const Eigen::MatrixXcd& m, const PowerIterationOptions& options = {});

double spectral_radius(const SparseMatrix& m);
double spectral_radius(const Eigen::MatrixXcd& m);

}  // namespace phri::crc
