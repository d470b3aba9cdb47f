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

#include "phri/crc/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "phri/common/error.hpp"
#include "phri/common/random.hpp"

namespace phri::crc {

namespace {

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& block) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(block);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(block.rows(), block.cols());
}

double ritz_radius(const Eigen::MatrixXcd& basis, const Eigen::MatrixXcd& image) {
  Eigen::MatrixXcd h = basis.adjoint() * image;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericError("Rayleigh-Ritz eigenvalue solve failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Matrix>
PowerIterationResult run(const Matrix& m, const PowerIterationOptions& options) {
  if (m.rows() != m.cols()) throw ParameterError("spectral radius requires a square matrix");
  const Eigen::Index n = m.rows();
  PowerIterationResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  const Eigen::Index p = std::min<Eigen::Index>(n, std::max(1, options.block_size));

  // Fixed start block so the estimate is a pure function of the matrix.
  Rng rng(0x5eed5eedULL);
  Eigen::MatrixXcd start(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) start(i, j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  }
  Eigen::MatrixXcd basis = orthonormalize(start);

  double previous = -1.0;
  int stable = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXcd image = m * basis;
    double scale = image.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) {
      // A^k X vanished: the start block lies in the nilpotent part.
      result.radius = 0.0;
      result.iterations = it;
      result.converged = true;
      return result;
    }
    double estimate = ritz_radius(basis, image);
    result.radius = estimate;
    result.iterations = it;
    if (previous >= 0.0 && std::abs(estimate - previous) <= options.rel_tol * std::max(estimate, 1e-300)) {
      if (++stable >= 3) {
        result.converged = true;
        return result;
      }
    } else {
      stable = 0;
    }
    previous = estimate;
    basis = orthonormalize(image / scale);
  }
  return result;
}

}  // namespace

PowerIterationResult power_iteration(const SparseMatrix& m, const PowerIterationOptions& options) {
  return run(m, options);
}

PowerIterationResult power_iteration(const Eigen::MatrixXcd& m, const PowerIterationOptions& options) {
  return run(m, options);
}

double spectral_radius(const SparseMatrix& m) { return power_iteration(m).radius; }

double spectral_radius(const Eigen::MatrixXcd& m) { return power_iteration(m).radius; }

}  // namespace phri::crc
