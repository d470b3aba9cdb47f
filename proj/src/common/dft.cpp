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

#include "phri/common/dft.hpp"

#include <cmath>
#include <vector>

#include <fftw3.h>

namespace phri {

Eigen::MatrixXd amplitude_spectrum(const Eigen::MatrixXd& signals) {
  const int n = static_cast<int>(signals.rows());
  const int bins = n / 2 + 1;
  Eigen::MatrixXd out(bins, signals.cols());
  if (n == 0) return out;

  std::vector<double> in(static_cast<std::size_t>(n));
  auto* freq = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(bins)));
  // FFTW_ESTIMATE leaves the input untouched during planning.
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), freq, FFTW_ESTIMATE);
  for (Eigen::Index c = 0; c < signals.cols(); ++c) {
    for (int t = 0; t < n; ++t) in[static_cast<std::size_t>(t)] = signals(t, c);
    fftw_execute(plan);
    for (int k = 0; k < bins; ++k) out(k, c) = std::hypot(freq[k][0], freq[k][1]) / n;
  }
  fftw_destroy_plan(plan);
  fftw_free(freq);
  return out;
}

double dominant_frequency(const Eigen::VectorXd& signal, double dt) {
  const Eigen::MatrixXd spectrum = amplitude_spectrum(signal);
  if (spectrum.rows() < 2) return 0.0;
  Eigen::Index best = 1;
  for (Eigen::Index k = 2; k < spectrum.rows(); ++k) {
    if (spectrum(k, 0) > spectrum(best, 0)) best = k;
  }
  return static_cast<double>(best) / (static_cast<double>(signal.size()) * dt);
}

}  // namespace phri
