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

#include "phri/crc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "phri/common/dft.hpp"
#include "phri/common/error.hpp"
#include "phri/common/random.hpp"

namespace phri::crc {

FreeResponse free_response_spectrum(const ReservoirParams& params, int n_drive, int n_free, std::uint64_t seed) {
  if (n_drive < 16 || n_free < 16) throw ParameterError("free response needs at least 16 driven and 16 free steps");
  const ReservoirParams unbiased = params.with_zero_bias();
  const int n = unbiased.n_neurons();
  FreeResponse r;
  r.driven_trace.resize(n_drive, n);
  r.free_trace.resize(n_free, n);

  Rng rng(seed);
  std::vector<double> u(static_cast<std::size_t>(unbiased.input_dim()));
  auto state = ReservoirState::zeros(n);
  for (int t = 0; t < n_drive; ++t) {
    for (double& x : u) x = rng.uniform(-1.0, 1.0);
    state = step(unbiased, state, u);
    r.driven_trace.row(t) = readout_real(state).transpose();
  }
  std::fill(u.begin(), u.end(), 0.0);
  for (int t = 0; t < n_free; ++t) {
    state = step(unbiased, state, u);
    r.free_trace.row(t) = readout_real(state).transpose();
  }
  r.driven_spectrum = amplitude_spectrum(r.driven_trace);
  r.free_spectrum = amplitude_spectrum(r.free_trace);
  return r;
}

double sustained_amplitude_ratio(const FreeResponse& response) {
  const Eigen::Index n = response.free_trace.rows();
  const Eigen::Index quarter = std::max<Eigen::Index>(1, n / 4);
  double early = response.free_trace.topRows(quarter).cwiseAbs().mean();
  double late = response.free_trace.bottomRows(quarter).cwiseAbs().mean();
  if (early == 0.0) return late == 0.0 ? 0.0 : INFINITY;
  return late / early;
}

double peak_to_median_ratio(const Eigen::MatrixXd& spectrum) {
  double best = 0.0;
  if (spectrum.rows() < 3) return best;
  std::vector<double> bins(static_cast<std::size_t>(spectrum.rows() - 1));
  for (Eigen::Index c = 0; c < spectrum.cols(); ++c) {
    for (Eigen::Index k = 1; k < spectrum.rows(); ++k) bins[static_cast<std::size_t>(k - 1)] = spectrum(k, c);
    double peak = *std::max_element(bins.begin(), bins.end());
    auto mid = bins.begin() + static_cast<std::ptrdiff_t>(bins.size() / 2);
    std::nth_element(bins.begin(), mid, bins.end());
    double median = *mid;
    if (median > 0.0) best = std::max(best, peak / median);
  }
  return best;
}

}  // namespace phri::crc
