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

#include <Eigen/Dense>

#include "phri/crc/reservoir.hpp"

namespace phri::crc {

/// Readout traces and amplitude spectra of a reservoir driven by uniform
/// random input and then left to run freely on zero input.
struct FreeResponse {
  Eigen::MatrixXd driven_trace;     // n_drive x n_neurons
  Eigen::MatrixXd free_trace;       // n_free x n_neurons
  Eigen::MatrixXd driven_spectrum;  // (n_drive / 2 + 1) x n_neurons
  Eigen::MatrixXd free_spectrum;    // (n_free / 2 + 1) x n_neurons
};

/// Runs the analysis with the bias removed so h = 0 is the common rest point.
FreeResponse free_response_spectrum(const ReservoirParams& params, int n_drive, int n_free,
                                    std::uint64_t seed);

/// Mean |readout| over the last quarter of the free phase divided by the
/// mean over its first quarter.
double sustained_amplitude_ratio(const FreeResponse& response);

/// Largest free-phase bin (DC excluded) over the median of all bins.
double peak_to_median_ratio(const Eigen::MatrixXd& spectrum);

}  // namespace phri::crc
