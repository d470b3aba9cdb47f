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

namespace phri {

/// One-sided DFT amplitudes |X_k| / n (k = 0 .. n/2) for each column of
/// `signals`, on the raw signal without windowing.
Eigen::MatrixXd amplitude_spectrum(const Eigen::MatrixXd& signals);

/// Frequency (in cycles per unit time) of the largest non-DC bin of a signal.
double dominant_frequency(const Eigen::VectorXd& signal, double dt);

}  // namespace phri
