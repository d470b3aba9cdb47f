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

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "phri/common/random.hpp"

namespace phri::crc {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

enum class Mode { kComplex, kReal };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& text);

struct ReservoirOptions {
  int n_neurons = 1000;
  int input_dim = 1;
  std::uint64_t seed = 0;
  Mode mode = Mode::kComplex;
  double spectral_target = 0.9;
  /// Divisor rows for w_in and b normalization (1 + rows); defaults to input_dim.
  std::optional<int> normalization_rows;
  /// Entries of w_in, w_rc, b survive with probability 1 / n_neurons^exponent.
  double sparsity_exponent = 0.9;
};

/// Messages produced while drawing parameters (e.g. degenerate re-draws).
struct Diagnostics {
  std::vector<std::string> messages;
};

/// Upper bound of phase(gamma) that keeps |1 - gamma| < 1 for |gamma| = amp.
double phase_upper_bound(double amp);

/// One leak factor as init draws it: amplitude uniform on (0, 1], phase
/// uniform below phase_upper_bound (zero in real mode).
Complex draw_leak_factor(Rng& rng, Mode mode);

/// Phase-amplitude activation tanh(|z|) exp(i arg z), with arg 0 := 0.
Complex complex_tanh(Complex z);

/// Fixed reservoir weights. Pre-activation of neuron j is
/// sum_k w_in(j, k) u_k + sum_k w_rc(j, k) h_k + b_j, i.e. the stored
/// matrices are the transposes of the ones applied as w^T u in the update.
class ReservoirParams {
 public:
  static ReservoirParams init(const ReservoirOptions& options, Diagnostics* diagnostics = nullptr);

  /// Assembles parameters as given (no scaling); shapes are validated.
  static ReservoirParams from_parts(SparseMatrix w_in, SparseMatrix w_rc, Eigen::VectorXcd bias,
                                    Eigen::VectorXcd gamma, Mode mode, std::uint64_t seed = 0);

  int n_neurons() const { return static_cast<int>(gamma_.size()); }
  int input_dim() const { return static_cast<int>(w_in_.cols()); }
  Mode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  double spectral_target() const { return spectral_target_; }

  const SparseMatrix& w_in() const { return w_in_; }
  const SparseMatrix& w_rc() const { return w_rc_; }
  const Eigen::VectorXcd& bias() const { return bias_; }
  const Eigen::VectorXcd& gamma() const { return gamma_; }

  /// Copy with b = 0, used by the free-response analysis.
  ReservoirParams with_zero_bias() const;

  /// Radius of the ball every state contracts into: max |g| / (1 - |1 - g|).
  double state_bound() const;

  void save(std::ostream& out) const;
  static ReservoirParams load(std::istream& in);

  bool operator==(const ReservoirParams& other) const;

 private:
  ReservoirParams() = default;

  SparseMatrix w_in_;
  SparseMatrix w_rc_;
  Eigen::VectorXcd bias_;
  Eigen::VectorXcd gamma_;
  Mode mode_ = Mode::kComplex;
  std::uint64_t seed_ = 0;
  double spectral_target_ = 0.9;
};

struct ReservoirState {
  Eigen::VectorXcd h;

  static ReservoirState zeros(int n_neurons) { return {Eigen::VectorXcd::Zero(n_neurons)}; }
};

/// One leaky update with the real input lifted to the complex plane.
ReservoirState step(const ReservoirParams& params, const ReservoirState& state,
                    std::span<const double> input);

/// Element-wise real part; the imaginary part stays inside the state.
Eigen::VectorXd readout_real(const ReservoirState& state);

}  // namespace phri::crc
