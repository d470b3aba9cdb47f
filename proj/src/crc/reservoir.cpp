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

#include "phri/crc/reservoir.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "phri/common/binary_io.hpp"
#include "phri/common/error.hpp"
#include "phri/common/random.hpp"
#include "phri/crc/spectral.hpp"

namespace phri::crc {

namespace {

constexpr char kMagic[] = "PHRI-RC";
constexpr std::uint32_t kVersion = 1;

// Radii below this are treated as a nilpotent draw.
constexpr double kDegenerateRadius = 1e-12;

using Triplets = std::vector<Eigen::Triplet<Complex>>;

Complex draw_entry(Rng& rng, Mode mode) {
  double re = rng.uniform(-1.0, 1.0);
  double im = mode == Mode::kComplex ? rng.uniform(-1.0, 1.0) : 0.0;
  return {re, im};
}

SparseMatrix draw_sparse(Rng& rng, int rows, int cols, double density, Mode mode) {
  Triplets triplets;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (rng.bernoulli(density)) triplets.emplace_back(i, j, draw_entry(rng, mode));
    }
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void write_sparse(std::ostream& out, const SparseMatrix& m) {
  io::write_u64(out, static_cast<std::uint64_t>(m.rows()));
  io::write_u64(out, static_cast<std::uint64_t>(m.cols()));
  io::write_u64(out, static_cast<std::uint64_t>(m.nonZeros()));
  for (int r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      io::write_u64(out, static_cast<std::uint64_t>(it.row()));
      io::write_u64(out, static_cast<std::uint64_t>(it.col()));
      io::write_complex(out, it.value());
    }
  }
}

SparseMatrix read_sparse(std::istream& in) {
  auto rows = static_cast<Eigen::Index>(io::read_u64(in));
  auto cols = static_cast<Eigen::Index>(io::read_u64(in));
  auto nnz = io::read_u64(in);
  if (rows < 0 || cols < 0 || nnz > static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols)) {
    throw IoError("corrupt reservoir snapshot");
  }
  Triplets triplets;
  triplets.reserve(nnz);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    auto r = static_cast<Eigen::Index>(io::read_u64(in));
    auto c = static_cast<Eigen::Index>(io::read_u64(in));
    if (r >= rows || c >= cols) throw IoError("corrupt reservoir snapshot");
    triplets.emplace_back(r, c, io::read_complex(in));
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void write_vector(std::ostream& out, const Eigen::VectorXcd& v) {
  io::write_u64(out, static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) io::write_complex(out, v[i]);
}

Eigen::VectorXcd read_vector(std::istream& in) {
  auto n = io::read_u64(in);
  if (n > (1ULL << 32)) throw IoError("corrupt reservoir snapshot");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = io::read_complex(in);
  return v;
}

// A matrix whose nonzero pattern is an acyclic digraph is nilpotent.
bool has_cycle(const SparseMatrix& m) {
  const auto n = m.rows();
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (it.value() != Complex(0.0, 0.0)) ++indegree[static_cast<std::size_t>(it.col())];
    }
  }
  std::vector<int> ready;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(static_cast<int>(i));
  }
  Eigen::Index removed = 0;
  while (!ready.empty()) {
    int r = ready.back();
    ready.pop_back();
    ++removed;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (it.value() != Complex(0.0, 0.0) && --indegree[static_cast<std::size_t>(it.col())] == 0) {
        ready.push_back(static_cast<int>(it.col()));
      }
    }
  }
  return removed < n;
}

bool sparse_equal(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  for (int r = 0; r < a.outerSize(); ++r) {
    SparseMatrix::InnerIterator ia(a, r);
    SparseMatrix::InnerIterator ib(b, r);
    for (; ia && ib; ++ia, ++ib) {
      if (ia.col() != ib.col() || ia.value() != ib.value()) return false;
    }
    if (ia || ib) return false;
  }
  return true;
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::kComplex ? "complex" : "real"; }

Mode mode_from_string(const std::string& text) {
  if (text == "complex") return Mode::kComplex;
  if (text == "real") return Mode::kReal;
  throw ParameterError("unknown reservoir mode '" + text + "'");
}

double phase_upper_bound(double amp) {
  if (!(amp > 0.0 && amp <= 1.0)) throw ParameterError("phase_upper_bound: amplitude must lie in (0, 1]");
  return std::acos(amp / 2.0);
}

Complex complex_tanh(Complex z) {
  double amp = std::abs(z);
  if (amp == 0.0) return {0.0, 0.0};
  // tanh(|z|) * z / |z| keeps the phase without a round trip through atan2.
  return z * (std::tanh(amp) / amp);
}

Complex draw_leak_factor(Rng& rng, Mode mode) {
  const double amp = 1.0 - rng.uniform();  // (0, 1]
  if (mode == Mode::kReal) return {amp, 0.0};
  return std::polar(amp, rng.uniform() * phase_upper_bound(amp));
}

ReservoirParams ReservoirParams::init(const ReservoirOptions& options, Diagnostics* diagnostics) {
  if (options.n_neurons < 1) throw ParameterError("reservoir needs at least one neuron");
  if (options.input_dim < 1) throw ParameterError("reservoir input dimension must be positive");
  if (!(options.spectral_target > 0.0 && options.spectral_target < 1.0)) {
    throw ParameterError("spectral target must lie in (0, 1)");
  }
  const int n = options.n_neurons;
  const double density = 1.0 / std::pow(static_cast<double>(n), options.sparsity_exponent);
  const int rows = options.normalization_rows.value_or(options.input_dim);
  if (rows < 0) throw ParameterError("normalization rows must be non-negative");

  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(options.seed, attempt));
    ReservoirParams p;
    p.mode_ = options.mode;
    p.seed_ = options.seed;
    p.spectral_target_ = options.spectral_target;

    p.w_in_ = draw_sparse(rng, n, options.input_dim, density, options.mode);
    p.w_rc_ = draw_sparse(rng, n, n, density, options.mode);
    p.bias_ = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (rng.bernoulli(density)) p.bias_[i] = draw_entry(rng, options.mode);
    }
    p.gamma_.resize(n);
    for (int i = 0; i < n; ++i) p.gamma_[i] = draw_leak_factor(rng, options.mode);

    double radius = has_cycle(p.w_rc_) ? spectral_radius(p.w_rc_) : 0.0;
    if (!(radius > kDegenerateRadius) || !std::isfinite(radius)) {
      if (diagnostics != nullptr) {
        diagnostics->messages.push_back("reservoir seed " + std::to_string(options.seed) + " attempt " +
                                        std::to_string(attempt) +
                                        ": recurrent matrix has zero spectral radius, re-drawing");
      }
      continue;
    }
    p.w_rc_ *= Complex(options.spectral_target / radius, 0.0);
    const double divisor = 1.0 + static_cast<double>(rows);
    p.w_in_ *= Complex(1.0 / divisor, 0.0);
    p.bias_ /= divisor;
    return p;
  }
}

ReservoirParams ReservoirParams::from_parts(SparseMatrix w_in, SparseMatrix w_rc, Eigen::VectorXcd bias,
                                            Eigen::VectorXcd gamma, Mode mode, std::uint64_t seed) {
  const auto n = gamma.size();
  if (n < 1 || w_in.rows() != n || w_in.cols() < 1 || w_rc.rows() != n || w_rc.cols() != n || bias.size() != n) {
    throw ParameterError("inconsistent reservoir parameter shapes");
  }
  ReservoirParams p;
  p.w_in_ = std::move(w_in);
  p.w_rc_ = std::move(w_rc);
  p.bias_ = std::move(bias);
  p.gamma_ = std::move(gamma);
  p.mode_ = mode;
  p.seed_ = seed;
  p.spectral_target_ = spectral_radius(p.w_rc_);
  return p;
}

ReservoirParams ReservoirParams::with_zero_bias() const {
  ReservoirParams copy = *this;
  copy.bias_.setZero();
  return copy;
}

double ReservoirParams::state_bound() const {
  double bound = 0.0;
  for (Eigen::Index i = 0; i < gamma_.size(); ++i) {
    double a = std::abs(gamma_[i]);
    bound = std::max(bound, a / (1.0 - std::abs(Complex(1.0, 0.0) - gamma_[i])));
  }
  return bound;
}

void ReservoirParams::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  io::write_u32(out, kVersion);
  io::write_u32(out, mode_ == Mode::kComplex ? 1u : 0u);
  io::write_u64(out, seed_);
  io::write_f64(out, spectral_target_);
  write_sparse(out, w_in_);
  write_sparse(out, w_rc_);
  write_vector(out, bias_);
  write_vector(out, gamma_);
}

ReservoirParams ReservoirParams::load(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(kMagic));
  if (in.gcount() != sizeof(kMagic) || std::string(magic, sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw IoError("not a reservoir snapshot");
  }
  std::uint32_t version = io::read_u32(in);
  if (version != kVersion) throw IoError("unsupported reservoir snapshot version " + std::to_string(version));
  ReservoirParams p;
  p.mode_ = io::read_u32(in) == 1u ? Mode::kComplex : Mode::kReal;
  p.seed_ = io::read_u64(in);
  p.spectral_target_ = io::read_f64(in);
  p.w_in_ = read_sparse(in);
  p.w_rc_ = read_sparse(in);
  p.bias_ = read_vector(in);
  p.gamma_ = read_vector(in);
  const auto n = p.gamma_.size();
  if (p.w_in_.rows() != n || p.w_rc_.rows() != n || p.w_rc_.cols() != n || p.bias_.size() != n) {
    throw IoError("inconsistent reservoir snapshot dimensions");
  }
  return p;
}

bool ReservoirParams::operator==(const ReservoirParams& other) const {
  return mode_ == other.mode_ && seed_ == other.seed_ && spectral_target_ == other.spectral_target_ &&
         sparse_equal(w_in_, other.w_in_) && sparse_equal(w_rc_, other.w_rc_) && bias_ == other.bias_ &&
         gamma_ == other.gamma_;
}

ReservoirState step(const ReservoirParams& params, const ReservoirState& state, std::span<const double> input) {
  const int n = params.n_neurons();
  if (static_cast<int>(input.size()) != params.input_dim()) {
    throw ParameterError("reservoir input has dimension " + std::to_string(input.size()) + ", expected " +
                         std::to_string(params.input_dim()));
  }
  if (state.h.size() != n) throw ParameterError("reservoir state dimension mismatch");
  for (double u : input) {
    if (!std::isfinite(u)) throw NumericError("non-finite reservoir input");
  }

  Eigen::VectorXcd u(static_cast<Eigen::Index>(input.size()));
  for (std::size_t k = 0; k < input.size(); ++k) u[static_cast<Eigen::Index>(k)] = Complex(input[k], 0.0);

  Eigen::VectorXcd pre = params.w_in() * u;
  pre += params.w_rc() * state.h;
  pre += params.bias();

  ReservoirState next{Eigen::VectorXcd(n)};
  const auto& g = params.gamma();
  for (int i = 0; i < n; ++i) {
    next.h[i] = (Complex(1.0, 0.0) - g[i]) * state.h[i] + g[i] * complex_tanh(pre[i]);
  }
  return next;
}

Eigen::VectorXd readout_real(const ReservoirState& state) { return state.h.real(); }

}  // namespace phri::crc
