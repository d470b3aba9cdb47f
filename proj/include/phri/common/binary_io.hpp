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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace phri::io {

// Little-endian primitives for the checkpoint and reservoir snapshots.

void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
void write_string(std::ostream& out, const std::string& s);
void write_f64_array(std::ostream& out, const double* data, std::size_t n);

std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
std::string read_string(std::istream& in);
void read_f64_array(std::istream& in, double* data, std::size_t n);

void write_complex(std::ostream& out, std::complex<double> v);
std::complex<double> read_complex(std::istream& in);

/// Decimal text with 17 significant digits, which round-trips any double.
std::string format_double(double v);

}  // namespace phri::io
