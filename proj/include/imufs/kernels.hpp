// Copyright 2026 The imufs Authors. All Rights Reserved.
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

// Data-parallel inner loops used by every dense routine in the library.
//
// Each kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2 variant. The active table is chosen once at startup from the CPU's
// capabilities; IMUFS_SIMD=scalar|avx2|auto overrides the choice.
//
// Elementwise kernels (axpy, scale, sqrt_ratio_update) are bit-identical
// across variants. Reductions (dot, squared_distance, sum_squares) use a
// different summation order in the SIMD variant and agree to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace imufs::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // x[i] *= sqrt(num[i] / max(den[i], floor))
  void (*sqrt_ratio_update)(double* x, const double* num, const double* den,
                            double floor, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the binary or the CPU lacks AVX2.
const KernelTable* avx2_table();

const KernelTable& active();
void set_active(Isa isa);  // throws std::runtime_error if unsupported
bool supported(Isa isa);
Isa parse_isa(std::string_view name);  // "scalar" | "avx2"

// Span conveniences over the active table.
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}
inline double sum_squares(std::span<const double> a) {
  return active().sum_squares(a.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void scale(double alpha, std::span<double> x) {
  active().scale(alpha, x.data(), x.size());
}
inline void sqrt_ratio_update(std::span<double> x, std::span<const double> num,
                              std::span<const double> den, double floor) {
  active().sqrt_ratio_update(x.data(), num.data(), den.data(), floor, x.size());
}

}  // namespace imufs::kernels
