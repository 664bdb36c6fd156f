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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "imufs/kernels.hpp"

namespace imufs::kernels {

#if defined(IMUFS_HAVE_AVX2_TU)
const KernelTable& avx2_kernels();  // kernels_avx2.cpp
#endif

namespace {

bool CpuHasAvx2() {
#if defined(IMUFS_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* Select() {
  const char* env = std::getenv("IMUFS_SIMD");
  if (env != nullptr && std::string(env) != "auto" && *env != '\0') {
    const Isa want = parse_isa(env);
    if (want == Isa::kScalar) return &scalar_table();
    if (avx2_table() == nullptr) {
      throw std::runtime_error("IMUFS_SIMD=avx2 but AVX2 is unavailable");
    }
    return avx2_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& Slot() {
  static std::atomic<const KernelTable*> slot{Select()};
  return slot;
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(IMUFS_HAVE_AVX2_TU)
  static const bool ok = CpuHasAvx2();
  return ok ? &avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

bool supported(Isa isa) {
  return isa == Isa::kScalar || avx2_table() != nullptr;
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  throw std::invalid_argument("unknown SIMD variant: " + std::string(name));
}

const KernelTable& active() { return *Slot().load(std::memory_order_acquire); }

void set_active(Isa isa) {
  if (isa == Isa::kScalar) {
    Slot().store(&scalar_table(), std::memory_order_release);
    return;
  }
  const KernelTable* t = avx2_table();
  if (t == nullptr) throw std::runtime_error("AVX2 kernels unavailable");
  Slot().store(t, std::memory_order_release);
}

}  // namespace imufs::kernels
