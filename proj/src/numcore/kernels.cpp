// Copyright 2026 The cgg Authors.
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

#include "cgg/numcore/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "cgg/core/error.hpp"

namespace cgg::num::kernels {

namespace {

const KernelTable* table_for(Isa isa) {
  return isa == Isa::kAvx2 ? avx2_kernels() : &scalar_kernels();
}

Isa detect_default() {
  if (const char* env = std::getenv("CGG_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::kScalar;
    if (v == "avx2" && cpu_supports(Isa::kAvx2)) return Isa::kAvx2;
  }
  return cpu_supports(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<int>& isa_slot() {
  static std::atomic<int> slot{static_cast<int>(detect_default())};
  return slot;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool cpu_supports(Isa isa) {
  if (isa == Isa::kScalar) return true;
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2_kernels() == nullptr) return false;
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return static_cast<Isa>(isa_slot().load(std::memory_order_relaxed)); }

void set_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw UsageError("CPU does not support kernel ISA " + std::string(to_string(isa)));
  }
  isa_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const KernelTable& active_kernels() { return *table_for(active_isa()); }

void gemm_nn(const KernelTable& kt, std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      if (ai[p] != 0.0) kt.axpy(ai[p], b + p * n, ci, n);
    }
  }
}

void gemm_nt(const KernelTable& kt, std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += kt.dot(ai, b + j * k, k);
  }
}

void gemm_tn(const KernelTable& kt, std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      if (ap[i] != 0.0) kt.axpy(ap[i], bp, c + i * n, n);
    }
  }
}

}  // namespace cgg::num::kernels
