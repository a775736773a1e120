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

// Inner-loop kernels for the dense ops.
//
// Every kernel has a scalar reference implementation. ISA-specific variants
// (currently AVX2+FMA) are compiled into the same binary and picked at
// startup from CPUID; set CGG_ISA=scalar in the environment, or call
// set_isa(), to force the reference path. Variants agree with the reference to
// within floating-point reassociation error; a given ISA is deterministic
// run to run.

#pragma once

#include <cstddef>
#include <string_view>

namespace cgg::num::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();
/// Null when the variant was not compiled for this target.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);
Isa active_isa();
/// Throws UsageError if the CPU lacks `isa`.
void set_isa(Isa isa);
const KernelTable& active_kernels();

inline double dot(const double* x, const double* y, std::size_t n) {
  return active_kernels().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active_kernels().axpy(a, x, y, n);
}

// Row-major GEMM accumulating into C (C += op(A) op(B)), built on the table.
//   gemm_nn: C[m,n] += A[m,k]   * B[k,n]
//   gemm_nt: C[m,n] += A[m,k]   * B[n,k]^T
//   gemm_tn: C[m,n] += A[k,m]^T * B[k,n]
void gemm_nn(const KernelTable& kt, std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c);
void gemm_nt(const KernelTable& kt, std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c);
void gemm_tn(const KernelTable& kt, std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c);

inline void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  gemm_nn(active_kernels(), m, n, k, a, b, c);
}
inline void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  gemm_nt(active_kernels(), m, n, k, a, b, c);
}
inline void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  gemm_tn(active_kernels(), m, n, k, a, b, c);
}

}  // namespace cgg::num::kernels
