// nda/kernels.h

// Copyright 2026  The nda-backend Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef NDA_KERNELS_H_
#define NDA_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

// Dense f64 inner loops used by the coupling networks and the latent-space
// algebra. Every routine has a portable scalar reference and, where the
// build target allows it, an AVX2+FMA (x86-64) or NEON (aarch64) variant.
// The variant is picked once at first use from the CPU's feature bits; the
// environment variable NDA_KERNELS=scalar|avx2|neon overrides the choice.
//
// All variants use a fixed reduction order for a given ISA, so results are
// bit-reproducible on one machine. Across ISAs they agree to rounding only.

namespace nda::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);

// Matrices are row-major, rows x cols, contiguous.
struct KernelTable {
  Isa isa;
  double (*dot)(const double *a, const double *b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double *x, double *y, std::size_t n);
  // out = W x + b   (b may be null)
  void (*gemv)(const double *w, const double *x, const double *b,
               double *out, std::size_t rows, std::size_t cols);
  // out += W^T g
  void (*gemv_t_acc)(const double *w, const double *g, double *out,
                     std::size_t rows, std::size_t cols);
  // W_grad += g x^T
  void (*ger_acc)(const double *g, const double *x, double *w_grad,
                  std::size_t rows, std::size_t cols);
  // sum_i x_i^2
  double (*sum_sq)(const double *x, std::size_t n);
};

bool IsaSupported(Isa isa);

// Throws std::invalid_argument if the ISA is not compiled in or not
// supported by the running CPU.
const KernelTable &Table(Isa isa);

// The table selected for this process.
const KernelTable &Active();

// Test hook: force a variant for the remainder of the process.
void SetActive(Isa isa);

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}

inline void Axpy(double alpha, std::span<const double> x,
                 std::span<double> y) {
  Active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double SumSq(std::span<const double> x) {
  return Active().sum_sq(x.data(), x.size());
}

namespace detail {
const KernelTable &ScalarTable();
#if defined(NDA_HAVE_AVX2)
const KernelTable &Avx2Table();
#endif
#if defined(NDA_HAVE_NEON)
const KernelTable &NeonTable();
#endif
}  // namespace detail

}  // namespace nda::kernels

#endif  // NDA_KERNELS_H_
