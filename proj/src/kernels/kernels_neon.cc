// src/kernels/kernels_neon.cc

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

#include <arm_neon.h>

#include "nda/kernels.h"

namespace nda::kernels {
namespace {

double DotNeon(const double *a, const double *b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void AxpyNeon(double alpha, const double *x, double *y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void GemvNeon(const double *w, const double *x, const double *b, double *out,
              std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = DotNeon(w + r * cols, x, cols);
    out[r] = b != nullptr ? acc + b[r] : acc;
  }
}

void GemvTAccNeon(const double *w, const double *g, double *out,
                  std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) AxpyNeon(g[r], w + r * cols, out, cols);
}

void GerAccNeon(const double *g, const double *x, double *w_grad,
                std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) AxpyNeon(g[r], x, w_grad + r * cols, cols);
}

double SumSqNeon(const double *x, std::size_t n) { return DotNeon(x, x, n); }

}  // namespace

namespace detail {
const KernelTable &NeonTable() {
  static const KernelTable table{Isa::kNeon, DotNeon,      AxpyNeon,
                                 GemvNeon,   GemvTAccNeon, GerAccNeon,
                                 SumSqNeon};
  return table;
}
}  // namespace detail

}  // namespace nda::kernels
