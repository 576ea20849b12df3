// src/kernels/kernels_scalar.cc

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

#include "nda/kernels.h"

namespace nda::kernels {
namespace {

double DotScalar(const double *a, const double *b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void AxpyScalar(double alpha, const double *x, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void GemvScalar(const double *w, const double *x, const double *b,
                double *out, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = DotScalar(w + r * cols, x, cols);
    out[r] = b != nullptr ? acc + b[r] : acc;
  }
}

void GemvTAccScalar(const double *w, const double *g, double *out,
                    std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r)
    AxpyScalar(g[r], w + r * cols, out, cols);
}

void GerAccScalar(const double *g, const double *x, double *w_grad,
                  std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r)
    AxpyScalar(g[r], x, w_grad + r * cols, cols);
}

double SumSqScalar(const double *x, std::size_t n) {
  return DotScalar(x, x, n);
}

}  // namespace

namespace detail {
const KernelTable &ScalarTable() {
  static const KernelTable table{Isa::kScalar, DotScalar,      AxpyScalar,
                                 GemvScalar,   GemvTAccScalar, GerAccScalar,
                                 SumSqScalar};
  return table;
}
}  // namespace detail

}  // namespace nda::kernels
