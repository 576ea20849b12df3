// tests/unit/test_kernels.cc

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

#include <vector>

#include "doctest.h"
#include "nda/kernels.h"
#include "nda/random.h"

using namespace nda;
using namespace nda::kernels;

namespace {

std::vector<double> Draw(Rng &rng, std::size_t n) {
  std::vector<double> v(n);
  for (double &x : v) x = rng.Normal();
  return v;
}

double Rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar kernels match hand-computed values") {
  const auto &k = Table(Isa::kScalar);
  const double a[] = {1, 2, 3}, b[] = {4, -5, 6};
  CHECK(k.dot(a, b, 3) == 12.0);
  CHECK(k.sum_sq(a, 3) == 14.0);
  double y[] = {1, 1, 1};
  k.axpy(2.0, a, y, 3);
  CHECK(y[2] == 7.0);
  const double w[] = {1, 2, 3, 4, 5, 6};  // 2 x 3
  const double bias[] = {0.5, -0.5};
  double out[2];
  k.gemv(w, a, bias, out, 2, 3);
  CHECK(out[0] == 14.5);
  CHECK(out[1] == 31.5);
  double acc[3] = {0, 0, 0};
  const double g[] = {1, -1};
  k.gemv_t_acc(w, g, acc, 2, 3);
  CHECK(acc[0] == -3.0);
  double wg[6] = {};
  k.ger_acc(g, a, wg, 2, 3);
  CHECK(wg[4] == -2.0);
}

TEST_CASE("every supported SIMD table agrees with the scalar reference") {
  Rng rng(3);
  const auto &ref = Table(Isa::kScalar);
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!IsaSupported(isa)) continue;
    const auto &simd = Table(isa);
    CAPTURE(IsaName(isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 100u}) {
      auto a = Draw(rng, n), b = Draw(rng, n);
      CHECK(Rel(simd.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)) < 1e-13);
      CHECK(Rel(simd.sum_sq(a.data(), n), ref.sum_sq(a.data(), n)) < 1e-13);
      auto y1 = b, y2 = b;
      simd.axpy(0.7, a.data(), y1.data(), n);
      ref.axpy(0.7, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(Rel(y1[i], y2[i]) < 1e-14);
    }
    for (std::size_t rows : {1u, 3u, 8u, 13u})
      for (std::size_t cols : {1u, 4u, 9u, 16u, 31u}) {
        auto w = Draw(rng, rows * cols), x = Draw(rng, cols), bias = Draw(rng, rows),
             g = Draw(rng, rows);
        std::vector<double> o1(rows), o2(rows);
        simd.gemv(w.data(), x.data(), bias.data(), o1.data(), rows, cols);
        ref.gemv(w.data(), x.data(), bias.data(), o2.data(), rows, cols);
        for (std::size_t i = 0; i < rows; ++i) CHECK(Rel(o1[i], o2[i]) < 1e-13);
        simd.gemv(w.data(), x.data(), nullptr, o1.data(), rows, cols);
        ref.gemv(w.data(), x.data(), nullptr, o2.data(), rows, cols);
        for (std::size_t i = 0; i < rows; ++i) CHECK(Rel(o1[i], o2[i]) < 1e-13);
        std::vector<double> t1(cols, 0.5), t2(cols, 0.5);
        simd.gemv_t_acc(w.data(), g.data(), t1.data(), rows, cols);
        ref.gemv_t_acc(w.data(), g.data(), t2.data(), rows, cols);
        for (std::size_t i = 0; i < cols; ++i) CHECK(Rel(t1[i], t2[i]) < 1e-13);
        std::vector<double> w1(rows * cols, 1.0), w2(rows * cols, 1.0);
        simd.ger_acc(g.data(), x.data(), w1.data(), rows, cols);
        ref.ger_acc(g.data(), x.data(), w2.data(), rows, cols);
        for (std::size_t i = 0; i < rows * cols; ++i) CHECK(Rel(w1[i], w2[i]) < 1e-14);
      }
  }
}

TEST_CASE("dispatch can be switched and rejects unsupported tables") {
  const Isa before = Active().isa;
  SetActive(Isa::kScalar);
  CHECK(Active().isa == Isa::kScalar);
  for (Isa isa : {Isa::kAvx2, Isa::kNeon})
    if (!IsaSupported(isa)) CHECK_THROWS(SetActive(isa));
  SetActive(before);
}
