// tests/unit/test_linear_gaussian.cc

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

#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"
#include "nda/linear_gaussian.h"
#include "nda/plda.h"
#include "nda/random.h"

using namespace nda;

namespace {

double AdaptiveSimpson(const std::function<double(double)> &f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return AdaptiveSimpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         AdaptiveSimpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double Integrate(const std::function<double(double)> &f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return AdaptiveSimpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40);
}

double NormalPdf(double x, double mean, double var) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// log of prod_j integral prod_i N(y_ij; mu, 1) N(mu; 0, eps_j) dmu
double QuadratureLogMarginal(const Vector &eps, const RowMatrix &y) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    auto integrand = [&](double mu) {
      double p = NormalPdf(mu, 0.0, eps(j));
      for (Eigen::Index i = 0; i < y.rows(); ++i) p *= NormalPdf(y(i, j), mu, 1.0);
      return p;
    };
    const double width = 12.0 * std::sqrt(eps(j)) + 12.0;
    total += std::log(Integrate(integrand, -width, width, 1e-16));
  }
  return total;
}

Vector Vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("closed-form marginal: standard normal at zero") {
  RowMatrix y = RowMatrix::Zero(1, 1);
  CHECK(LatentLogMarginal(Vec({0.0}), y) == doctest::Approx(-0.918938533204673).epsilon(1e-14));
}

TEST_CASE("closed-form marginal: bivariate case with eps = 1") {
  RowMatrix y(2, 1);
  y << 1.0, -1.0;
  const double want = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(3.0) - 1.0;
  CHECK(LatentLogMarginal(Vec({1.0}), y) == doctest::Approx(want).epsilon(1e-14));
  CHECK(want == doctest::Approx(-3.387182).epsilon(1e-6));
}

TEST_CASE("closed-form marginal matches adaptive quadrature") {
  Rng rng(12);
  for (int c = 0; c < 5; ++c) {
    RowMatrix y(3, 2);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) y(i, j) = 1.5 * rng.Normal();
    const Vector eps = Vec({2.0, 0.5});
    const double got = LatentLogMarginal(eps, y);
    const double want = QuadratureLogMarginal(eps, y);
    CHECK(std::abs(got - want) / std::abs(want) < 1e-6);
  }
}

TEST_CASE("sufficient-statistic overload agrees with the matrix form") {
  Rng rng(2);
  RowMatrix y(4, 3);
  for (auto &v : y.reshaped()) v = rng.Normal();
  const Vector eps = Vec({3.0, 0.2, 0.0});
  const Vector sum = y.colwise().sum().transpose();
  const Vector sum_sq = y.array().square().colwise().sum().transpose();
  CHECK(LatentLogMarginal(eps, sum, sum_sq, 4) ==
        doctest::Approx(LatentLogMarginal(eps, y)).epsilon(1e-14));
}

TEST_CASE("eps = 0 makes the marginal additive over vectors") {
  Rng rng(5);
  RowMatrix y(5, 3);
  for (auto &v : y.reshaped()) v = rng.Normal();
  const Vector eps = Vector::Zero(3);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i) sum += LatentLogMarginal(eps, RowMatrix(y.row(i)));
  CHECK(LatentLogMarginal(eps, y) == doctest::Approx(sum).epsilon(1e-13));
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(8);
  RowMatrix y(4, 3);
  for (auto &v : y.reshaped()) v = rng.Normal();
  const Vector eps = Vec({1.7, 0.4, 0.05});
  RowMatrix gy;
  Vector ge;
  const double value = LatentLogMarginalGrad(eps, y, &gy, &ge);
  CHECK(value == doctest::Approx(LatentLogMarginal(eps, y)).epsilon(1e-14));
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      RowMatrix p = y, m = y;
      p(i, j) += h;
      m(i, j) -= h;
      const double fd = (LatentLogMarginal(eps, p) - LatentLogMarginal(eps, m)) / (2 * h);
      CHECK(gy(i, j) == doctest::Approx(fd).epsilon(1e-6));
    }
  for (Eigen::Index j = 0; j < 3; ++j) {
    Vector p = eps, m = eps;
    p(j) += h;
    m(j) -= h;
    const double fd = (LatentLogMarginal(p, y) - LatentLogMarginal(m, y)) / (2 * h);
    CHECK(ge(j) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("log LR: bivariate oracle value") {
  RowMatrix enroll = RowMatrix::Zero(1, 1);
  const double test[] = {0.0};
  CHECK(LatentLogLikelihoodRatio(Vec({1.0}), enroll, test) ==
        doctest::Approx(-0.5 * std::log(0.75)).epsilon(1e-14));
  CHECK(-0.5 * std::log(0.75) == doctest::Approx(0.143841).epsilon(1e-6));
}

TEST_CASE("log LR: zero eps scores exactly zero, symmetric and exchangeable") {
  Rng rng(9);
  RowMatrix e(3, 4);
  for (auto &v : e.reshaped()) v = rng.Normal();
  Vector t(4);
  for (auto &v : t) v = rng.Normal();
  CHECK(LatentLogLikelihoodRatio(Vector::Zero(4), e, {t.data(), 4}) == 0.0);

  const Vector eps = Vec({2.0, 1.0, 0.3, 0.01});
  RowMatrix a = e.topRows(1);
  RowMatrix b = RowMatrix(t.transpose());
  CHECK(LatentLogLikelihoodRatio(eps, a, {t.data(), 4}) ==
        doctest::Approx(LatentLogLikelihoodRatio(eps, b, {a.data(), 4})).epsilon(1e-12));

  RowMatrix perm(3, 4);
  perm << e.row(2), e.row(0), e.row(1);
  CHECK(LatentLogLikelihoodRatio(eps, e, {t.data(), 4}) ==
        doctest::Approx(LatentLogLikelihoodRatio(eps, perm, {t.data(), 4})).epsilon(1e-13));

  // restricting to all dimensions changes nothing
  const std::size_t all[] = {0, 1, 2, 3};
  CHECK(LatentLogLikelihoodRatio(eps, e, {t.data(), 4}, all) ==
        doctest::Approx(LatentLogLikelihoodRatio(eps, e, {t.data(), 4})).epsilon(1e-14));
}

TEST_CASE("shape errors") {
  RowMatrix y(2, 3);
  y.setZero();
  CHECK_THROWS_AS(LatentLogMarginal(Vector::Ones(2), y), InputError);
  CHECK_THROWS_AS(LatentLogMarginal(Vector::Ones(3), RowMatrix(0, 3)), InputError);
}
