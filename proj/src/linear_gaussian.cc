// src/linear_gaussian.cc

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

#include "nda/linear_gaussian.h"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace nda {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void CheckShapes(const Vector &epsilon, const RowMatrix &y) {
  if (y.rows() < 1) throw InputError("marginal needs at least one vector");
  if (y.cols() != epsilon.size())
    throw InputError("vector dimension " + std::to_string(y.cols()) +
                     " does not match model dimension " +
                     std::to_string(epsilon.size()));
  if (!y.allFinite()) throw InputError("non-finite input vector");
}

// The speaker-dependent part of one dimension's log marginal: everything
// except -n/2 log 2pi - 1/2 sum y^2.
inline double Evidence(double eps, double sum, double n) {
  const double denom = 1.0 + n * eps;
  return -0.5 * std::log1p(n * eps) + 0.5 * eps * sum * sum / denom;
}

}  // namespace

double LatentLogMarginal(const Vector &epsilon, const Vector &sum,
                         const Vector &sum_sq, std::size_t n) {
  const double nn = static_cast<double>(n);
  double total = -0.5 * nn * kLog2Pi * static_cast<double>(epsilon.size());
  for (Eigen::Index j = 0; j < epsilon.size(); ++j)
    total += Evidence(epsilon(j), sum(j), nn) - 0.5 * sum_sq(j);
  return total;
}

double LatentLogMarginal(const Vector &epsilon, const RowMatrix &y) {
  CheckShapes(epsilon, y);
  Vector sum = y.colwise().sum().transpose();
  Vector sum_sq = y.array().square().colwise().sum().transpose();
  return LatentLogMarginal(epsilon, sum, sum_sq, static_cast<std::size_t>(y.rows()));
}

double LatentLogMarginalGrad(const Vector &epsilon, const RowMatrix &y,
                             RowMatrix *grad_y, Vector *grad_eps) {
  CheckShapes(epsilon, y);
  const double n = static_cast<double>(y.rows());
  Vector sum = y.colwise().sum().transpose();
  Vector sum_sq = y.array().square().colwise().sum().transpose();
  if (grad_y != nullptr) {
    // d/dy_ij = -(y_ij - eps_j S_j / (1 + n eps_j))
    Eigen::RowVectorXd shrunk(epsilon.size());
    for (Eigen::Index j = 0; j < epsilon.size(); ++j)
      shrunk(j) = epsilon(j) * sum(j) / (1.0 + n * epsilon(j));
    *grad_y = (-y).rowwise() + shrunk;
  }
  if (grad_eps != nullptr) {
    grad_eps->resize(epsilon.size());
    for (Eigen::Index j = 0; j < epsilon.size(); ++j) {
      const double denom = 1.0 + n * epsilon(j);
      (*grad_eps)(j) = -0.5 * n / denom + 0.5 * sum(j) * sum(j) / (denom * denom);
    }
  }
  return LatentLogMarginal(epsilon, sum, sum_sq, static_cast<std::size_t>(y.rows()));
}

double LatentLogLikelihoodRatio(const Vector &epsilon, const RowMatrix &enroll,
                                std::span<const double> test,
                                std::span<const std::size_t> dims) {
  CheckShapes(epsilon, enroll);
  if (test.size() != static_cast<std::size_t>(epsilon.size()))
    throw InputError("test vector dimension does not match model dimension");
  const double n = static_cast<double>(enroll.rows());
  double total = 0.0;
  for (std::size_t j : dims) {
    const auto col = static_cast<Eigen::Index>(j);
    const double t = test[j];
    if (!std::isfinite(t)) throw InputError("non-finite test vector");
    const double s = enroll.col(col).sum();
    const double eps = epsilon(col);
    total += Evidence(eps, s + t, n + 1.0) - Evidence(eps, t, 1.0) -
             Evidence(eps, s, n);
  }
  return total;
}

double LatentLogLikelihoodRatio(const Vector &epsilon, const RowMatrix &enroll,
                                std::span<const double> test) {
  std::vector<std::size_t> all(static_cast<std::size_t>(epsilon.size()));
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return LatentLogLikelihoodRatio(epsilon, enroll, test, all);
}

}  // namespace nda
