// nda/linear_gaussian.h

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

#ifndef NDA_LINEAR_GAUSSIAN_H_
#define NDA_LINEAR_GAUSSIAN_H_

#include <span>

#include "nda/types.h"

namespace nda {

// Closed forms for the diagonal linear-Gaussian model shared by PLDA, NDA
// and the synthetic oracle:
//
//   mu ~ N(0, diag(eps)),   y_i | mu ~ N(mu, I),   i = 1..n.
//
// Per dimension j the n samples are jointly Gaussian with covariance
// eps_j * 11^T + I, whose determinant is 1 + n eps_j and whose inverse is
// I - eps_j / (1 + n eps_j) 11^T. Hence, with S_j = sum_i y_ij,
//
//   log p = -n/2 log(2 pi) - 1/2 log(1 + n eps_j)
//           - 1/2 (sum_i y_ij^2 - eps_j S_j^2 / (1 + n eps_j)).
//
// All functions take epsilon >= 0 (zero allowed: a dimension without
// speaker information).

// Exact, normalized log p(y_1..y_n); y is n x dim, n >= 1.
double LatentLogMarginal(const Vector &epsilon, const RowMatrix &y);

// Same from sufficient statistics (per-dimension sums and sum of squares).
double LatentLogMarginal(const Vector &epsilon, const Vector &sum,
                         const Vector &sum_sq, std::size_t n);

// Log-marginal plus its gradient with respect to every y_ij (n x dim, written
// into grad_y) and every eps_j (written into grad_eps). Either output may be
// null.
double LatentLogMarginalGrad(const Vector &epsilon, const RowMatrix &y,
                             RowMatrix *grad_y, Vector *grad_eps);

// log p(test, enroll) - log p(test) - log p(enroll). The sum-of-squares and
// 2 pi terms cancel analytically and are never formed, so eps = 0 scores
// exactly 0.
double LatentLogLikelihoodRatio(const Vector &epsilon, const RowMatrix &enroll,
                                std::span<const double> test);

// Restricted to the listed dimensions (used after truncation).
double LatentLogLikelihoodRatio(const Vector &epsilon, const RowMatrix &enroll,
                                std::span<const double> test,
                                std::span<const std::size_t> dims);

}  // namespace nda

#endif  // NDA_LINEAR_GAUSSIAN_H_
