// nda/plda.h

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

#ifndef NDA_PLDA_H_
#define NDA_PLDA_H_

#include <span>

#include "nda/types.h"
#include "nda/vecstore.h"

namespace nda {

// Two-covariance PLDA in diagonalized form. In y = T (x - m) the within-class
// covariance is I and the between-class covariance is diag(epsilon), with
// epsilon sorted in descending order.
struct PldaModel {
  Vector mean;     // m
  Matrix whiten;   // T, dim x input_dim (rows drop with truncation)
  Vector epsilon;  // >= 0, descending

  std::size_t dim() const { return static_cast<std::size_t>(epsilon.size()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }

  RowMatrix Transform(const RowMatrix &x) const;
  Vector Transform(std::span<const double> x) const;

  // Checks shapes, finiteness, epsilon >= 0 and ordering.
  void Validate() const;
};

// Moment fit: pooled within-class W (denominator N - K), covariance of class
// means B (denominator K - 1), then T = Q^T W^{-1/2} where Q diagonalizes the
// whitened B. Negative eigenvalues are clamped to 0.
PldaModel FitPlda(const EmbeddingSet &train);

// log p(y_1..y_n) for the rows of x after the model transform, exact and
// normalized in the transformed space.
double MarginalLogDensity(const PldaModel &model, const RowMatrix &x);

// Log likelihood ratio of "test shares the enrollment speaker" against
// "test is from a new speaker".
double ScoreTrial(const PldaModel &model, const RowMatrix &enroll,
                  std::span<const double> test);

// Keeps the `keep` dimensions with the largest epsilon.
PldaModel TruncateDims(const PldaModel &model, std::size_t keep);

}  // namespace nda

#endif  // NDA_PLDA_H_
