// nda/scatter.h

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

#ifndef NDA_SCATTER_H_
#define NDA_SCATTER_H_

#include "nda/types.h"
#include "nda/vecstore.h"

namespace nda {

// Two-covariance statistics of a labeled set.
struct ScatterStats {
  Vector mean;     // global mean over all vectors
  Matrix within;   // pooled within-class covariance, denominator N - K
  Matrix between;  // covariance of class means, denominator K - 1
  std::size_t num_vectors = 0;
  std::size_t num_classes = 0;
};

// Needs >= 2 classes and N > K. Single-utterance classes enter the between
// scatter through their mean and add nothing to the within scatter or its
// degrees of freedom.
ScatterStats ComputeScatter(const EmbeddingSet &set);

// Symmetric T with T W T^T = I, from the eigendecomposition of W. Throws
// NumericalError when W is singular to working precision.
Matrix WhiteningTransform(const Matrix &within, const char *remedy);

}  // namespace nda

#endif  // NDA_SCATTER_H_
