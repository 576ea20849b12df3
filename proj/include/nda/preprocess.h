// nda/preprocess.h

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

#ifndef NDA_PREPROCESS_H_
#define NDA_PREPROCESS_H_

#include <optional>

#include "nda/types.h"
#include "nda/vecstore.h"

namespace nda {

// Scales every vector to Euclidean norm sqrt(dim). Zero vectors are an error.
EmbeddingSet LengthNormalize(const EmbeddingSet &set);

struct LdaTransform {
  Vector mean;        // in_dim
  Matrix projection;  // out_dim x in_dim

  std::size_t in_dim() const { return static_cast<std::size_t>(projection.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(projection.rows()); }
};

// Rows are the top generalized eigenvectors of B v = lambda W v, in
// descending lambda, scaled so that v^T W v = 1. out_dim must not exceed
// min(in_dim, K - 1).
LdaTransform FitLda(const EmbeddingSet &train, std::size_t out_dim);

// Generalized eigenvalues (descending) for all in_dim directions; exposed for
// diagnostics and tests.
Vector LdaEigenvalues(const EmbeddingSet &train);

EmbeddingSet ApplyLda(const LdaTransform &lda, const EmbeddingSet &set);

// Front-end chain applied before PLDA or NDA:
//   [center] -> [length-norm] -> [LDA] -> [length-norm after LDA].
struct PipelineConfig {
  bool center = true;
  bool length_norm = false;
  std::size_t lda_dim = 0;  // 0 disables LDA
  bool length_norm_after_lda = false;
};

struct Pipeline {
  PipelineConfig config;
  Vector center_mean;  // empty unless config.center
  std::optional<LdaTransform> lda;

  std::size_t in_dim() const;
  std::size_t out_dim() const;

  static Pipeline Fit(const EmbeddingSet &train, const PipelineConfig &config);
  EmbeddingSet Apply(const EmbeddingSet &set) const;
};

}  // namespace nda

#endif  // NDA_PREPROCESS_H_
