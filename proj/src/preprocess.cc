// src/preprocess.cc

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

#include "nda/preprocess.h"

#include <cmath>
#include <string>

#include "nda/scatter.h"

namespace nda {

EmbeddingSet LengthNormalize(const EmbeddingSet &set) {
  RowMatrix x = set.AllRows();
  const double target = std::sqrt(static_cast<double>(set.dim()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double norm = x.row(r).norm();
    if (norm == 0.0)
      throw InputError("cannot length-normalize zero vector '" +
                       set[static_cast<std::size_t>(r)].utt_id + "'");
    x.row(r) *= target / norm;
  }
  return set.WithVectors(x);
}

namespace {

struct GeneralizedEig {
  Vector mean;
  Vector values;  // descending
  Matrix vectors; // rows are W-orthonormal eigenvectors, same order
  std::size_t num_classes;
};

GeneralizedEig SolveLda(const EmbeddingSet &train) {
  ScatterStats stats = ComputeScatter(train);
  Matrix to_white = WhiteningTransform(stats.within, "reduce the dimension first");
  Matrix b_white = to_white * stats.between * to_white.transpose();
  b_white = 0.5 * (b_white + b_white.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b_white);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the between-class scatter failed");
  const auto n = b_white.rows();
  GeneralizedEig out;
  out.mean = stats.mean;
  out.num_classes = stats.num_classes;
  out.values.resize(n);
  out.vectors.resize(n, n);
  Matrix rows = eig.eigenvectors().transpose() * to_white;
  // SelfAdjointEigenSolver sorts ascending; reverse for descending lambda
  for (Eigen::Index r = 0; r < n; ++r) {
    out.values(r) = eig.eigenvalues()(n - 1 - r);
    out.vectors.row(r) = rows.row(n - 1 - r);
  }
  return out;
}

}  // namespace

Vector LdaEigenvalues(const EmbeddingSet &train) { return SolveLda(train).values; }

LdaTransform FitLda(const EmbeddingSet &train, std::size_t out_dim) {
  if (out_dim < 1 || out_dim > train.dim())
    throw InputError("LDA output dimension " + std::to_string(out_dim) +
                     " must be in [1, " + std::to_string(train.dim()) + "]");
  GeneralizedEig eig = SolveLda(train);
  if (out_dim > eig.num_classes - 1)
    throw InputError("LDA output dimension " + std::to_string(out_dim) +
                     " exceeds speakers - 1 = " + std::to_string(eig.num_classes - 1));
  return {eig.mean, eig.vectors.topRows(static_cast<Eigen::Index>(out_dim))};
}

EmbeddingSet ApplyLda(const LdaTransform &lda, const EmbeddingSet &set) {
  if (set.dim() != lda.in_dim())
    throw InputError("set dimension " + std::to_string(set.dim()) +
                     " does not match LDA input dimension " + std::to_string(lda.in_dim()));
  RowMatrix y = (set.AllRows().rowwise() - lda.mean.transpose()) * lda.projection.transpose();
  return set.WithVectors(y);
}

std::size_t Pipeline::in_dim() const {
  if (lda) return lda->in_dim();
  return static_cast<std::size_t>(center_mean.size());
}

std::size_t Pipeline::out_dim() const {
  if (lda) return lda->out_dim();
  return in_dim();
}

Pipeline Pipeline::Fit(const EmbeddingSet &train, const PipelineConfig &config) {
  Pipeline p;
  p.config = config;
  EmbeddingSet current = train;
  if (config.center) {
    p.center_mean = train.AllRows().colwise().mean().transpose();
    current = current.WithVectors(current.AllRows().rowwise() - p.center_mean.transpose());
  } else {
    p.center_mean = Vector::Zero(static_cast<Eigen::Index>(train.dim()));
  }
  if (config.length_norm) current = LengthNormalize(current);
  if (config.lda_dim != 0) p.lda = FitLda(current, config.lda_dim);
  return p;
}

EmbeddingSet Pipeline::Apply(const EmbeddingSet &set) const {
  if (set.dim() != in_dim())
    throw InputError("set dimension " + std::to_string(set.dim()) +
                     " does not match pipeline input dimension " + std::to_string(in_dim()));
  EmbeddingSet current = set;
  if (config.center)
    current = current.WithVectors(current.AllRows().rowwise() - center_mean.transpose());
  if (config.length_norm) current = LengthNormalize(current);
  if (lda) {
    current = ApplyLda(*lda, current);
    if (config.length_norm_after_lda) current = LengthNormalize(current);
  }
  return current;
}

}  // namespace nda
