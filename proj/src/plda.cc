// src/plda.cc

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

#include "nda/plda.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nda/linear_gaussian.h"
#include "nda/scatter.h"

namespace nda {

RowMatrix PldaModel::Transform(const RowMatrix &x) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim())
    throw InputError("vector dimension " + std::to_string(x.cols()) +
                     " does not match PLDA input dimension " +
                     std::to_string(input_dim()));
  return (x.rowwise() - mean.transpose()) * whiten.transpose();
}

Vector PldaModel::Transform(std::span<const double> x) const {
  if (x.size() != input_dim())
    throw InputError("vector dimension " + std::to_string(x.size()) +
                     " does not match PLDA input dimension " +
                     std::to_string(input_dim()));
  Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  return whiten * (xv - mean);
}

void PldaModel::Validate() const {
  if (epsilon.size() == 0) throw InputError("PLDA model has dimension 0");
  if (whiten.rows() != epsilon.size() || whiten.cols() != mean.size())
    throw InputError("PLDA model shapes are inconsistent");
  if (!whiten.allFinite() || !mean.allFinite() || !epsilon.allFinite())
    throw InputError("PLDA model has non-finite entries");
  for (Eigen::Index j = 0; j < epsilon.size(); ++j) {
    if (epsilon(j) < 0.0) throw InputError("PLDA epsilon must be >= 0");
    if (j > 0 && epsilon(j) > epsilon(j - 1))
      throw InputError("PLDA epsilon must be sorted in descending order");
  }
}

PldaModel FitPlda(const EmbeddingSet &train) {
  ScatterStats stats = ComputeScatter(train);
  Matrix to_white = WhiteningTransform(
      stats.within, "reduce the dimension (LDA or truncation) or add data");
  Matrix b_white = to_white * stats.between * to_white.transpose();
  b_white = 0.5 * (b_white + b_white.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b_white);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the between-class scatter failed");

  const auto dim = b_white.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return eig.eigenvalues()(a) > eig.eigenvalues()(b);
  });

  PldaModel model;
  model.mean = stats.mean;
  model.epsilon.resize(dim);
  model.whiten.resize(dim, dim);
  Matrix rotated = eig.eigenvectors().transpose() * to_white;
  for (Eigen::Index r = 0; r < dim; ++r) {
    const Eigen::Index src = order[static_cast<std::size_t>(r)];
    model.epsilon(r) = std::max(0.0, eig.eigenvalues()(src));
    model.whiten.row(r) = rotated.row(src);
  }
  model.Validate();
  return model;
}

double MarginalLogDensity(const PldaModel &model, const RowMatrix &x) {
  if (x.rows() < 1) throw InputError("marginal needs at least one vector");
  if (!x.allFinite()) throw InputError("non-finite input vector");
  return LatentLogMarginal(model.epsilon, model.Transform(x));
}

double ScoreTrial(const PldaModel &model, const RowMatrix &enroll,
                  std::span<const double> test) {
  if (enroll.rows() < 1) throw InputError("trial needs at least one enrollment vector");
  if (!enroll.allFinite()) throw InputError("non-finite enrollment vector");
  RowMatrix y_enroll = model.Transform(enroll);
  Vector y_test = model.Transform(test);
  return LatentLogLikelihoodRatio(model.epsilon, y_enroll,
                                  std::span<const double>(y_test.data(),
                                                          static_cast<std::size_t>(y_test.size())));
}

PldaModel TruncateDims(const PldaModel &model, std::size_t keep) {
  if (keep < 1 || keep > model.dim())
    throw InputError("truncation keeps " + std::to_string(keep) +
                     " dimensions; must be in [1, " + std::to_string(model.dim()) + "]");
  // epsilon is sorted, so the leading rows are the most discriminative
  PldaModel out;
  const auto k = static_cast<Eigen::Index>(keep);
  out.mean = model.mean;
  out.whiten = model.whiten.topRows(k);
  out.epsilon = model.epsilon.head(k);
  return out;
}

}  // namespace nda
