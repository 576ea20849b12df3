// src/scatter.cc

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

#include "nda/scatter.h"

#include <string>

namespace nda {

ScatterStats ComputeScatter(const EmbeddingSet &set) {
  const auto groups = set.GroupBySpeaker();
  const auto dim = static_cast<Eigen::Index>(set.dim());
  for (const auto &r : set.records())
    if (r.speaker_id.empty())
      throw InputError("utterance '" + r.utt_id + "' has no speaker label");
  if (groups.size() < 2)
    throw InputError("scatter statistics need at least 2 speakers, got " +
                     std::to_string(groups.size()));
  if (set.size() <= groups.size())
    throw InputError("within-class scatter needs a speaker with >= 2 utterances");

  ScatterStats stats;
  stats.num_vectors = set.size();
  stats.num_classes = groups.size();
  stats.mean = Vector::Zero(dim);
  stats.within = Matrix::Zero(dim, dim);
  Matrix class_means(static_cast<Eigen::Index>(groups.size()), dim);

  for (std::size_t k = 0; k < groups.size(); ++k) {
    RowMatrix x = set.Rows(groups[k]);
    Eigen::RowVectorXd m = x.colwise().mean();
    class_means.row(static_cast<Eigen::Index>(k)) = m;
    stats.mean += x.colwise().sum().transpose();
    RowMatrix centered = x.rowwise() - m;
    stats.within.noalias() += centered.transpose() * centered;
  }
  stats.mean /= static_cast<double>(set.size());
  stats.within /= static_cast<double>(set.size() - groups.size());

  Eigen::RowVectorXd mean_of_means = class_means.colwise().mean();
  Matrix centered_means = class_means.rowwise() - mean_of_means;
  stats.between = centered_means.transpose() * centered_means /
                  static_cast<double>(groups.size() - 1);
  return stats;
}

Matrix WhiteningTransform(const Matrix &within, const char *remedy) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(within);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the within-class scatter failed");
  const Vector &values = eig.eigenvalues();  // ascending
  const double largest = values(values.size() - 1);
  if (!(largest > 0.0) || values(0) <= 1e-12 * largest)
    throw NumericalError(std::string("within-class scatter is singular; ") + remedy);
  return values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace nda
