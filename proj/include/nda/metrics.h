// nda/metrics.h

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

#ifndef NDA_METRICS_H_
#define NDA_METRICS_H_

#include <string>
#include <vector>

#include "nda/vecstore.h"

namespace nda {

struct ScoreSet {
  std::vector<double> scores;
  std::vector<bool> labels;  // true = target

  std::size_t num_targets() const;
  std::size_t num_nontargets() const;
  // Equal lengths, finite scores, both classes present.
  void Validate() const;
};

// Operating point for the decision rule "accept iff score >= threshold".
struct OperatingPoint {
  double threshold;  // -inf and +inf for accept-all / reject-all
  double p_miss;
  double p_fa;
};

// One point per distinct score plus +inf, in increasing threshold order;
// the first point (lowest score) is the accept-all point.
std::vector<OperatingPoint> OperatingPoints(const ScoreSet &s);

// Crossing of P_miss and P_fa, linearly interpolated between adjacent
// operating points.
double ComputeEer(const ScoreSet &s);

// min_t [p_tar P_miss(t) + (1 - p_tar) P_fa(t)] / min(p_tar, 1 - p_tar).
double ComputeMinDcf(const ScoreSet &s, double p_tar);

// Normalized cost at the threshold closest to the EER crossing.
double NormalizedDcfAtEer(const ScoreSet &s, double p_tar);

struct MomentPair {
  double skew = 0.0;
  double kurt = 0.0;  // excess
};

struct GaussReport {
  MomentPair marginal;
  MomentPair conditional;
  MomentPair prior;
  // Dimensions left out of each average because their variance was zero.
  std::size_t skipped_marginal = 0;
  std::size_t skipped_conditional = 0;
  std::size_t skipped_prior = 0;
};

// Per-dimension skewness m3 / m2^{3/2} and excess kurtosis m4 / m2^2 - 3
// (biased moments), averaged over dimensions, for the pooled vectors
// (marginal), the residuals about each speaker's mean (conditional) and the
// speaker means (prior).
GaussReport GaussianalityReport(const EmbeddingSet &set);

// Column-wise statistics of a matrix; returns the number of skipped columns.
std::size_t AverageMoments(const RowMatrix &x, MomentPair *out);

std::string ReportToJson(const GaussReport &report, int indent = 2);

}  // namespace nda

#endif  // NDA_METRICS_H_
