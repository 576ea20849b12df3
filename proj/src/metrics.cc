// src/metrics.cc

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

#include "nda/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace nda {

std::size_t ScoreSet::num_targets() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
}

std::size_t ScoreSet::num_nontargets() const { return labels.size() - num_targets(); }

void ScoreSet::Validate() const {
  if (scores.size() != labels.size())
    throw InputError("score and label counts differ");
  for (double s : scores)
    if (!std::isfinite(s)) throw InputError("non-finite score");
  if (num_targets() == 0) throw InputError("no target trials");
  if (num_nontargets() == 0) throw InputError("no nontarget trials");
}

std::vector<OperatingPoint> OperatingPoints(const ScoreSet &s) {
  s.Validate();
  std::vector<std::size_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.scores[a] < s.scores[b]; });
  const double n_tar = static_cast<double>(s.num_targets());
  const double n_non = static_cast<double>(s.num_nontargets());

  std::vector<OperatingPoint> points;
  std::size_t below_tar = 0, below_non = 0;  // counts with score < threshold
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = s.scores[order[i]];
    points.push_back({t, below_tar / n_tar, (n_non - below_non) / n_non});
    for (; i < order.size() && s.scores[order[i]] == t; ++i)
      (s.labels[order[i]] ? below_tar : below_non)++;
  }
  points.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0});
  points.front().threshold = -std::numeric_limits<double>::infinity();
  return points;
}

double ComputeEer(const ScoreSet &s) {
  auto points = OperatingPoints(s);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto &b = points[i];
    if (b.p_miss < b.p_fa) continue;
    if (i == 0) return 0.5 * (b.p_miss + b.p_fa);
    const auto &a = points[i - 1];
    // d = p_miss - p_fa goes from negative (a) to non-negative (b)
    const double da = a.p_miss - a.p_fa;
    const double db = b.p_miss - b.p_fa;
    const double alpha = -da / (db - da);
    return a.p_miss + alpha * (b.p_miss - a.p_miss);
  }
  return 1.0;  // unreachable: the +inf point has p_miss = 1, p_fa = 0
}

double ComputeMinDcf(const ScoreSet &s, double p_tar) {
  if (!(p_tar > 0.0 && p_tar < 1.0)) throw InputError("p_tar must lie in (0, 1)");
  double best = std::numeric_limits<double>::infinity();
  for (const auto &p : OperatingPoints(s))
    best = std::min(best, p_tar * p.p_miss + (1.0 - p_tar) * p.p_fa);
  return best / std::min(p_tar, 1.0 - p_tar);
}

double NormalizedDcfAtEer(const ScoreSet &s, double p_tar) {
  if (!(p_tar > 0.0 && p_tar < 1.0)) throw InputError("p_tar must lie in (0, 1)");
  auto points = OperatingPoints(s);
  const auto &best = *std::min_element(points.begin(), points.end(), [](auto &a, auto &b) {
    return std::abs(a.p_miss - a.p_fa) < std::abs(b.p_miss - b.p_fa);
  });
  return (p_tar * best.p_miss + (1.0 - p_tar) * best.p_fa) / std::min(p_tar, 1.0 - p_tar);
}

std::size_t AverageMoments(const RowMatrix &x, MomentPair *out) {
  *out = {};
  std::size_t used = 0, skipped = 0;
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto col = x.col(j);
    const double mean = col.mean();
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double d = col(i) - mean;
      const double d2 = d * d;
      m2 += d2;
      m3 += d2 * d;
      m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // relative floor: a constant column leaves only rounding noise in m2
    const double scale = std::max(1.0, mean * mean);
    if (x.rows() < 2 || !(m2 > 1e-24 * scale)) {
      ++skipped;
      continue;
    }
    out->skew += m3 / std::pow(m2, 1.5);
    out->kurt += m4 / (m2 * m2) - 3.0;
    ++used;
  }
  if (used > 0) {
    out->skew /= static_cast<double>(used);
    out->kurt /= static_cast<double>(used);
  }
  return skipped;
}

GaussReport GaussianalityReport(const EmbeddingSet &set) {
  const auto groups = set.GroupBySpeaker();
  if (groups.size() < 2) throw InputError("Gaussianality report needs >= 2 speakers");
  std::size_t multi = 0;
  for (const auto &g : groups) multi += g.size() >= 2 ? 1 : 0;
  if (multi < 2)
    throw InputError("Gaussianality report needs >= 2 speakers with >= 2 utterances");

  RowMatrix all = set.AllRows();
  RowMatrix residuals(all.rows(), all.cols());
  RowMatrix means(static_cast<Eigen::Index>(groups.size()), all.cols());
  Eigen::Index at = 0;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    RowMatrix x = set.Rows(groups[k]);
    Eigen::RowVectorXd m = x.colwise().mean();
    means.row(static_cast<Eigen::Index>(k)) = m;
    residuals.middleRows(at, x.rows()) = x.rowwise() - m;
    at += x.rows();
  }
  GaussReport report;
  report.skipped_marginal = AverageMoments(all, &report.marginal);
  report.skipped_conditional = AverageMoments(residuals, &report.conditional);
  report.skipped_prior = AverageMoments(means, &report.prior);
  const auto dim = set.dim();
  if (report.skipped_marginal == dim || report.skipped_conditional == dim ||
      report.skipped_prior == dim)
    throw InputError("every dimension has zero variance; skewness and kurtosis are undefined");
  return report;
}

std::string ReportToJson(const GaussReport &r, int indent) {
  auto pair = [](const MomentPair &p) { return nlohmann::json{{"skew", p.skew}, {"kurt", p.kurt}}; };
  nlohmann::json j{{"marginal", pair(r.marginal)},
                   {"conditional", pair(r.conditional)},
                   {"prior", pair(r.prior)},
                   {"aggregation", "mean over dimensions"},
                   {"skipped_dims",
                    {{"marginal", r.skipped_marginal},
                     {"conditional", r.skipped_conditional},
                     {"prior", r.skipped_prior}}}};
  return j.dump(indent);
}

}  // namespace nda
