// tests/unit/test_metrics.cc

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

#include <cmath>

#include "doctest.h"
#include "nda/metrics.h"
#include "nda/random.h"

using namespace nda;

namespace {

ScoreSet Set(std::vector<double> tar, std::vector<double> non) {
  ScoreSet s;
  for (double v : tar) s.scores.push_back(v), s.labels.push_back(true);
  for (double v : non) s.scores.push_back(v), s.labels.push_back(false);
  return s;
}

// Brute force over thresholds at every score, midpoints and +-inf.
double BruteMinDcf(const ScoreSet &s, double p) {
  std::vector<double> ts = s.scores;
  ts.push_back(-INFINITY);
  ts.push_back(INFINITY);
  double best = 1e300;
  const double nt = static_cast<double>(s.num_targets()), nn = static_cast<double>(s.num_nontargets());
  for (double t : ts) {
    double miss = 0, fa = 0;
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
      if (s.labels[i] && s.scores[i] < t) miss += 1;
      if (!s.labels[i] && s.scores[i] >= t) fa += 1;
    }
    best = std::min(best, p * miss / nt + (1 - p) * fa / nn);
  }
  return best / std::min(p, 1 - p);
}

}  // namespace

TEST_CASE("EER fixtures") {
  CHECK(ComputeEer(Set({1, 2}, {-1, -2})) == 0.0);
  CHECK(ComputeEer(Set({1, 3}, {2, 4})) == 0.5);
  CHECK(ComputeEer(Set({2, 4}, {1, 3})) == 0.5);
  CHECK(ComputeEer(Set({0, 0}, {0})) == 0.5);
}

TEST_CASE("minDCF fixtures") {
  CHECK(ComputeMinDcf(Set({1, 2}, {-1, -2}), 0.01) == 0.0);
  CHECK(ComputeMinDcf(Set({5, 5}, {5, 5, 5}), 0.01) == 1.0);
  // targets {1,3}, nontargets {2,4}: operating points (miss, fa) =
  // (0,1), (0,1), (.5,1), (.5,.5), (1,.5), (1,0); the best is reject-all
  const double want = std::min({0.99 / 0.01, (0.005 + 0.99) / 0.01, (0.005 + 0.495) / 0.01,
                                (0.01 + 0.495) / 0.01, 1.0});
  CHECK(ComputeMinDcf(Set({1, 3}, {2, 4}), 0.01) == doctest::Approx(want).epsilon(1e-15));
  CHECK(ComputeMinDcf(Set({1, 3}, {2, 4}), 0.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("operating points run from accept-all to reject-all") {
  auto pts = OperatingPoints(Set({1, 3, 3}, {2, 3}));
  REQUIRE(pts.size() == 4);
  CHECK(std::isinf(pts.front().threshold));
  CHECK(pts.front().p_miss == 0.0);
  CHECK(pts.front().p_fa == 1.0);
  CHECK(pts[2].threshold == 3.0);
  CHECK(pts[2].p_miss == doctest::Approx(1.0 / 3.0));
  CHECK(pts[2].p_fa == 0.5);
  CHECK(pts.back().p_miss == 1.0);
  CHECK(pts.back().p_fa == 0.0);
}

TEST_CASE("random sets: brute-force DCF, monotone invariance, label flip, bounds") {
  Rng rng(4);
  for (int r = 0; r < 20; ++r) {
    ScoreSet s;
    for (int i = 0; i < 60; ++i) {
      const bool tar = i % 4 == 0;
      s.labels.push_back(tar);
      s.scores.push_back(std::round(4 * (rng.Normal() + (tar ? 1.2 : 0.0))) / 4);  // ties
    }
    const double eer = ComputeEer(s);
    CHECK(eer >= 0.0);
    CHECK(eer <= 1.0);
    for (double p : {0.01, 0.001, 0.3}) {
      const double dcf = ComputeMinDcf(s, p);
      CHECK(dcf == doctest::Approx(BruteMinDcf(s, p)).epsilon(1e-12));
      CHECK(dcf <= 1.0);
      CHECK(dcf <= NormalizedDcfAtEer(s, p) + 1e-12);
    }
    ScoreSet m = s, f = s;
    for (double &v : m.scores) v = std::tanh(v) * 2 + 1;
    for (std::size_t i = 0; i < f.labels.size(); ++i) f.labels[i] = !s.labels[i];
    CHECK(ComputeEer(m) == doctest::Approx(eer).epsilon(1e-12));
    CHECK(ComputeMinDcf(m, 0.01) == doctest::Approx(ComputeMinDcf(s, 0.01)).epsilon(1e-12));
    CHECK(ComputeEer(f) == doctest::Approx(1.0 - eer).epsilon(1e-12));
  }
}

TEST_CASE("score set validation") {
  CHECK_THROWS_AS(ComputeEer(Set({1, 2}, {})), InputError);
  CHECK_THROWS_AS(ComputeEer(Set({}, {1})), InputError);
  CHECK_THROWS_AS(ComputeEer(Set({NAN}, {1})), InputError);
  CHECK_THROWS_AS(ComputeMinDcf(Set({1}, {0}), 1.0), InputError);
  ScoreSet s = Set({1}, {0});
  s.labels.pop_back();
  CHECK_THROWS_AS(s.Validate(), InputError);
}

TEST_CASE("Gaussianality of a Gaussian sample is near zero") {
  Rng rng(5);
  EmbeddingSet s(3);
  for (int k = 0; k < 1000; ++k) {
    const double mu[] = {rng.Normal(), rng.Normal(), rng.Normal()};
    for (int u = 0; u < 10; ++u)
      s.Add("k" + std::to_string(k) + "u" + std::to_string(u), "k" + std::to_string(k),
            {mu[0] + rng.Normal(), mu[1] + rng.Normal(), mu[2] + rng.Normal()});
  }
  GaussReport r = GaussianalityReport(s);
  for (const MomentPair *p : {&r.marginal, &r.conditional})
    CHECK((std::abs(p->skew) < 0.1 && std::abs(p->kurt) < 0.1));
  CHECK(std::abs(r.prior.skew) < 0.25);  // only 1000 speaker means
  CHECK(std::abs(r.prior.kurt) < 0.4);
}

TEST_CASE("symmetric samples have exactly zero skewness") {
  RowMatrix x(6, 2);
  x << 1, 0.5, -1, -0.5, 2, 3, -2, -3, 0.25, 7, -0.25, -7;
  MomentPair m;
  CHECK(AverageMoments(x, &m) == 0);
  CHECK(m.skew == 0.0);
  // two-point distribution: kurtosis 1 - 3
  RowMatrix y(4, 1);
  y << 1, -1, 1, -1;
  AverageMoments(y, &m);
  CHECK(m.kurt == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("degenerate dimensions are skipped and counted") {
  EmbeddingSet s(2);
  s.Add("a1", "a", {1.0, 5.0});
  s.Add("a2", "a", {2.0, 5.0});
  s.Add("b1", "b", {0.0, 5.0});
  s.Add("b2", "b", {4.0, 5.0});
  GaussReport r = GaussianalityReport(s);
  CHECK(r.skipped_marginal == 1);
  CHECK(r.skipped_conditional == 1);
  CHECK(ReportToJson(r).find("skipped_dims") != std::string::npos);

  EmbeddingSet flat(1);
  flat.Add("a1", "a", {1.0});
  flat.Add("a2", "a", {1.0});
  flat.Add("b1", "b", {1.0});
  flat.Add("b2", "b", {1.0});
  CHECK_THROWS_AS(GaussianalityReport(flat), InputError);

  EmbeddingSet singletons(1);
  singletons.Add("a", "a", {1.0});
  singletons.Add("b", "b", {2.0});
  CHECK_THROWS_AS(GaussianalityReport(singletons), InputError);
}
