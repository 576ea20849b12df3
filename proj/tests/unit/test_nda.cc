// tests/unit/test_nda.cc

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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nda/linear_gaussian.h"
#include "nda/nda_model.h"
#include "nda/plda.h"
#include "nda/random.h"
#include "nda/synth.h"

using namespace nda;

namespace {

Corpus SmallCorpus(WarpKind kind, std::size_t dim, std::size_t speakers, std::size_t utts,
                   std::uint64_t seed) {
  SynthSpec spec;
  spec.dim = dim;
  spec.n_train_speakers = speakers;
  spec.n_eval_speakers = 20;
  spec.utts_per_speaker = utts;
  spec.warp.kind = kind;
  spec.warp.strength = 0.4;
  spec.seed = seed;
  return GenerateCorpus(spec);
}

std::vector<double> Ranks(const std::vector<double> &v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
  return r;
}

double Spearman(const std::vector<double> &a, const std::vector<double> &b) {
  auto ra = Ranks(a), rb = Ranks(b);
  Eigen::Map<Vector> x(ra.data(), static_cast<Eigen::Index>(ra.size()));
  Eigen::Map<Vector> y(rb.data(), static_cast<Eigen::Index>(rb.size()));
  Vector xc = x.array() - x.mean(), yc = y.array() - y.mean();
  return xc.dot(yc) / (xc.norm() * yc.norm());
}

RowMatrix Row(const std::vector<double> &v) {
  return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("identity flow reproduces the PLDA marginal and score") {
  Rng rng(1);
  Vector log_eps(3);
  log_eps << 0.5, -0.3, -2.0;
  NdaModel nda = MakeIdentityNda(Vector::Zero(3), log_eps, 4, 8);
  PldaModel plda{Vector::Zero(3), Matrix::Identity(3, 3), nda.epsilon()};
  RowMatrix x(4, 3);
  for (auto &v : x.reshaped()) v = rng.Normal();
  CHECK(NdaLogMarginal(nda, x) == MarginalLogDensity(plda, x));
  const double t[] = {0.1, -0.2, 0.3};
  CHECK(std::abs(NdaScoreTrial(nda, x, t) - ScoreTrial(plda, x, t)) < 1e-10);

  NdaModel tiny = MakeIdentityNda(Vector::Zero(2), Vector::Constant(2, -60.0), 2, 4);
  CHECK(NdaLogMarginal(tiny, RowMatrix::Zero(1, 2)) == doctest::Approx(2 * -0.918939).epsilon(1e-6));
}

TEST_CASE("z-space score equals the three-marginal score with Jacobians") {
  Rng rng(2);
  NdaModel model = MakeIdentityNda(Vector::Constant(5, 0.2), Vector::Constant(5, 0.3), 4, 8);
  for (double &p : model.flow.mutable_params()) p = rng.Uniform(-0.4, 0.4);
  for (int t = 0; t < 20; ++t) {
    RowMatrix joint(3, 5);
    for (auto &v : joint.reshaped()) v = rng.Normal();
    RowMatrix enroll = joint.topRows(2);
    const double three = NdaLogMarginal(model, joint) - NdaLogMarginal(model, enroll) -
                         NdaLogMarginal(model, joint.bottomRows(1));
    CHECK(std::abs(three - NdaScoreTrial(model, enroll, {joint.row(2).data(), 5})) < 1e-8);
  }
}

TEST_CASE("first-epoch objective equals the PLDA objective at the initial eps") {
  Corpus c = SmallCorpus(WarpKind::kIdentity, 3, 30, 5, 3);
  TrainConfig config;
  config.epochs = 1;
  config.speakers_per_batch = 30;  // one step per epoch, taken after the pass
  TrainResult r = FitNda(c.train, InitFlow(3, 2, 4, 0), config);
  const Vector mean = c.train.AllRows().colwise().mean().transpose();
  PldaModel plda{mean, Matrix::Identity(3, 3), r.initial_log_epsilon.array().exp()};
  double total = 0.0;
  auto groups = c.train.GroupBySpeaker();
  for (const auto &g : groups) total += MarginalLogDensity(plda, c.train.Rows(g));
  CHECK(std::abs(r.loss_trace[0] - total / static_cast<double>(groups.size())) < 1e-8);
}

TEST_CASE("update accounting follows speakers_per_batch and min_speakers") {
  Corpus c = SmallCorpus(WarpKind::kIdentity, 2, 45, 3, 4);
  TrainConfig config;
  config.epochs = 2;
  config.speakers_per_batch = 20;
  TrainResult r = FitNda(c.train, InitFlow(2, 2, 4, 0), config);
  CHECK(r.step_speakers == std::vector<std::size_t>{20, 20, 5, 20, 20, 5});
  CHECK(r.loss_trace.size() == 2);

  config.min_speakers_before_update = 30;
  r = FitNda(c.train, InitFlow(2, 2, 4, 0), config);
  CHECK(r.step_speakers == std::vector<std::size_t>{30, 15, 30, 15});
}

TEST_CASE("training is deterministic, improves the objective and keeps eps positive") {
  Corpus c = SmallCorpus(WarpKind::kRotationThenCubic, 4, 150, 8, 5);
  TrainConfig config;
  config.epochs = 8;
  config.speakers_per_batch = 10;
  config.learning_rate = 3e-3;
  config.seed = 17;
  TrainResult a = FitNda(c.train, InitFlow(4, 4, 16, 1), config);
  TrainResult b = FitNda(c.train, InitFlow(4, 4, 16, 1), config);
  CHECK(std::equal(a.model.flow.params().begin(), a.model.flow.params().end(),
                   b.model.flow.params().begin()));
  CHECK(a.model.log_epsilon == b.model.log_epsilon);
  CHECK(a.loss_trace.back() > a.loss_trace.front());
  for (std::size_t e = 1; e < a.loss_trace.size(); ++e)
    CHECK(a.loss_trace[e] >= a.loss_trace[e - 1] - 0.02 * std::abs(a.loss_trace[e - 1]));
  CHECK((a.model.epsilon().array() > 0.0).all());
}

TEST_CASE("trained scores track the oracle in rank") {
  SynthSpec spec;
  spec.dim = 4;
  spec.n_train_speakers = 1000;
  spec.n_eval_speakers = 20;
  spec.utts_per_speaker = 20;
  spec.warp.kind = WarpKind::kRotationThenCubic;
  spec.warp.strength = 0.2;
  spec.seed = 5;
  Corpus c = GenerateCorpus(spec);
  TrainConfig config;
  config.epochs = 20;
  config.speakers_per_batch = 20;
  config.learning_rate = 3e-3;
  config.seed = 17;
  TrainResult a = FitNda(c.train, InitFlow(4, 8, 32, 1), config);
  PldaModel plda = FitPlda(c.train);
  std::vector<double> mine, oracle, linear;
  for (const auto &t : c.trials) {
    RowMatrix e = Row(c.eval[*c.eval.Find(t.enroll[0])].vector);
    const auto &test = c.eval[*c.eval.Find(t.test)].vector;
    mine.push_back(NdaScoreTrial(a.model, e, test));
    oracle.push_back(OracleScore(c.oracle, e, test));
    linear.push_back(ScoreTrial(plda, e, test));
  }
  const double rho = Spearman(mine, oracle);
  CHECK(rho > 0.95);
  CHECK(rho > Spearman(linear, oracle));
}

TEST_CASE("objective gradient matches central differences") {
  Rng rng(6);
  NdaModel model = MakeIdentityNda(Vector::Zero(4), Vector::Constant(4, 0.1), 3, 8);
  for (double &p : model.flow.mutable_params()) p = rng.Uniform(-0.3, 0.3);
  RowMatrix x(5, 4);
  for (auto &v : x.reshaped()) v = rng.Normal();
  ObjectiveGrad g = SpeakerObjective(model, x);
  const double h = 1e-5;
  for (std::size_t i = 0; i < g.flow.size(); i += 7) {
    NdaModel p = model, m = model;
    p.flow.mutable_params()[i] += h;
    m.flow.mutable_params()[i] -= h;
    const double fd = (SpeakerObjective(p, x).value - SpeakerObjective(m, x).value) / (2 * h);
    CHECK(std::abs(fd - g.flow[i]) <= std::max(1e-4 * std::abs(fd), 1e-7));
  }
  for (Eigen::Index j = 0; j < 4; ++j) {
    NdaModel p = model, m = model;
    p.log_epsilon(j) += h;
    m.log_epsilon(j) -= h;
    const double fd = (SpeakerObjective(p, x).value - SpeakerObjective(m, x).value) / (2 * h);
    CHECK(std::abs(fd - g.log_epsilon(j)) <= std::max(1e-4 * std::abs(fd), 1e-7));
  }
}

TEST_CASE("transform_set and truncation") {
  Rng rng(7);
  NdaModel id = MakeIdentityNda(Vector::Zero(3), Vector::Zero(3), 2, 4);
  EmbeddingSet s(3);
  for (int i = 0; i < 4; ++i) s.Add("u" + std::to_string(i), "s", {rng.Normal(), rng.Normal(), 1.0});
  CHECK(TransformSet(id, s) == s);

  Vector log_eps(3);
  log_eps << -1.0, 2.0, 0.5;
  NdaModel m = MakeIdentityNda(Vector::Zero(3), log_eps, 2, 4);
  NdaModel top = TruncateLatentDims(m, 2);
  CHECK(top.active_dims == std::vector<std::size_t>{1, 2});
  RowMatrix e(1, 3);
  e << 0.3, -0.4, 0.5;
  const double t[] = {1.0, 0.2, -0.1};
  const std::size_t dims[] = {1, 2};
  CHECK(NdaScoreTrial(top, e, t) == LatentLogLikelihoodRatio(m.epsilon(), e, t, dims));
  CHECK_THROWS_AS(TruncateLatentDims(m, 4), InputError);
}

TEST_CASE("training rejects degenerate input") {
  EmbeddingSet s(2);
  s.Add("a", "x", {1, 2});
  s.Add("b", "y", {2, 1});
  CHECK_THROWS_AS(FitNda(s, InitFlow(2, 2, 4, 0), TrainConfig{}), InputError);
  TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.Validate(), InputError);
  bad = TrainConfig{};
  bad.adam_beta1 = 1.0;
  CHECK_THROWS_AS(bad.Validate(), InputError);
}
