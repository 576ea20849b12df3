// tests/unit/test_serialize.cc

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

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "nda/random.h"
#include "nda/serialize.h"

using namespace nda;

namespace {

FlowModel PerturbedFlow(std::size_t dim, std::uint64_t seed) {
  FlowModel flow = InitFlow(dim, 3, 5, seed);
  Rng rng(seed + 1);
  for (double &p : flow.mutable_params()) p += 0.3 * rng.Normal();
  return flow;
}

std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("nda_test_" + name)).string();
}

}  // namespace

TEST_CASE("doubles round-trip bit-exactly") {
  Vector v(5);
  v << 0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, -0.0;
  Vector back = VectorFromJson(Json::parse(DumpJson(ToJson(v))));
  for (int i = 0; i < 5; ++i) CHECK(std::bit_cast<std::uint64_t>(back(i)) == std::bit_cast<std::uint64_t>(v(i)));
  Matrix m = Matrix::Random(3, 2);
  CHECK(MatrixFromJson(Json::parse(DumpJson(ToJson(m)))) == m);
}

TEST_CASE("flow round trip preserves outputs and parameters") {
  FlowModel flow = PerturbedFlow(5, 2);
  FlowModel back = FlowFromJson(Json::parse(DumpJson(ToJson(flow))));
  REQUIRE(back.param_count() == flow.param_count());
  for (std::size_t i = 0; i < flow.param_count(); ++i) CHECK(back.params()[i] == flow.params()[i]);
  const double x[] = {0.3, -1.2, 2.0, 0.1, 0.7};
  auto [za, la] = flow.InverseWithLogdet(x);
  auto [zb, lb] = back.InverseWithLogdet(x);
  CHECK(za == zb);
  CHECK(la == lb);
  Json j = ToJson(flow);
  CHECK(j["layers"][0]["mask"].size() == 5);
  CHECK(j["layers"][0].contains("scale_cap"));
}

TEST_CASE("nda, plda and pipeline round trip") {
  NdaModel nda{Vector::LinSpaced(5, -1, 1), PerturbedFlow(5, 3), Vector::LinSpaced(5, 1, -2), {0, 2}};
  NdaModel nb = NdaFromJson(ToJson(nda));
  CHECK(nb.mean == nda.mean);
  CHECK(nb.log_epsilon == nda.log_epsilon);
  CHECK(nb.active_dims == nda.active_dims);

  PldaModel plda{Vector::Ones(2), Matrix::Random(2, 2), Vector::LinSpaced(2, 3, 1)};
  PldaModel pb = PldaFromJson(ToJson(plda));
  CHECK(pb.mean == plda.mean);
  CHECK(pb.whiten == plda.whiten);
  CHECK(pb.epsilon == plda.epsilon);
  Json pj = ToJson(plda);
  for (const char *key : {"dim", "mean", "whiten", "epsilon"}) CHECK(pj.contains(key));

  Pipeline p;
  p.config.length_norm = true;
  p.config.lda_dim = 2;
  p.center_mean = Vector::Ones(3);
  p.lda = LdaTransform{Vector::Zero(3), Matrix::Random(2, 3)};
  Pipeline q = PipelineFromJson(ToJson(p));
  CHECK(q.config.length_norm);
  CHECK(q.config.lda_dim == 2);
  CHECK(q.lda->projection == p.lda->projection);

  ModelBundle bundle{p, plda};
  const std::string path = TempPath("bundle.json");
  WriteBundle(bundle, path);
  ModelBundle rb = ReadBundle(path);
  CHECK_FALSE(rb.is_nda());
  CHECK(std::get<PldaModel>(rb.model).whiten == plda.whiten);
  std::filesystem::remove(path);
}

TEST_CASE("synth spec, oracle and train config round trip") {
  SynthSpec s;
  s.dim = 3;
  s.prior_variances = Vector::LinSpaced(3, 2, 1);
  s.warp = {WarpKind::kRotationThenCubic, 0.0, 1.0, 0.4};
  s.seed = 77;
  SynthSpec sb = SynthSpecFromJson(ToJson(s));
  CHECK(sb.dim == 3);
  CHECK(sb.seed == 77);
  CHECK(sb.warp.kind == WarpKind::kRotationThenCubic);
  CHECK(sb.warp.strength == 0.4);
  CHECK(sb.prior_variances == s.prior_variances);
  CHECK_THROWS_AS(SynthSpecFromJson(Json{{"dimension", 3}}), InputError);

  OracleModel o{s.warp, RandomOrthogonal(3, 1), s.prior_variances};
  OracleModel ob = OracleFromJson(ToJson(o));
  CHECK(ob.rotation == o.rotation);
  CHECK(ob.prior_variances == o.prior_variances);

  TrainConfig c;
  c.epochs = 7;
  c.grad_clip_norm = 2.5;
  c.learning_rate = 3e-4;
  TrainConfig cb = TrainConfigFromJson(ToJson(c));
  CHECK(cb.epochs == 7);
  CHECK(cb.grad_clip_norm == 2.5);
  CHECK(cb.learning_rate == 3e-4);
  CHECK_THROWS_AS(TrainConfigFromJson(Json{{"epoch", 3}}), InputError);
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(FlowFromJson(Json::parse(R"({"dim": 2})")), InputError);
  CHECK_THROWS_AS(MatrixFromJson(Json::parse("[[1,2],[3]]")), InputError);
  CHECK_THROWS_AS(VectorFromJson(Json::parse(R"([1, "x"])")), InputError);
  Json j = ToJson(ModelBundle{Pipeline{}, PldaModel{Vector::Ones(1), Matrix::Ones(1, 1), Vector::Ones(1)}});
  j["version"] = 99;
  CHECK_THROWS_AS(BundleFromJson(j), InputError);
  const std::string path = TempPath("broken.json");
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(ReadBundle(path), InputError);
  CHECK_THROWS_AS(ReadBundle(TempPath("missing.json")), InputError);
  std::filesystem::remove(path);
}
