// src/serialize.cc

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

#include "nda/serialize.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nda {

namespace {

constexpr const char *kFormatName = "nda-backend";

Json Header(const char *kind) {
  return Json{{"format", kFormatName}, {"version", kFormatVersion}, {"kind", kind}};
}

void CheckHeader(const Json &j, const char *kind) {
  if (!j.is_object()) throw InputError(std::string("expected a JSON object for ") + kind);
  if (j.value("format", "") != kFormatName)
    throw InputError(std::string("not an nda-backend ") + kind + " document");
  if (j.value("version", -1) != kFormatVersion)
    throw InputError("unsupported " + std::string(kind) + " version " +
                     j.value("version", Json(nullptr)).dump());
  if (j.value("kind", "") != kind)
    throw InputError("expected kind '" + std::string(kind) + "', found '" +
                     j.value("kind", "") + "'");
}

const Json &Field(const Json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

double Finite(const Json &j) {
  if (!j.is_number()) throw InputError("expected a number, found " + j.dump());
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError("non-finite number in model file");
  return v;
}

std::size_t Count(const Json &j) {
  if (!j.is_number_unsigned())
    throw InputError("expected a non-negative integer, found " + j.dump());
  return j.get<std::size_t>();
}

void RejectUnknown(const Json &j, std::initializer_list<const char *> known,
                   const char *what) {
  std::set<std::string> names(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!names.count(it.key()))
      throw InputError("unknown " + std::string(what) + " key '" + it.key() + "'");
}

}  // namespace

Json ToJson(const Vector &v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector VectorFromJson(const Json &j) {
  if (!j.is_array()) throw InputError("expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = Finite(j[i]);
  return v;
}

Json ToJson(const Matrix &m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(ToJson(Vector(m.row(i).transpose())));
  return rows;
}

Matrix MatrixFromJson(const Json &j) {
  if (!j.is_array()) throw InputError("expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  if (!j[0].is_array()) throw InputError("expected an array of rows");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    Vector row = VectorFromJson(j[i]);
    if (static_cast<std::size_t>(row.size()) != cols) throw InputError("ragged matrix rows");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json ToJson(const PldaModel &model) {
  Json j = Header("plda");
  j["dim"] = model.dim();
  j["mean"] = ToJson(model.mean);
  j["whiten"] = ToJson(model.whiten);
  j["epsilon"] = ToJson(model.epsilon);
  return j;
}

PldaModel PldaFromJson(const Json &j) {
  CheckHeader(j, "plda");
  PldaModel model{VectorFromJson(Field(j, "mean")), MatrixFromJson(Field(j, "whiten")),
                  VectorFromJson(Field(j, "epsilon"))};
  model.Validate();
  return model;
}

namespace {

// {"layers": [{"W": rows, "b": [...]}, ...]} for one coupling network.
Json NetToJson(const Mlp &net, std::span<const double> params) {
  Json dense = Json::array();
  for (std::size_t l = 0; l < net.num_dense(); ++l) {
    const std::size_t rows = net.sizes()[l + 1], cols = net.sizes()[l];
    Json w = Json::array();
    for (std::size_t r = 0; r < rows; ++r) {
      const double *row = params.data() + net.weight_offset(l) + r * cols;
      w.push_back(std::vector<double>(row, row + cols));
    }
    const double *b = params.data() + net.bias_offset(l);
    dense.push_back({{"W", w}, {"b", std::vector<double>(b, b + rows)}});
  }
  return Json{{"layers", dense}};
}

std::vector<std::size_t> NetHidden(const Json &net) {
  const Json &dense = Field(net, "layers");
  if (!dense.is_array() || dense.empty()) throw InputError("coupling network has no layers");
  std::vector<std::size_t> hidden;
  for (std::size_t l = 0; l + 1 < dense.size(); ++l) hidden.push_back(Field(dense[l], "b").size());
  return hidden;
}

void NetFromJson(const Json &net, const Mlp &mlp, std::span<double> params) {
  const Json &dense = Field(net, "layers");
  if (dense.size() != mlp.num_dense()) throw InputError("coupling network depth mismatch");
  for (std::size_t l = 0; l < mlp.num_dense(); ++l) {
    const std::size_t rows = mlp.sizes()[l + 1], cols = mlp.sizes()[l];
    Matrix w = MatrixFromJson(Field(dense[l], "W"));
    Vector b = VectorFromJson(Field(dense[l], "b"));
    if (static_cast<std::size_t>(w.rows()) != rows || static_cast<std::size_t>(w.cols()) != cols ||
        static_cast<std::size_t>(b.size()) != rows)
      throw InputError("coupling network layer " + std::to_string(l) + " has the wrong shape");
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        params[mlp.weight_offset(l) + r * cols + c] =
            w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t r = 0; r < rows; ++r)
      params[mlp.bias_offset(l) + r] = b(static_cast<Eigen::Index>(r));
  }
}

}  // namespace

Json ToJson(const FlowModel &flow) {
  Json j = Header("flow");
  j["dim"] = flow.dim();
  Json layers = Json::array();
  for (std::size_t l = 0; l < flow.num_layers(); ++l) {
    const CouplingLayer &layer = flow.layer(l);
    std::vector<int> mask(layer.mask.begin(), layer.mask.end());
    layers.push_back({{"mask", mask},
                      {"scale_cap", layer.scale_cap},
                      {"scale_net", NetToJson(layer.scale_net, flow.params())},
                      {"shift_net", NetToJson(layer.shift_net, flow.params())}});
  }
  j["layers"] = layers;
  return j;
}

FlowModel FlowFromJson(const Json &j) {
  CheckHeader(j, "flow");
  const std::size_t dim = Count(Field(j, "dim"));
  std::vector<CouplingSpec> specs;
  for (const auto &l : Field(j, "layers")) {
    CouplingSpec spec;
    for (const auto &m : Field(l, "mask")) {
      if (!m.is_number_integer() || (m.get<int>() != 0 && m.get<int>() != 1))
        throw InputError("mask entries must be 0 or 1");
      spec.mask.push_back(m.get<int>() == 1);
    }
    spec.hidden = NetHidden(Field(l, "scale_net"));
    if (NetHidden(Field(l, "shift_net")) != spec.hidden)
      throw InputError("scale and shift networks differ in shape");
    spec.scale_cap = Finite(Field(l, "scale_cap"));
    specs.push_back(std::move(spec));
  }
  FlowModel flow(dim, specs);
  const Json &layers = j["layers"];
  for (std::size_t l = 0; l < flow.num_layers(); ++l) {
    NetFromJson(layers[l]["scale_net"], flow.layer(l).scale_net, flow.mutable_params());
    NetFromJson(layers[l]["shift_net"], flow.layer(l).shift_net, flow.mutable_params());
  }
  return flow;
}

Json ToJson(const NdaModel &model) {
  Json j = Header("nda");
  j["mean"] = ToJson(model.mean);
  j["log_epsilon"] = ToJson(model.log_epsilon);
  j["active_dims"] = model.active_dims;
  j["flow"] = ToJson(model.flow);
  return j;
}

NdaModel NdaFromJson(const Json &j) {
  CheckHeader(j, "nda");
  NdaModel model{VectorFromJson(Field(j, "mean")), FlowFromJson(Field(j, "flow")),
                 VectorFromJson(Field(j, "log_epsilon")), {}};
  for (const auto &d : Field(j, "active_dims")) model.active_dims.push_back(Count(d));
  model.Validate();
  return model;
}

Json ToJson(const LdaTransform &lda) {
  Json j = Header("lda");
  j["in_dim"] = lda.in_dim();
  j["out_dim"] = lda.out_dim();
  j["mean"] = ToJson(lda.mean);
  j["projection"] = ToJson(lda.projection);
  return j;
}

LdaTransform LdaFromJson(const Json &j) {
  CheckHeader(j, "lda");
  LdaTransform lda{VectorFromJson(Field(j, "mean")), MatrixFromJson(Field(j, "projection"))};
  if (lda.projection.rows() < 1 || lda.mean.size() != lda.projection.cols())
    throw InputError("LDA mean and projection shapes disagree");
  if (Count(Field(j, "in_dim")) != lda.in_dim() ||
      Count(Field(j, "out_dim")) != lda.out_dim())
    throw InputError("LDA in_dim/out_dim disagree with the projection shape");
  return lda;
}

Json ToJson(const Pipeline &p) {
  Json j = Header("pipeline");
  j["center"] = p.config.center;
  j["length_norm"] = p.config.length_norm;
  j["lda_dim"] = p.config.lda_dim;
  j["length_norm_after_lda"] = p.config.length_norm_after_lda;
  j["center_mean"] = ToJson(p.center_mean);
  j["lda"] = p.lda ? ToJson(*p.lda) : Json(nullptr);
  return j;
}

Pipeline PipelineFromJson(const Json &j) {
  CheckHeader(j, "pipeline");
  Pipeline p;
  p.config.center = Field(j, "center").get<bool>();
  p.config.length_norm = Field(j, "length_norm").get<bool>();
  p.config.lda_dim = Count(Field(j, "lda_dim"));
  p.config.length_norm_after_lda = Field(j, "length_norm_after_lda").get<bool>();
  p.center_mean = VectorFromJson(Field(j, "center_mean"));
  if (!Field(j, "lda").is_null()) p.lda = LdaFromJson(j["lda"]);
  if ((p.config.lda_dim != 0) != p.lda.has_value() ||
      (p.lda && p.lda->out_dim() != p.config.lda_dim))
    throw InputError("pipeline lda_dim disagrees with its LDA transform");
  if (p.lda && p.lda->in_dim() != static_cast<std::size_t>(p.center_mean.size()))
    throw InputError("pipeline centering and LDA dimensions disagree");
  return p;
}

Json ToJson(const Warp &w) {
  return Json{{"kind", WarpKindName(w.kind)},
              {"skew", w.skew},
              {"tail", w.tail},
              {"strength", w.strength}};
}

Warp WarpFromJson(const Json &j) {
  if (!j.is_object()) throw InputError("warp must be an object");
  RejectUnknown(j, {"kind", "skew", "tail", "strength"}, "warp");
  Warp w;
  if (j.contains("kind")) w.kind = ParseWarpKind(j["kind"].get<std::string>());
  if (j.contains("skew")) w.skew = Finite(j["skew"]);
  if (j.contains("tail")) w.tail = Finite(j["tail"]);
  if (j.contains("strength")) w.strength = Finite(j["strength"]);
  return w;
}

Json ToJson(const SynthSpec &s) {
  return Json{{"dim", s.dim},
              {"n_train_speakers", s.n_train_speakers},
              {"n_eval_speakers", s.n_eval_speakers},
              {"utts_per_speaker", s.utts_per_speaker},
              {"prior_variances", ToJson(s.PriorVariances())},
              {"warp", ToJson(s.warp)},
              {"seed", s.seed},
              {"nontargets_per_target", s.nontargets_per_target}};
}

SynthSpec SynthSpecFromJson(const Json &j, SynthSpec s) {
  if (!j.is_object()) throw InputError("synth spec must be an object");
  RejectUnknown(j,
                {"dim", "n_train_speakers", "n_eval_speakers", "utts_per_speaker",
                 "prior_variances", "warp", "seed", "nontargets_per_target"},
                "synth spec");
  if (j.contains("dim")) s.dim = Count(j["dim"]);
  if (j.contains("n_train_speakers")) s.n_train_speakers = Count(j["n_train_speakers"]);
  if (j.contains("n_eval_speakers")) s.n_eval_speakers = Count(j["n_eval_speakers"]);
  if (j.contains("utts_per_speaker")) s.utts_per_speaker = Count(j["utts_per_speaker"]);
  if (j.contains("prior_variances")) s.prior_variances = VectorFromJson(j["prior_variances"]);
  if (j.contains("warp")) s.warp = WarpFromJson(j["warp"]);
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("nontargets_per_target"))
    s.nontargets_per_target = Count(j["nontargets_per_target"]);
  return s;
}

Json ToJson(const OracleModel &o) {
  Json j = Header("oracle");
  j["warp"] = ToJson(o.warp);
  j["prior_variances"] = ToJson(o.prior_variances);
  j["within_variance"] = 1.0;
  j["rotation"] = ToJson(o.rotation);
  return j;
}

OracleModel OracleFromJson(const Json &j) {
  CheckHeader(j, "oracle");
  OracleModel o{WarpFromJson(Field(j, "warp")), MatrixFromJson(Field(j, "rotation")),
                VectorFromJson(Field(j, "prior_variances"))};
  o.Validate();
  return o;
}

Json ToJson(const TrainConfig &c) {
  Json j{{"epochs", c.epochs},
         {"speakers_per_batch", c.speakers_per_batch},
         {"min_speakers_before_update", c.min_speakers_before_update},
         {"learning_rate", c.learning_rate},
         {"adam_beta1", c.adam_beta1},
         {"adam_beta2", c.adam_beta2},
         {"adam_eps", c.adam_eps},
         {"seed", c.seed},
         {"per_utterance_average", c.per_utterance_average}};
  j["grad_clip_norm"] = c.grad_clip_norm ? Json(*c.grad_clip_norm) : Json(nullptr);
  return j;
}

TrainConfig TrainConfigFromJson(const Json &j, TrainConfig c) {
  if (!j.is_object()) throw InputError("training config must be an object");
  RejectUnknown(j,
                {"epochs", "speakers_per_batch", "min_speakers_before_update", "learning_rate",
                 "adam_beta1", "adam_beta2", "adam_eps", "seed", "grad_clip_norm",
                 "per_utterance_average"},
                "training config");
  if (j.contains("epochs")) c.epochs = Count(j["epochs"]);
  if (j.contains("speakers_per_batch")) c.speakers_per_batch = Count(j["speakers_per_batch"]);
  if (j.contains("min_speakers_before_update"))
    c.min_speakers_before_update = Count(j["min_speakers_before_update"]);
  if (j.contains("learning_rate")) c.learning_rate = Finite(j["learning_rate"]);
  if (j.contains("adam_beta1")) c.adam_beta1 = Finite(j["adam_beta1"]);
  if (j.contains("adam_beta2")) c.adam_beta2 = Finite(j["adam_beta2"]);
  if (j.contains("adam_eps")) c.adam_eps = Finite(j["adam_eps"]);
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("grad_clip_norm")) {
    if (j["grad_clip_norm"].is_null())
      c.grad_clip_norm.reset();
    else
      c.grad_clip_norm = Finite(j["grad_clip_norm"]);
  }
  if (j.contains("per_utterance_average"))
    c.per_utterance_average = j["per_utterance_average"].get<bool>();
  return c;
}

void ModelBundle::Validate() const {
  const std::size_t model_dim =
      std::visit([](const auto &m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, PldaModel>)
          return m.input_dim();
        else
          return m.dim();
      }, model);
  if (model_dim != pipeline.out_dim())
    throw InputError("model input dimension " + std::to_string(model_dim) +
                     " does not match pipeline output dimension " +
                     std::to_string(pipeline.out_dim()));
}

Json ToJson(const ModelBundle &b) {
  Json j = Header("bundle");
  j["backend"] = b.is_nda() ? "nda" : "plda";
  j["pipeline"] = ToJson(b.pipeline);
  j["model"] = std::visit([](const auto &m) { return ToJson(m); }, b.model);
  return j;
}

ModelBundle BundleFromJson(const Json &j) {
  CheckHeader(j, "bundle");
  const std::string backend = Field(j, "backend").get<std::string>();
  ModelBundle b{PipelineFromJson(Field(j, "pipeline")), PldaModel{}};
  if (backend == "plda")
    b.model = PldaFromJson(Field(j, "model"));
  else if (backend == "nda")
    b.model = NdaFromJson(Field(j, "model"));
  else
    throw InputError("unknown backend '" + backend + "'");
  b.Validate();
  return b;
}

Json ReadJsonFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception &e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

std::string DumpJson(const Json &j) { return j.dump(2) + "\n"; }

void WriteJsonFile(const Json &j, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << DumpJson(j);
  if (!out) throw InputError("error writing '" + path + "'");
}

namespace {

template <typename F>
auto Parse(const std::string &path, F &&f) {
  Json j = ReadJsonFile(path);
  try {
    return f(j);
  } catch (const Json::exception &e) {
    throw InputError("'" + path + "': " + e.what());
  } catch (const InputError &e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

}  // namespace

ModelBundle ReadBundle(const std::string &path) { return Parse(path, BundleFromJson); }

void WriteBundle(const ModelBundle &bundle, const std::string &path) {
  WriteJsonFile(ToJson(bundle), path);
}

OracleModel ReadOracle(const std::string &path) { return Parse(path, OracleFromJson); }

void WriteOracle(const OracleModel &oracle, const std::string &path) {
  WriteJsonFile(ToJson(oracle), path);
}

}  // namespace nda
