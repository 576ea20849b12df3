// nda/serialize.h

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

#ifndef NDA_SERIALIZE_H_
#define NDA_SERIALIZE_H_

#include <string>
#include <variant>

#include "json.hpp"
#include "nda/flow.h"
#include "nda/nda_model.h"
#include "nda/plda.h"
#include "nda/preprocess.h"
#include "nda/synth.h"

namespace nda {

using Json = nlohmann::json;

// Every top-level document carries {"format": "nda-backend", "version": 1}.
inline constexpr int kFormatVersion = 1;

Json ToJson(const Vector &v);
Vector VectorFromJson(const Json &j);
Json ToJson(const Matrix &m);  // array of rows
Matrix MatrixFromJson(const Json &j);

Json ToJson(const PldaModel &model);
PldaModel PldaFromJson(const Json &j);

Json ToJson(const FlowModel &flow);
FlowModel FlowFromJson(const Json &j);

Json ToJson(const NdaModel &model);
NdaModel NdaFromJson(const Json &j);

Json ToJson(const LdaTransform &lda);
LdaTransform LdaFromJson(const Json &j);

Json ToJson(const Pipeline &pipeline);
Pipeline PipelineFromJson(const Json &j);

Json ToJson(const Warp &warp);
Warp WarpFromJson(const Json &j);

Json ToJson(const SynthSpec &spec);
// Missing keys keep their defaults; unknown keys are rejected.
SynthSpec SynthSpecFromJson(const Json &j, SynthSpec base = {});

Json ToJson(const OracleModel &oracle);
OracleModel OracleFromJson(const Json &j);

Json ToJson(const TrainConfig &config);
TrainConfig TrainConfigFromJson(const Json &j, TrainConfig base = {});

// A trained back-end together with the preprocessing it was trained behind.
struct ModelBundle {
  Pipeline pipeline;
  std::variant<PldaModel, NdaModel> model;

  bool is_nda() const { return std::holds_alternative<NdaModel>(model); }
  std::size_t in_dim() const { return pipeline.in_dim(); }
  // Model dimension must match the pipeline output.
  void Validate() const;
};

Json ToJson(const ModelBundle &bundle);
ModelBundle BundleFromJson(const Json &j);

// File helpers. Reading wraps parse and schema errors in InputError naming
// the path; writing uses a two-space indent and a trailing newline.
Json ReadJsonFile(const std::string &path);
void WriteJsonFile(const Json &j, const std::string &path);
std::string DumpJson(const Json &j);

ModelBundle ReadBundle(const std::string &path);
void WriteBundle(const ModelBundle &bundle, const std::string &path);
OracleModel ReadOracle(const std::string &path);
void WriteOracle(const OracleModel &oracle, const std::string &path);

}  // namespace nda

#endif  // NDA_SERIALIZE_H_
