// src/nda_model.cc

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

#include "nda/nda_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nda/adam.h"
#include "nda/linear_gaussian.h"
#include "nda/scatter.h"

namespace nda {

void NdaModel::Validate() const {
  if (mean.size() != static_cast<Eigen::Index>(flow.dim()) ||
      log_epsilon.size() != static_cast<Eigen::Index>(flow.dim()))
    throw InputError("NDA model: mean, log_epsilon and flow dimensions differ");
  if (!mean.allFinite() || !log_epsilon.allFinite())
    throw InputError("NDA model has non-finite mean or log_epsilon");
  for (double p : flow.params())
    if (!std::isfinite(p)) throw InputError("NDA model has non-finite flow parameters");
  for (std::size_t d : active_dims)
    if (d >= flow.dim()) throw InputError("NDA active dimension out of range");
}

RowMatrix NdaModel::ToLatent(const RowMatrix &x) const {
  if (static_cast<std::size_t>(x.cols()) != dim())
    throw InputError("vector dimension " + std::to_string(x.cols()) +
                     " does not match NDA model dimension " + std::to_string(dim()));
  RowMatrix centered = x.rowwise() - mean.transpose();
  RowMatrix z;
  Vector log_j;
  flow.InverseBatch(centered, &z, &log_j);
  return z;
}

NdaModel MakeIdentityNda(const Vector &mean, const Vector &log_epsilon,
                         std::size_t num_layers, std::size_t hidden) {
  NdaModel model{mean, InitFlow(static_cast<std::size_t>(mean.size()), num_layers, hidden, 0),
                 log_epsilon, {}};
  model.Validate();
  return model;
}

double NdaLogMarginal(const NdaModel &model, const RowMatrix &x) {
  if (x.rows() < 1) throw InputError("marginal needs at least one vector");
  if (static_cast<std::size_t>(x.cols()) != model.dim())
    throw InputError("vector dimension does not match NDA model dimension");
  if (!x.allFinite()) throw InputError("non-finite input vector");
  RowMatrix centered = x.rowwise() - model.mean.transpose();
  RowMatrix z;
  Vector log_j;
  model.flow.InverseBatch(centered, &z, &log_j);
  return log_j.sum() + LatentLogMarginal(model.epsilon(), z);
}

double NdaScoreTrial(const NdaModel &model, const RowMatrix &enroll,
                     std::span<const double> test) {
  if (enroll.rows() < 1) throw InputError("trial needs at least one enrollment vector");
  if (test.size() != model.dim())
    throw InputError("test vector dimension does not match NDA model dimension");
  RowMatrix z_enroll = model.ToLatent(enroll);
  Eigen::Map<const Eigen::RowVectorXd> t(test.data(), static_cast<Eigen::Index>(test.size()));
  RowMatrix z_test = model.ToLatent(RowMatrix(t));
  std::span<const double> zt(z_test.data(), model.dim());
  if (model.active_dims.empty())
    return LatentLogLikelihoodRatio(model.epsilon(), z_enroll, zt);
  return LatentLogLikelihoodRatio(model.epsilon(), z_enroll, zt, model.active_dims);
}

NdaModel TruncateLatentDims(const NdaModel &model, std::size_t keep) {
  if (keep < 1 || keep > model.dim())
    throw InputError("truncation keeps " + std::to_string(keep) +
                     " dimensions; must be in [1, " + std::to_string(model.dim()) + "]");
  std::vector<std::size_t> order(model.dim());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return model.log_epsilon(static_cast<Eigen::Index>(a)) >
           model.log_epsilon(static_cast<Eigen::Index>(b));
  });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  NdaModel out = model;
  out.active_dims = std::move(order);
  return out;
}

EmbeddingSet TransformSet(const NdaModel &model, const EmbeddingSet &set) {
  if (set.dim() != model.dim())
    throw InputError("set dimension " + std::to_string(set.dim()) +
                     " does not match NDA model dimension " + std::to_string(model.dim()));
  return set.WithVectors(model.ToLatent(set.AllRows()));
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw InputError("epochs must be >= 1");
  if (speakers_per_batch < 1) throw InputError("speakers_per_batch must be >= 1");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
    throw InputError("Adam betas must lie in (0, 1)");
  if (!(adam_eps > 0.0)) throw InputError("adam_eps must be > 0");
  if (grad_clip_norm && !(*grad_clip_norm > 0.0))
    throw InputError("grad_clip_norm must be > 0 when set");
}

ObjectiveGrad SpeakerObjective(const NdaModel &model, const RowMatrix &x) {
  if (x.rows() < 1) throw InputError("speaker with no vectors");
  RowMatrix centered = x.rowwise() - model.mean.transpose();
  FlowTape tape = model.flow.Record(centered);
  const Vector eps = model.epsilon();
  RowMatrix grad_z;
  Vector grad_eps;
  const double marginal = LatentLogMarginalGrad(eps, tape.z(), &grad_z, &grad_eps);
  ObjectiveGrad out;
  out.value = tape.log_j().sum() + marginal;
  FlowGrads fg = model.flow.Backprop(tape, grad_z, Vector::Ones(x.rows()));
  out.flow = std::move(fg.params);
  out.log_epsilon = grad_eps.cwiseProduct(eps);  // d/dlog(eps) = eps d/deps
  return out;
}

Vector InitialLogEpsilon(const EmbeddingSet &train) {
  ScatterStats stats = ComputeScatter(train);
  const double mean_count =
      static_cast<double>(stats.num_vectors) / static_cast<double>(stats.num_classes);
  Vector out(stats.between.rows());
  for (Eigen::Index j = 0; j < out.size(); ++j)
    out(j) = std::log(std::max(stats.between(j, j) - 1.0 / mean_count, 1e-2));
  return out;
}

namespace {

std::uint64_t EpochSeed(std::uint64_t seed, std::size_t epoch) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (epoch + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

TrainResult FitNda(const EmbeddingSet &train, FlowModel init, const TrainConfig &config,
                   const EpochCallback &on_epoch) {
  config.Validate();
  if (init.dim() != train.dim())
    throw InputError("initial flow dimension " + std::to_string(init.dim()) +
                     " does not match training dimension " + std::to_string(train.dim()));
  const auto groups = train.GroupBySpeaker();
  std::size_t multi = 0;
  for (const auto &g : groups) multi += g.size() >= 2 ? 1 : 0;
  if (multi < 2) throw InputError("NDA training needs >= 2 speakers with >= 2 utterances");

  const std::size_t min_speakers = config.min_speakers_before_update != 0
                                       ? config.min_speakers_before_update
                                       : config.speakers_per_batch;
  TrainResult result{NdaModel{train.AllRows().colwise().mean().transpose(), std::move(init),
                              InitialLogEpsilon(train), {}},
                     {}, {}, {}};
  NdaModel &model = result.model;
  result.initial_log_epsilon = model.log_epsilon;

  const std::size_t n_flow = model.flow.param_count();
  const std::size_t n_total = n_flow + model.dim();
  Adam adam(n_total, {config.learning_rate, config.adam_beta1, config.adam_beta2,
                      config.adam_eps});
  std::vector<double> params(n_total), accum(n_total, 0.0), step(n_total);
  std::size_t pending = 0;

  auto apply_step = [&]() {
    const double scale = 1.0 / static_cast<double>(pending);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < n_total; ++i) {
      step[i] = accum[i] * scale;
      norm_sq += step[i] * step[i];
    }
    if (config.grad_clip_norm && std::sqrt(norm_sq) > *config.grad_clip_norm) {
      const double shrink = *config.grad_clip_norm / std::sqrt(norm_sq);
      for (double &s : step) s *= shrink;
    }
    // ascent on the objective == descent on its negation
    for (double &s : step) s = -s;
    auto flow_params = model.flow.params();
    std::copy(flow_params.begin(), flow_params.end(), params.begin());
    std::copy(model.log_epsilon.data(), model.log_epsilon.data() + model.dim(),
              params.begin() + static_cast<std::ptrdiff_t>(n_flow));
    adam.Step(params, step);
    model.flow.set_params(std::span<const double>(params.data(), n_flow));
    std::copy(params.begin() + static_cast<std::ptrdiff_t>(n_flow), params.end(),
              model.log_epsilon.data());
    result.step_speakers.push_back(pending);
    std::fill(accum.begin(), accum.end(), 0.0);
    pending = 0;
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto batches = PartitionSpeakerBatches(train, config.speakers_per_batch,
                                           EpochSeed(config.seed, epoch));
    double epoch_total = 0.0;
    std::size_t epoch_speakers = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      for (const auto &group : batches[b].groups) {
        if (group.vectors.rows() == 0)
          throw InputError("speaker '" + group.speaker_id + "' has no vectors");
        ObjectiveGrad og = SpeakerObjective(model, group.vectors);
        const double weight =
            config.per_utterance_average ? 1.0 / static_cast<double>(group.vectors.rows()) : 1.0;
        if (!std::isfinite(og.value))
          throw NumericalError("NDA objective became non-finite at epoch " +
                               std::to_string(epoch + 1) + ", batch " + std::to_string(b + 1));
        epoch_total += og.value * weight;
        ++epoch_speakers;
        for (std::size_t i = 0; i < n_flow; ++i) accum[i] += weight * og.flow[i];
        for (std::size_t j = 0; j < model.dim(); ++j)
          accum[n_flow + j] += weight * og.log_epsilon(static_cast<Eigen::Index>(j));
        ++pending;
        if (pending >= min_speakers) apply_step();
      }
    }
    if (pending > 0) apply_step();
    const double mean_objective = epoch_total / static_cast<double>(epoch_speakers);
    result.loss_trace.push_back(mean_objective);
    if (on_epoch) on_epoch(epoch, mean_objective);
  }
  model.Validate();
  return result;
}

}  // namespace nda
