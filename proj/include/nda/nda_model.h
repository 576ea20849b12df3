// nda/nda_model.h

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

#ifndef NDA_NDA_MODEL_H_
#define NDA_NDA_MODEL_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nda/flow.h"
#include "nda/types.h"
#include "nda/vecstore.h"

namespace nda {

// Linear-Gaussian model in the latent space of an invertible flow:
//
//   z = f^-1(x - mean),   mu ~ N(0, diag(eps)),   z | mu ~ N(mu, I).
//
// The within-class covariance in z is fixed at I; eps = exp(log_epsilon) is
// trained together with the flow.
struct NdaModel {
  Vector mean;
  FlowModel flow;
  Vector log_epsilon;
  // Latent dimensions used for scoring; empty means all. Set by
  // TruncateLatentDims.
  std::vector<std::size_t> active_dims;

  std::size_t dim() const { return flow.dim(); }
  Vector epsilon() const { return log_epsilon.array().exp(); }
  void Validate() const;

  // Rows of x mapped to latent codes.
  RowMatrix ToLatent(const RowMatrix &x) const;
};

// A model whose latent space is x - mean (identity flow).
NdaModel MakeIdentityNda(const Vector &mean, const Vector &log_epsilon,
                         std::size_t num_layers, std::size_t hidden);

// log p(x_1..x_n) = sum_i log J_{x_i} + log p(z_1..z_n), exact and
// normalized.
double NdaLogMarginal(const NdaModel &model, const RowMatrix &x);

// Log likelihood ratio computed in z-space only. The Jacobian factors of the
// numerator and denominator are identical and are never evaluated.
double NdaScoreTrial(const NdaModel &model, const RowMatrix &enroll,
                     std::span<const double> test);

// Scores with the `keep` latent dimensions of largest eps.
NdaModel TruncateLatentDims(const NdaModel &model, std::size_t keep);

EmbeddingSet TransformSet(const NdaModel &model, const EmbeddingSet &set);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t speakers_per_batch = 200;
  // 0 means "same as speakers_per_batch".
  std::size_t min_speakers_before_update = 0;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  std::optional<double> grad_clip_norm;
  // Divide each speaker's objective by its utterance count.
  bool per_utterance_average = false;

  void Validate() const;
};

// Value and gradient of one speaker's log p(x_1..x_n) with respect to the
// flow parameters and log_epsilon. Rows of x are raw (mean not removed).
struct ObjectiveGrad {
  double value = 0.0;
  std::vector<double> flow;
  Vector log_epsilon;
};

ObjectiveGrad SpeakerObjective(const NdaModel &model, const RowMatrix &x);

// Moment estimate of the per-dimension between-class variance of the
// centered training data on the sigma = 1 scale, floored at 1e-2.
Vector InitialLogEpsilon(const EmbeddingSet &train);

struct TrainResult {
  NdaModel model;
  // Mean per-speaker objective accumulated over each epoch's pass, one
  // entry per epoch.
  std::vector<double> loss_trace;
  // Number of speakers behind each optimizer step.
  std::vector<std::size_t> step_speakers;
  Vector initial_log_epsilon;
};

using EpochCallback = std::function<void(std::size_t epoch, double objective)>;

// Maximum-likelihood training over speaker-grouped mini-batches. Per-speaker
// gradients are accumulated and an Adam step is taken once
// min_speakers_before_update speakers have contributed (and at the end of
// each epoch for any remainder); the step uses the mean over those speakers.
TrainResult FitNda(const EmbeddingSet &train, FlowModel init,
                   const TrainConfig &config,
                   const EpochCallback &on_epoch = {});

}  // namespace nda

#endif  // NDA_NDA_MODEL_H_
