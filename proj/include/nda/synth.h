// nda/synth.h

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

#ifndef NDA_SYNTH_H_
#define NDA_SYNTH_H_

#include <cstdint>
#include <span>
#include <string>

#include "nda/types.h"
#include "nda/vecstore.h"

namespace nda {

enum class WarpKind { kIdentity, kSinhArcsinh, kRotationThenCubic };

const char *WarpKindName(WarpKind kind);
WarpKind ParseWarpKind(const std::string &name);  // throws InputError

struct Warp {
  WarpKind kind = WarpKind::kIdentity;
  double skew = 0.0;      // sinh-arcsinh only
  double tail = 1.0;      // sinh-arcsinh only, > 0; < 1 gives heavy tails
  double strength = 0.0;  // rotation_then_cubic only, >= 0
};

struct SynthSpec {
  std::size_t dim = 32;
  std::size_t n_train_speakers = 500;
  std::size_t n_eval_speakers = 100;
  std::size_t utts_per_speaker = 20;
  Vector prior_variances;  // empty: all ones
  Warp warp;
  std::uint64_t seed = 0;
  std::size_t nontargets_per_target = 5;

  Vector PriorVariances() const;
  void Validate() const;
};

// The true generative model: z ~ N(mu, I), mu ~ N(0, diag(prior)), x = f(z).
struct OracleModel {
  Warp warp;
  Matrix rotation;  // dim x dim, rotation_then_cubic only
  Vector prior_variances;

  std::size_t dim() const { return static_cast<std::size_t>(prior_variances.size()); }

  Vector Apply(std::span<const double> z) const;
  Vector Invert(std::span<const double> x) const;
  RowMatrix InvertRows(const RowMatrix &x) const;
  // log |det d f^-1 / dx| at x.
  double InverseLogDet(std::span<const double> x) const;

  void Validate() const;
};

struct Corpus {
  EmbeddingSet train{1};
  EmbeddingSet eval{1};
  TrialList trials;
  OracleModel oracle;
};

// Each eval speaker's first utterance enrolls, the rest are target tests.
// Every target trial is accompanied by nontargets_per_target trials that
// pair the same enrollment with a random test of another speaker.
Corpus GenerateCorpus(const SynthSpec &spec);

// Log LR computed with the true warp and prior.
double OracleScore(const OracleModel &oracle, const RowMatrix &enroll,
                   std::span<const double> test);

// Random orthogonal matrix, Haar distributed (QR with sign fix).
Matrix RandomOrthogonal(std::size_t dim, std::uint64_t seed);

}  // namespace nda

#endif  // NDA_SYNTH_H_
