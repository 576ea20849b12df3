// src/scoring.cc

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

#include "nda/scoring.h"

#include <algorithm>
#include <thread>

#include "nda/linear_gaussian.h"

namespace nda {

void CheckTrialReferences(const EmbeddingSet &set, const TrialList &trials) {
  std::vector<std::string> missing;
  std::size_t count = 0;
  auto check = [&](const std::string &id) {
    if (set.Find(id)) return;
    if (std::find(missing.begin(), missing.end(), id) != missing.end()) return;
    ++count;
    if (missing.size() < 20) missing.push_back(id);
  };
  for (const auto &t : trials) {
    for (const auto &e : t.enroll) check(e);
    check(t.test);
  }
  if (count == 0) return;
  std::string msg = std::to_string(count) + " utterance id(s) in the trial list are not in the embedding set:";
  for (const auto &id : missing) msg += " " + id;
  if (count > missing.size()) msg += " ...";
  throw InputError(msg);
}

RowMatrix BackendLatents(const ModelBundle &bundle, const EmbeddingSet &set) {
  bundle.Validate();
  if (set.dim() != bundle.in_dim())
    throw InputError("embedding dimension " + std::to_string(set.dim()) +
                     " does not match model input dimension " +
                     std::to_string(bundle.in_dim()));
  const RowMatrix x = bundle.pipeline.Apply(set).AllRows();
  if (const auto *nda = std::get_if<NdaModel>(&bundle.model)) return nda->ToLatent(x);
  return std::get<PldaModel>(bundle.model).Transform(x);
}

std::vector<double> ScoreTrials(const ModelBundle &bundle, const EmbeddingSet &set,
                                const TrialList &trials, unsigned num_threads) {
  CheckTrialReferences(set, trials);
  for (const auto &t : trials) ValidateTrial(t);
  const RowMatrix latents = BackendLatents(bundle, set);

  Vector eps;
  std::vector<std::size_t> dims;
  if (const auto *nda = std::get_if<NdaModel>(&bundle.model)) {
    eps = nda->epsilon();
    dims = nda->active_dims;
  } else {
    eps = std::get<PldaModel>(bundle.model).epsilon;
  }
  const auto cols = static_cast<std::size_t>(latents.cols());

  std::vector<double> scores(trials.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Trial &t = trials[i];
      RowMatrix enroll(static_cast<Eigen::Index>(t.enroll.size()), latents.cols());
      for (std::size_t e = 0; e < t.enroll.size(); ++e)
        enroll.row(static_cast<Eigen::Index>(e)) = latents.row(static_cast<Eigen::Index>(*set.Find(t.enroll[e])));
      std::span<const double> test(latents.row(static_cast<Eigen::Index>(*set.Find(t.test))).data(), cols);
      scores[i] = dims.empty() ? LatentLogLikelihoodRatio(eps, enroll, test)
                               : LatentLogLikelihoodRatio(eps, enroll, test, dims);
    }
  };

  unsigned n = num_threads != 0 ? num_threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, trials.size() / 256)));
  if (n <= 1) {
    work(0, trials.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (trials.size() + n - 1) / n;
    for (unsigned w = 0; w < n; ++w) {
      const std::size_t begin = std::min(trials.size(), w * chunk);
      const std::size_t end = std::min(trials.size(), begin + chunk);
      pool.emplace_back(work, begin, end);
    }
    for (auto &th : pool) th.join();
  }
  for (double s : scores)
    if (!std::isfinite(s)) throw NumericalError("non-finite trial score");
  return scores;
}

}  // namespace nda
