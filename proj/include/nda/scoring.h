// nda/scoring.h

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

#ifndef NDA_SCORING_H_
#define NDA_SCORING_H_

#include <vector>

#include "nda/serialize.h"
#include "nda/vecstore.h"

namespace nda {

// Throws InputError listing (up to 20 of) the utterance ids that trials
// reference but the set lacks.
void CheckTrialReferences(const EmbeddingSet &set, const TrialList &trials);

// Back-end space representation of every record in set: the pipeline
// output mapped through the PLDA transform or the NDA flow inverse.
RowMatrix BackendLatents(const ModelBundle &bundle, const EmbeddingSet &set);

// Log LR per trial, in trial order. Trials are split across worker threads
// (0 = hardware concurrency); each score depends on its own trial only, so
// the output does not depend on the thread count or the trial order.
std::vector<double> ScoreTrials(const ModelBundle &bundle, const EmbeddingSet &set,
                                const TrialList &trials, unsigned num_threads = 0);

}  // namespace nda

#endif  // NDA_SCORING_H_
