// nda/vecstore.h

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

#ifndef NDA_VECSTORE_H_
#define NDA_VECSTORE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nda/types.h"

namespace nda {

struct EmbeddingRecord {
  std::string utt_id;
  std::string speaker_id;  // empty means unlabeled
  std::vector<double> vector;
};

// A labeled set of fixed-dimension vectors. Records are validated on Add
// (length == dim, finite values, unique utt_id) so a constructed set always
// satisfies its invariants.
class EmbeddingSet {
 public:
  explicit EmbeddingSet(std::size_t dim);

  void Add(std::string utt_id, std::string speaker_id,
           std::vector<double> vector);
  void Reserve(std::size_t n) { records_.reserve(n); }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const EmbeddingRecord &operator[](std::size_t i) const { return records_[i]; }
  std::span<const EmbeddingRecord> records() const { return records_; }

  std::optional<std::size_t> Find(std::string_view utt_id) const;

  // Speaker ids in order of first appearance, and the record indices of each.
  std::vector<std::string> Speakers() const;
  std::vector<std::vector<std::size_t>> GroupBySpeaker() const;

  // Stack the given records (all records if empty) into an n x dim matrix.
  RowMatrix Rows(std::span<const std::size_t> indices) const;
  RowMatrix AllRows() const;

  // Same labels, new vectors (one row per record, any dimension).
  EmbeddingSet WithVectors(const RowMatrix &vectors) const;

  friend bool operator==(const EmbeddingSet &a, const EmbeddingSet &b);

 private:
  std::size_t dim_;
  std::vector<EmbeddingRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class EmbeddingFormat { kCsv, kBinary };

// Picks the format from the extension: ".csv" is CSV, anything else binary.
EmbeddingFormat FormatFromPath(std::string_view path);

EmbeddingSet ReadEmbeddingSet(std::istream &is, EmbeddingFormat format);
EmbeddingSet ReadEmbeddingSet(const std::string &path, EmbeddingFormat format);
EmbeddingSet ReadEmbeddingSet(const std::string &path);
void WriteEmbeddingSet(const EmbeddingSet &set, std::ostream &os,
                       EmbeddingFormat format);
void WriteEmbeddingSet(const EmbeddingSet &set, const std::string &path,
                       EmbeddingFormat format);
void WriteEmbeddingSet(const EmbeddingSet &set, const std::string &path);

struct Trial {
  std::vector<std::string> enroll;
  std::string test;
  bool is_target = false;
};

using TrialList = std::vector<Trial>;

// Lines of "enroll[,enroll...] test target|nontarget". Blank lines and lines
// starting with '#' are skipped.
TrialList ReadTrialList(std::istream &is);
TrialList ReadTrialList(const std::string &path);
void WriteTrialList(const TrialList &trials, std::ostream &os);
void WriteTrialList(const TrialList &trials, const std::string &path);
void ValidateTrial(const Trial &trial);

struct SpeakerGroup {
  std::string speaker_id;
  RowMatrix vectors;
};

struct SpeakerBatch {
  std::vector<SpeakerGroup> groups;
  std::size_t total_speakers = 0;
};

// One epoch of speaker-grouped mini-batches. Speakers are shuffled by seed;
// every speaker lands whole in exactly one batch; the last may be short.
std::vector<SpeakerBatch> PartitionSpeakerBatches(const EmbeddingSet &set,
                                                  std::size_t speakers_per_batch,
                                                  std::uint64_t seed);

}  // namespace nda

#endif  // NDA_VECSTORE_H_
