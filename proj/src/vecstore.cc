// src/vecstore.cc

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

#include "nda/vecstore.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nda/random.h"

namespace nda {

EmbeddingSet::EmbeddingSet(std::size_t dim) : dim_(dim) {}

void EmbeddingSet::Add(std::string utt_id, std::string speaker_id,
                       std::vector<double> vector) {
  if (utt_id.empty()) throw InputError("empty utterance id");
  if (vector.size() != dim_)
    throw InputError("utterance '" + utt_id + "' has dimension " +
                     std::to_string(vector.size()) + ", expected " +
                     std::to_string(dim_));
  for (double v : vector)
    if (!std::isfinite(v))
      throw InputError("utterance '" + utt_id + "' has a non-finite value");
  if (index_.count(utt_id) != 0)
    throw InputError("duplicate utterance id '" + utt_id + "'");
  index_.emplace(utt_id, records_.size());
  records_.push_back({std::move(utt_id), std::move(speaker_id), std::move(vector)});
}

std::optional<std::size_t> EmbeddingSet::Find(std::string_view utt_id) const {
  auto it = index_.find(std::string(utt_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> EmbeddingSet::Speakers() const {
  std::vector<std::string> out;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto &r : records_)
    if (seen.emplace(r.speaker_id, out.size()).second) out.push_back(r.speaker_id);
  return out;
}

std::vector<std::vector<std::size_t>> EmbeddingSet::GroupBySpeaker() const {
  std::vector<std::vector<std::size_t>> groups;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto [it, inserted] = slot.emplace(records_[i].speaker_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

RowMatrix EmbeddingSet::Rows(std::span<const std::size_t> indices) const {
  RowMatrix out(static_cast<Eigen::Index>(indices.size()),
                static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto &v = records_.at(indices[r]).vector;
    std::copy(v.begin(), v.end(), out.row(static_cast<Eigen::Index>(r)).data());
  }
  return out;
}

RowMatrix EmbeddingSet::AllRows() const {
  RowMatrix out(static_cast<Eigen::Index>(records_.size()),
                static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < records_.size(); ++r)
    std::copy(records_[r].vector.begin(), records_[r].vector.end(),
              out.row(static_cast<Eigen::Index>(r)).data());
  return out;
}

EmbeddingSet EmbeddingSet::WithVectors(const RowMatrix &vectors) const {
  if (static_cast<std::size_t>(vectors.rows()) != records_.size())
    throw InputError("row count does not match the set size");
  EmbeddingSet out(static_cast<std::size_t>(vectors.cols()));
  out.Reserve(records_.size());
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const auto row = vectors.row(static_cast<Eigen::Index>(r));
    out.Add(records_[r].utt_id, records_[r].speaker_id,
            std::vector<double>(row.data(), row.data() + row.size()));
  }
  return out;
}

bool operator==(const EmbeddingSet &a, const EmbeddingSet &b) {
  if (a.dim_ != b.dim_ || a.records_.size() != b.records_.size()) return false;
  for (std::size_t i = 0; i < a.records_.size(); ++i) {
    const auto &x = a.records_[i];
    const auto &y = b.records_[i];
    if (x.utt_id != y.utt_id || x.speaker_id != y.speaker_id) return false;
    // bitwise so that round-trip tests are exact, including -0.0
    for (std::size_t j = 0; j < x.vector.size(); ++j)
      if (std::bit_cast<std::uint64_t>(x.vector[j]) !=
          std::bit_cast<std::uint64_t>(y.vector[j]))
        return false;
  }
  return true;
}

EmbeddingFormat FormatFromPath(std::string_view path) {
  return path.ends_with(".csv") ? EmbeddingFormat::kCsv
                                : EmbeddingFormat::kBinary;
}

namespace {

constexpr char kMagic[4] = {'N', 'D', 'A', 'E'};
constexpr std::uint8_t kBinaryVersion = 1;

template <typename T>
void PutLe(std::ostream &os, T value) {
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  os.write(bytes, sizeof(T));
}

template <typename T>
T GetLe(std::istream &is, const char *what) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char *>(bytes), sizeof(T)))
    throw InputError(std::string("truncated binary embedding file while reading ") + what);
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(static_cast<T>(bytes[i]) << (8 * i));
  return value;
}

void PutString(std::ostream &os, const std::string &s) {
  if (s.size() > 0xffff) throw InputError("identifier longer than 65535 bytes");
  PutLe<std::uint16_t>(os, static_cast<std::uint16_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetString(std::istream &is, const char *what) {
  const auto len = GetLe<std::uint16_t>(is, what);
  std::string s(len, '\0');
  if (len > 0 && !is.read(s.data(), len))
    throw InputError(std::string("truncated binary embedding file while reading ") + what);
  return s;
}

void WriteBinary(const EmbeddingSet &set, std::ostream &os) {
  os.write(kMagic, 4);
  PutLe<std::uint8_t>(os, kBinaryVersion);
  PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(set.size()));
  PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(set.dim()));
  for (const auto &r : set.records()) {
    PutString(os, r.utt_id);
    PutString(os, r.speaker_id);
    for (double v : r.vector) PutLe<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  }
}

EmbeddingSet ReadBinary(std::istream &is) {
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic))
    throw InputError("not a binary embedding file (bad magic)");
  const auto version = GetLe<std::uint8_t>(is, "version");
  if (version != kBinaryVersion)
    throw InputError("unsupported binary embedding version " + std::to_string(version));
  const auto count = GetLe<std::uint32_t>(is, "record count");
  const auto dim = GetLe<std::uint32_t>(is, "dimension");
  EmbeddingSet set(dim);
  set.Reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    std::string utt = GetString(is, "utterance id");
    std::string spk = GetString(is, "speaker id");
    std::vector<double> v(dim);
    for (auto &x : v) x = std::bit_cast<double>(GetLe<std::uint64_t>(is, "vector"));
    try {
      set.Add(std::move(utt), std::move(spk), std::move(v));
    } catch (const InputError &e) {
      throw InputError("record " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  return set;
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double ParseDouble(std::string_view text, std::size_t row) {
  text = Trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InputError("row " + std::to_string(row) + ": cannot parse '" +
                     std::string(text) + "' as a number");
  return value;
}

EmbeddingSet ReadCsv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("empty CSV file (missing header)");
  auto header = SplitCsv(Trim(line));
  if (header.size() < 2 || Trim(header[0]) != "utt" || Trim(header[1]) != "speaker")
    throw InputError("CSV header must start with 'utt,speaker'");
  const std::size_t header_dim = header.size() - 2;
  std::optional<EmbeddingSet> set;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    ++row;
    auto fields = SplitCsv(view);
    if (fields.size() < 3)
      throw InputError("row " + std::to_string(row) + ": expected utt,speaker,values");
    const std::size_t n = fields.size() - 2;
    // dimension comes from the first record; the header must agree with it
    if (!set) {
      if (n != header_dim)
        throw InputError("row 1: " + std::to_string(n) +
                         " values but header declares " + std::to_string(header_dim));
      set.emplace(n);
    } else if (n != set->dim()) {
      throw InputError("row " + std::to_string(row) + ": " + std::to_string(n) +
                       " values, expected " + std::to_string(set->dim()));
    }
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = ParseDouble(fields[j + 2], row);
    try {
      set->Add(std::string(Trim(fields[0])), std::string(Trim(fields[1])), std::move(v));
    } catch (const InputError &e) {
      throw InputError("row " + std::to_string(row) + ": " + e.what());
    }
  }
  if (!set) set.emplace(header_dim);
  return std::move(*set);
}

void WriteCsv(const EmbeddingSet &set, std::ostream &os) {
  os << "utt,speaker";
  for (std::size_t j = 0; j < set.dim(); ++j) os << ",v" << j;
  os << '\n';
  char buf[64];
  for (const auto &r : set.records()) {
    os << r.utt_id << ',' << r.speaker_id;
    for (double v : r.vector) {
      auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
      os << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    os << '\n';
  }
}

std::ifstream OpenIn(const std::string &path, bool binary) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw InputError("cannot open '" + path + "' for reading");
  return is;
}

std::ofstream OpenOut(const std::string &path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

EmbeddingSet ReadEmbeddingSet(std::istream &is, EmbeddingFormat format) {
  return format == EmbeddingFormat::kCsv ? ReadCsv(is) : ReadBinary(is);
}

EmbeddingSet ReadEmbeddingSet(const std::string &path, EmbeddingFormat format) {
  auto is = OpenIn(path, format == EmbeddingFormat::kBinary);
  try {
    return ReadEmbeddingSet(is, format);
  } catch (const InputError &e) {
    throw InputError(path + ": " + e.what());
  }
}

EmbeddingSet ReadEmbeddingSet(const std::string &path) {
  return ReadEmbeddingSet(path, FormatFromPath(path));
}

void WriteEmbeddingSet(const EmbeddingSet &set, std::ostream &os,
                       EmbeddingFormat format) {
  if (format == EmbeddingFormat::kCsv)
    WriteCsv(set, os);
  else
    WriteBinary(set, os);
  if (!os) throw std::runtime_error("write failed");
}

void WriteEmbeddingSet(const EmbeddingSet &set, const std::string &path,
                       EmbeddingFormat format) {
  auto os = OpenOut(path, format == EmbeddingFormat::kBinary);
  WriteEmbeddingSet(set, os, format);
}

void WriteEmbeddingSet(const EmbeddingSet &set, const std::string &path) {
  WriteEmbeddingSet(set, path, FormatFromPath(path));
}

void ValidateTrial(const Trial &trial) {
  if (trial.enroll.empty()) throw InputError("trial has no enrollment utterances");
  for (const auto &e : trial.enroll) {
    if (e.empty()) throw InputError("trial has an empty enrollment id");
    if (e == trial.test)
      throw InputError("trial lists test utterance '" + trial.test +
                       "' among its enrollments");
  }
  if (trial.test.empty()) throw InputError("trial has an empty test id");
}

TrialList ReadTrialList(std::istream &is) {
  TrialList trials;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string enroll, test, label, extra;
    if (!(fields >> enroll)) continue;
    if (enroll.front() == '#') continue;
    auto fail = [&](const std::string &msg) {
      return InputError("trial line " + std::to_string(line_no) + ": " + msg);
    };
    if (!(fields >> test >> label)) throw fail("expected 'enroll test label'");
    if (fields >> extra) throw fail("unexpected trailing field '" + extra + "'");
    Trial t;
    for (auto part : SplitCsv(enroll)) {
      if (part.empty()) throw fail("empty enrollment field");
      t.enroll.emplace_back(part);
    }
    t.test = test;
    if (label == "target")
      t.is_target = true;
    else if (label == "nontarget")
      t.is_target = false;
    else
      throw fail("unknown label '" + label + "'");
    try {
      ValidateTrial(t);
    } catch (const InputError &e) {
      throw fail(e.what());
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

TrialList ReadTrialList(const std::string &path) {
  auto is = OpenIn(path, false);
  try {
    return ReadTrialList(is);
  } catch (const InputError &e) {
    throw InputError(path + ": " + e.what());
  }
}

void WriteTrialList(const TrialList &trials, std::ostream &os) {
  for (const auto &t : trials) {
    for (std::size_t i = 0; i < t.enroll.size(); ++i)
      os << (i ? "," : "") << t.enroll[i];
    os << ' ' << t.test << ' ' << (t.is_target ? "target" : "nontarget") << '\n';
  }
}

void WriteTrialList(const TrialList &trials, const std::string &path) {
  auto os = OpenOut(path, false);
  WriteTrialList(trials, os);
}

std::vector<SpeakerBatch> PartitionSpeakerBatches(const EmbeddingSet &set,
                                                  std::size_t speakers_per_batch,
                                                  std::uint64_t seed) {
  if (speakers_per_batch == 0) throw InputError("speakers_per_batch must be >= 1");
  for (const auto &r : set.records())
    if (r.speaker_id.empty())
      throw InputError("utterance '" + r.utt_id + "' has no speaker label");
  auto groups = set.GroupBySpeaker();
  auto speakers = set.Speakers();
  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order.begin(), order.end());

  std::vector<SpeakerBatch> batches;
  for (std::size_t start = 0; start < order.size(); start += speakers_per_batch) {
    SpeakerBatch batch;
    const std::size_t end = std::min(order.size(), start + speakers_per_batch);
    for (std::size_t i = start; i < end; ++i) {
      const std::size_t g = order[i];
      batch.groups.push_back({speakers[g], set.Rows(groups[g])});
    }
    batch.total_speakers = batch.groups.size();
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace nda
