// Copyright 2026 The secmatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "secmatch/binary.hpp"
#include "secmatch/crypto.hpp"
#include "secmatch/textprep.hpp"

namespace secmatch {

using TermId = std::uint32_t;

// Vocabulary with dense ids assigned in order of first appearance.
class Dictionary {
 public:
  Dictionary() : Dictionary(std::vector<std::string>{}, {}, 0) {}
  // Throws Error(invariant_violation) when the arrays are inconsistent.
  Dictionary(std::vector<std::string> id_to_token, std::vector<std::uint64_t> doc_freq,
             std::uint64_t num_docs);

  std::size_t size() const { return id_to_token_.size(); }
  std::uint64_t num_docs() const { return num_docs_; }
  std::optional<TermId> id_of(std::string_view token) const;
  const std::string& token(TermId id) const { return id_to_token_.at(id); }
  std::uint64_t doc_freq(TermId id) const { return doc_freq_.at(id); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }
  const std::vector<std::uint64_t>& doc_freqs() const { return doc_freq_; }

  // Smoothed idf: ln((1 + N) / (1 + df)) + 1.
  double idf(TermId id) const;

  // SHA-256 of the serialized block; binds models to this vocabulary.
  const Digest& hash() const { return hash_; }

  // u64 V, V length-prefixed UTF-8 tokens in id order, V u64 doc
  // frequencies, u64 num_docs.
  std::string encode() const;
  static Dictionary decode(std::string_view block);

  bool operator==(const Dictionary& other) const {
    return id_to_token_ == other.id_to_token_ && doc_freq_ == other.doc_freq_ &&
           num_docs_ == other.num_docs_;
  }

 private:
  std::unordered_map<std::string, TermId> token_to_id_;
  std::vector<std::string> id_to_token_;
  std::vector<std::uint64_t> doc_freq_;
  std::uint64_t num_docs_ = 0;
  Digest hash_{};
};

struct DictionaryOptions {
  std::uint64_t min_df = 1;
  double max_df_ratio = 1.0;
};

Dictionary build_dictionary(std::span<const CleanDocument> docs,
                            const DictionaryOptions& options = {});

struct TermCount {
  TermId term = 0;
  std::uint32_t count = 0;
  bool operator==(const TermCount&) const = default;
};

struct BowVector {
  std::string doc_id;
  // Strictly ascending by term.
  std::vector<TermCount> entries;
  // Hash of the dictionary the vector was indexed against.
  Digest dictionary_hash{};

  std::uint64_t total_count() const;
  bool operator==(const BowVector&) const = default;
};

struct BowConversion {
  BowVector bow;
  // Out-of-vocabulary tokens skipped.
  std::size_t dropped = 0;
};

BowConversion to_bow(const CleanDocument& doc, const Dictionary& dict);

struct TermWeight {
  TermId term = 0;
  double weight = 0.0;
  bool operator==(const TermWeight&) const = default;
};

struct TfidfVector {
  std::string doc_id;
  std::vector<TermWeight> entries;
  double norm = 0.0;
  bool operator==(const TfidfVector&) const = default;
};

// Raw-count tf times smoothed idf; vectors are not normalized.
TfidfVector to_tfidf(const BowVector& bow, const Dictionary& dict);
std::vector<TfidfVector> compute_tfidf(std::span<const BowVector> bows, const Dictionary& dict);

// Serialization of bag-of-words rows, used by the store.
std::string encode_bows(std::span<const BowVector> bows);
std::vector<BowVector> decode_bows(std::string_view bytes);

}  // namespace secmatch
