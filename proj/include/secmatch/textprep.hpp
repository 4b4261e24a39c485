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

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "secmatch/crypto.hpp"
#include "secmatch/timeutil.hpp"

namespace secmatch {

struct RawDocument {
  std::string doc_id;
  // URL or uploaded filename.
  std::string source;
  std::string raw_text;
  std::optional<Timestamp> retrieved_at;
};

struct CleanDocument {
  std::string doc_id;
  std::string summary;
  std::vector<std::string> tokens;

  bool operator==(const CleanDocument&) const = default;
};

struct PrepConfig {
  std::string stopword_list_id = "english";
  // Keep only tokens tagged noun/adjective by the POS lexicon. Tokens the
  // lexicon does not know are kept.
  bool pos_filter_enabled = false;
  std::size_t min_token_len = 2;

  bool operator==(const PrepConfig&) const = default;
};

class StopwordList {
 public:
  StopwordList(std::string id, std::string_view contents);

  const std::string& id() const { return id_; }
  const Digest& content_hash() const { return hash_; }
  bool contains(std::string_view token) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::string id_;
  Digest hash_;
  std::unordered_set<std::string> words_;
};

// Resolves a bundled list ("english", "english_web"). Throws Error(config)
// for unknown ids.
const StopwordList& stopword_list(std::string_view id);
std::vector<std::string> bundled_stopword_list_ids();

enum class PartOfSpeech { noun, adjective, verb, other };

// Exception lexicon (token -> lemma) and POS lexicon (token -> tag), both
// loaded from the bundled TSV files.
class Lexicon {
 public:
  Lexicon(std::string_view lemma_tsv, std::string_view pos_tsv);

  static const Lexicon& bundled();

  std::optional<std::string_view> lemma(std::string_view token) const;
  std::optional<PartOfSpeech> pos(std::string_view token) const;

 private:
  std::unordered_map<std::string, std::string> lemmas_;
  std::unordered_map<std::string, PartOfSpeech> pos_;
};

// NFC-normalize, lowercase, map everything except ASCII letters to spaces,
// collapse and trim whitespace.
std::string clean_text(std::string_view raw);

std::vector<std::string> tokenize(std::string_view cleaned,
                                  std::size_t min_token_len = 2);

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const PrepConfig& config);

// Lemma of a single token: exception lexicon first, then the plural suffix
// rules.
std::string lemma_of(std::string_view token, const Lexicon& lexicon = Lexicon::bundled());

std::vector<std::string> lemmatize(std::vector<std::string> tokens,
                                   const PrepConfig& config);

CleanDocument preprocess_document(const RawDocument& raw, const PrepConfig& config);

// Validates config and returns the content hash of its stopword list.
Digest prep_fingerprint(const PrepConfig& config);

}  // namespace secmatch
