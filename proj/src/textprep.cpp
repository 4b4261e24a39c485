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

#include "secmatch/textprep.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "secmatch/error.hpp"
#include "secmatch/resources.hpp"

namespace secmatch {
namespace {

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

class CleanBuilder {
 public:
  explicit CleanBuilder(std::size_t hint) { out_.reserve(hint); }

  void push(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') cp = cp - 'A' + 'a';
    if (cp >= 'a' && cp <= 'z') {
      if (pending_space_ && !out_.empty()) out_.push_back(' ');
      pending_space_ = false;
      out_.push_back(static_cast<char>(cp));
    } else {
      pending_space_ = true;
    }
  }

  std::string finish() && { return std::move(out_); }

 private:
  std::string out_;
  bool pending_space_ = false;
};

PartOfSpeech parse_pos(std::string_view tag) {
  if (tag == "n") return PartOfSpeech::noun;
  if (tag == "adj") return PartOfSpeech::adjective;
  if (tag == "v") return PartOfSpeech::verb;
  if (tag == "other") return PartOfSpeech::other;
  throw Error(Errc::config, "unknown POS tag: " + std::string(tag));
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

}  // namespace

StopwordList::StopwordList(std::string id, std::string_view contents)
    : id_(std::move(id)), hash_(sha256(contents)) {
  for_each_line(contents, [&](std::string_view line) {
    if (!line.empty()) words_.emplace(line);
  });
}

bool StopwordList::contains(std::string_view token) const {
  return words_.contains(std::string(token));
}

std::vector<std::string> bundled_stopword_list_ids() { return {"english", "english_web"}; }

const StopwordList& stopword_list(std::string_view id) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<StopwordList>, std::less<>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(id); it != cache.end()) return *it->second;
  const std::string path = "stopwords/" + std::string(id) + ".txt";
  if (id.empty() || id.find('/') != std::string_view::npos || !has_bundled_resource(path)) {
    throw Error(Errc::config, "unknown stopword list: " + std::string(id));
  }
  auto list = std::make_unique<StopwordList>(std::string(id), bundled_resource(path));
  return *cache.emplace(std::string(id), std::move(list)).first->second;
}

Lexicon::Lexicon(std::string_view lemma_tsv, std::string_view pos_tsv) {
  auto split = [](std::string_view line, std::string_view& key, std::string_view& value) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) return false;
    key = line.substr(0, tab);
    value = line.substr(tab + 1);
    return !key.empty() && !value.empty();
  };
  for_each_line(lemma_tsv, [&](std::string_view line) {
    std::string_view k, v;
    if (split(line, k, v)) lemmas_.emplace(k, v);
  });
  for_each_line(pos_tsv, [&](std::string_view line) {
    std::string_view k, v;
    if (split(line, k, v)) pos_.emplace(k, parse_pos(v));
  });
}

const Lexicon& Lexicon::bundled() {
  static const Lexicon lexicon(bundled_resource("lexicon/lemma_exceptions.tsv"),
                               bundled_resource("lexicon/pos.tsv"));
  return lexicon;
}

std::optional<std::string_view> Lexicon::lemma(std::string_view token) const {
  auto it = lemmas_.find(std::string(token));
  if (it == lemmas_.end()) return std::nullopt;
  return std::string_view(it->second);
}

std::optional<PartOfSpeech> Lexicon::pos(std::string_view token) const {
  auto it = pos_.find(std::string(token));
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

std::string clean_text(std::string_view raw) {
  CleanBuilder out(raw.size());
  if (is_ascii(raw)) {
    for (char c : raw) out.push(static_cast<char32_t>(c));
    return std::move(out).finish();
  }
  // Invalid UTF-8 decodes to U+FFFD, which the builder turns into a space.
  const icu::UnicodeString decoded =
      icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString normalized;
  if (U_SUCCESS(status)) normalized = nfc->normalize(decoded, status);
  if (U_FAILURE(status)) normalized = decoded;
  for (int32_t i = 0; i < normalized.length(); i = normalized.moveIndex32(i, 1)) {
    out.push(static_cast<char32_t>(normalized.char32At(i)));
  }
  return std::move(out).finish();
}

std::vector<std::string> tokenize(std::string_view cleaned, std::size_t min_token_len) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= cleaned.size()) {
    auto end = cleaned.find(' ', start);
    if (end == std::string_view::npos) end = cleaned.size();
    if (end - start >= min_token_len && end > start) {
      tokens.emplace_back(cleaned.substr(start, end - start));
    }
    start = end + 1;
  }
  return tokens;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const PrepConfig& config) {
  const StopwordList& stopwords = stopword_list(config.stopword_list_id);
  std::erase_if(tokens, [&](const std::string& t) { return stopwords.contains(t); });
  return tokens;
}

std::string lemma_of(std::string_view token, const Lexicon& lexicon) {
  if (auto lemma = lexicon.lemma(token)) return std::string(*lemma);
  const std::size_t n = token.size();
  auto drop = [&](std::size_t k, std::string_view add = {}) {
    std::string out(token.substr(0, n - k));
    out.append(add);
    return out;
  };
  if (ends_with(token, "sses")) return drop(2);
  if (ends_with(token, "ies") && n >= 5) return drop(3, "y");
  if ((ends_with(token, "ches") || ends_with(token, "shes") || ends_with(token, "xes") ||
       ends_with(token, "oes")) &&
      n >= 5) {
    return drop(2);
  }
  if (ends_with(token, "ss") || ends_with(token, "us") || ends_with(token, "is")) {
    return std::string(token);
  }
  if (ends_with(token, "es") && n >= 4) return drop(1);
  if (n >= 4 && token.back() == 's' && !is_vowel(token[n - 2])) return drop(1);
  return std::string(token);
}

std::vector<std::string> lemmatize(std::vector<std::string> tokens, const PrepConfig& config) {
  const Lexicon& lexicon = Lexicon::bundled();
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& token : tokens) {
    std::string lemma = lemma_of(token, lexicon);
    if (config.pos_filter_enabled) {
      auto tag = lexicon.pos(lemma);
      if (!tag) tag = lexicon.pos(token);
      if (tag && *tag != PartOfSpeech::noun && *tag != PartOfSpeech::adjective) continue;
    }
    out.push_back(std::move(lemma));
  }
  return out;
}

CleanDocument preprocess_document(const RawDocument& raw, const PrepConfig& config) {
  if (config.min_token_len < 1) throw Error(Errc::config, "min_token_len must be >= 1");
  const StopwordList& stopwords = stopword_list(config.stopword_list_id);

  auto tokens = tokenize(clean_text(raw.raw_text), config.min_token_len);
  tokens = lemmatize(remove_stopwords(std::move(tokens), config), config);
  // A lemma can land on a stopword ("cans" -> "can") or get shorter; drop
  // those so the output re-preprocesses to itself.
  std::erase_if(tokens, [&](const std::string& t) {
    return t.size() < config.min_token_len || stopwords.contains(t);
  });

  CleanDocument doc;
  doc.doc_id = raw.doc_id;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) doc.summary.push_back(' ');
    doc.summary += tokens[i];
  }
  doc.tokens = std::move(tokens);
  return doc;
}

Digest prep_fingerprint(const PrepConfig& config) {
  if (config.min_token_len < 1) throw Error(Errc::config, "min_token_len must be >= 1");
  return stopword_list(config.stopword_list_id).content_hash();
}

}  // namespace secmatch
