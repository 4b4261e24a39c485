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

#include "secmatch/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "secmatch/error.hpp"

namespace secmatch {

Dictionary::Dictionary(std::vector<std::string> id_to_token, std::vector<std::uint64_t> doc_freq,
                       std::uint64_t num_docs)
    : id_to_token_(std::move(id_to_token)), doc_freq_(std::move(doc_freq)), num_docs_(num_docs) {
  if (doc_freq_.size() != id_to_token_.size()) {
    throw Error(Errc::invariant_violation, "dictionary: doc_freq size differs from vocabulary");
  }
  token_to_id_.reserve(id_to_token_.size());
  for (TermId id = 0; id < id_to_token_.size(); ++id) {
    if (!token_to_id_.emplace(id_to_token_[id], id).second) {
      throw Error(Errc::invariant_violation, "dictionary: duplicate token " + id_to_token_[id]);
    }
    if (doc_freq_[id] < 1 || doc_freq_[id] > num_docs_) {
      throw Error(Errc::invariant_violation, "dictionary: doc_freq out of range");
    }
  }
  hash_ = sha256(encode());
}

std::optional<TermId> Dictionary::id_of(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

double Dictionary::idf(TermId id) const {
  return std::log((1.0 + static_cast<double>(num_docs_)) /
                  (1.0 + static_cast<double>(doc_freq(id)))) +
         1.0;
}

std::string Dictionary::encode() const {
  ByteWriter w;
  w.u64(id_to_token_.size());
  for (const auto& token : id_to_token_) w.string(token);
  for (auto df : doc_freq_) w.u64(df);
  w.u64(num_docs_);
  return std::move(w).bytes();
}

Dictionary Dictionary::decode(std::string_view block) {
  ByteReader r(block);
  const std::uint64_t v = r.u64();
  // Each token needs at least its 4-byte length prefix.
  if (v > r.remaining() / 4) throw Error(Errc::corrupt_container, "corrupt container");
  std::vector<std::string> tokens;
  tokens.reserve(v);
  for (std::uint64_t i = 0; i < v; ++i) tokens.push_back(r.string());
  std::vector<std::uint64_t> df(v);
  for (auto& x : df) x = r.u64();
  const std::uint64_t n = r.u64();
  if (!r.done()) throw Error(Errc::corrupt_container, "corrupt container");
  return Dictionary(std::move(tokens), std::move(df), n);
}

Dictionary build_dictionary(std::span<const CleanDocument> docs, const DictionaryOptions& options) {
  std::unordered_map<std::string, TermId> ids;
  std::vector<std::string> order;
  std::vector<std::uint64_t> df;
  std::vector<std::uint64_t> last_seen;  // 1-based doc index of last count
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& token : docs[d].tokens) {
      auto [it, inserted] = ids.try_emplace(token, static_cast<TermId>(order.size()));
      if (inserted) {
        order.push_back(token);
        df.push_back(0);
        last_seen.push_back(0);
      }
      if (last_seen[it->second] != d + 1) {
        last_seen[it->second] = d + 1;
        ++df[it->second];
      }
    }
  }

  const auto num_docs = static_cast<std::uint64_t>(docs.size());
  const double max_df = options.max_df_ratio * static_cast<double>(num_docs);
  std::vector<std::string> kept;
  std::vector<std::uint64_t> kept_df;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (df[i] < options.min_df || static_cast<double>(df[i]) > max_df) continue;
    kept.push_back(std::move(order[i]));
    kept_df.push_back(df[i]);
  }
  return Dictionary(std::move(kept), std::move(kept_df), num_docs);
}

std::uint64_t BowVector::total_count() const {
  std::uint64_t total = 0;
  for (const auto& e : entries) total += e.count;
  return total;
}

BowConversion to_bow(const CleanDocument& doc, const Dictionary& dict) {
  std::map<TermId, std::uint32_t> counts;
  BowConversion out;
  for (const auto& token : doc.tokens) {
    if (auto id = dict.id_of(token)) {
      ++counts[*id];
    } else {
      ++out.dropped;
    }
  }
  out.bow.doc_id = doc.doc_id;
  out.bow.dictionary_hash = dict.hash();
  out.bow.entries.reserve(counts.size());
  for (auto [term, count] : counts) out.bow.entries.push_back({term, count});
  return out;
}

TfidfVector to_tfidf(const BowVector& bow, const Dictionary& dict) {
  TfidfVector out;
  out.doc_id = bow.doc_id;
  out.entries.reserve(bow.entries.size());
  double sum_sq = 0.0;
  for (const auto& e : bow.entries) {
    if (e.term >= dict.size()) {
      throw Error(Errc::dictionary_mismatch, "model/dictionary mismatch");
    }
    const double w = static_cast<double>(e.count) * dict.idf(e.term);
    out.entries.push_back({e.term, w});
    sum_sq += w * w;
  }
  out.norm = std::sqrt(sum_sq);
  return out;
}

std::vector<TfidfVector> compute_tfidf(std::span<const BowVector> bows, const Dictionary& dict) {
  std::vector<TfidfVector> out;
  out.reserve(bows.size());
  for (const auto& bow : bows) out.push_back(to_tfidf(bow, dict));
  return out;
}

std::string encode_bows(std::span<const BowVector> bows) {
  ByteWriter w;
  w.u64(bows.size());
  for (const auto& bow : bows) {
    w.string(bow.doc_id);
    w.raw(std::string_view(reinterpret_cast<const char*>(bow.dictionary_hash.data()),
                           bow.dictionary_hash.size()));
    w.u64(bow.entries.size());
    for (const auto& e : bow.entries) {
      w.u32(e.term);
      w.u32(e.count);
    }
  }
  return std::move(w).bytes();
}

std::vector<BowVector> decode_bows(std::string_view bytes) {
  ByteReader r(bytes);
  const std::uint64_t n = r.u64();
  if (n > r.remaining()) throw Error(Errc::corrupt_container, "corrupt container");
  std::vector<BowVector> out(n);
  for (auto& bow : out) {
    bow.doc_id = r.string();
    auto hash = r.raw(bow.dictionary_hash.size());
    std::copy(hash.begin(), hash.end(), reinterpret_cast<char*>(bow.dictionary_hash.data()));
    const std::uint64_t m = r.u64();
    if (m > r.remaining() / 8) throw Error(Errc::corrupt_container, "corrupt container");
    bow.entries.resize(m);
    for (auto& e : bow.entries) {
      e.term = r.u32();
      e.count = r.u32();
    }
  }
  if (!r.done()) throw Error(Errc::corrupt_container, "corrupt container");
  return out;
}

}  // namespace secmatch
