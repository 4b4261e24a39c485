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

#include <gtest/gtest.h>

#include <cmath>

#include "secmatch/corpus.hpp"
#include "secmatch/error.hpp"
#include "testing.hpp"

namespace secmatch {
namespace {

CleanDocument doc(std::string id, std::vector<std::string> tokens) {
  return {std::move(id), "", std::move(tokens)};
}

std::vector<CleanDocument> small_corpus() {
  return {doc("a", {"malware", "server", "malware"}),
          doc("b", {"server", "patch"}),
          doc("c", {"phishing", "server", "lure"})};
}

TEST(Dictionary, IdsFollowFirstAppearance) {
  const auto docs = small_corpus();
  const Dictionary dict = build_dictionary(docs);
  EXPECT_EQ(dict.tokens(),
            (std::vector<std::string>{"malware", "server", "patch", "phishing", "lure"}));
  EXPECT_EQ(dict.doc_freqs(), (std::vector<std::uint64_t>{1, 3, 1, 1, 1}));
  EXPECT_EQ(dict.num_docs(), 3u);
  EXPECT_EQ(dict.id_of("patch"), TermId{2});
  EXPECT_FALSE(dict.id_of("absent").has_value());
}

TEST(Dictionary, PruningCompactsIds) {
  const auto docs = small_corpus();
  const Dictionary min2 = build_dictionary(docs, {2, 1.0});
  EXPECT_EQ(min2.tokens(), (std::vector<std::string>{"server"}));
  const Dictionary no_common = build_dictionary(docs, {1, 0.5});
  EXPECT_EQ(no_common.tokens(),
            (std::vector<std::string>{"malware", "patch", "phishing", "lure"}));
  EXPECT_EQ(no_common.id_of("lure"), TermId{3});
}

TEST(Dictionary, IdfMatchesSmoothedFormula) {
  const auto docs = small_corpus();
  const Dictionary dict = build_dictionary(docs);
  EXPECT_DOUBLE_EQ(dict.idf(*dict.id_of("server")), std::log(4.0 / 4.0) + 1.0);
  EXPECT_DOUBLE_EQ(dict.idf(*dict.id_of("malware")), std::log(4.0 / 2.0) + 1.0);
  EXPECT_DOUBLE_EQ(dict.idf(*dict.id_of("server")), 1.0);
}

TEST(Dictionary, EncodeDecodeRoundTrip) {
  const auto docs = small_corpus();
  const Dictionary dict = build_dictionary(docs);
  const Dictionary back = Dictionary::decode(dict.encode());
  EXPECT_EQ(back, dict);
  EXPECT_EQ(back.hash(), dict.hash());
  EXPECT_EQ(back.id_of("lure"), dict.id_of("lure"));
}

TEST(Dictionary, HashDependsOnContent) {
  auto docs = small_corpus();
  const Dictionary a = build_dictionary(docs);
  docs[1].tokens.push_back("extra");
  const Dictionary b = build_dictionary(docs);
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Dictionary, RejectsInconsistentArrays) {
  EXPECT_THROW(Dictionary({"a", "b"}, {1}, 1), Error);
  EXPECT_THROW(Dictionary({"a", "a"}, {1, 1}, 1), Error);
  EXPECT_THROW(Dictionary({"a"}, {2}, 1), Error);
}

TEST(Dictionary, DecodeRejectsTruncation) {
  const auto docs = small_corpus();
  const std::string bytes = build_dictionary(docs).encode();
  try {
    Dictionary::decode(std::string_view(bytes).substr(0, bytes.size() - 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::corrupt_container);
  }
}

TEST(Bow, CountsAscendingAndDropsUnknown) {
  const auto docs = small_corpus();
  const Dictionary dict = build_dictionary(docs);
  const auto conv = to_bow(doc("q", {"lure", "malware", "unknown", "malware", "other"}), dict);
  EXPECT_EQ(conv.dropped, 2u);
  EXPECT_EQ(conv.bow.doc_id, "q");
  EXPECT_EQ(conv.bow.entries, (std::vector<TermCount>{{0, 2}, {4, 1}}));
  EXPECT_EQ(conv.bow.total_count(), 3u);
  EXPECT_EQ(conv.bow.dictionary_hash, dict.hash());
}

TEST(Tfidf, WeightsAreCountTimesIdf) {
  const auto docs = small_corpus();
  const Dictionary dict = build_dictionary(docs);
  const auto bow = to_bow(docs[0], dict).bow;
  const TfidfVector v = to_tfidf(bow, dict);
  const double w_malware = 2.0 * (std::log(2.0) + 1.0);
  const double w_server = 1.0;
  ASSERT_EQ(v.entries.size(), 2u);
  EXPECT_DOUBLE_EQ(v.entries[0].weight, w_malware);
  EXPECT_DOUBLE_EQ(v.entries[1].weight, w_server);
  EXPECT_DOUBLE_EQ(v.norm, std::sqrt(w_malware * w_malware + w_server * w_server));
}

TEST(Tfidf, TermOutsideDictionaryIsMismatch) {
  const auto docs = small_corpus();
  const Dictionary dict = build_dictionary(docs);
  BowVector bad{"x", {{99, 1}}, dict.hash()};
  try {
    to_tfidf(bad, dict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dictionary_mismatch);
  }
}

TEST(Bow, EncodeDecodeRoundTrip) {
  const auto docs = small_corpus();
  const auto v = testing::vectorize_docs(docs);
  EXPECT_EQ(decode_bows(encode_bows(v.bows)), v.bows);
  EXPECT_TRUE(decode_bows(encode_bows({})).empty());
  const std::string bytes = encode_bows(v.bows);
  EXPECT_THROW(decode_bows(std::string_view(bytes).substr(0, bytes.size() - 1)), Error);
}

}  // namespace
}  // namespace secmatch
