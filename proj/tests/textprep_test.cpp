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

#include "golden_cases.hpp"
#include "secmatch/error.hpp"
#include "secmatch/textprep.hpp"

namespace secmatch {
namespace {

CleanDocument prep(std::string_view text, const PrepConfig& config = {}) {
  return preprocess_document({"doc", "test", std::string(text), std::nullopt}, config);
}

class Golden : public ::testing::TestWithParam<testing::GoldenCase> {};

TEST_P(Golden, Tokens) {
  const auto& c = GetParam();
  const CleanDocument doc = prep(c.input, c.config);
  EXPECT_EQ(doc.tokens, c.tokens);
}

INSTANTIATE_TEST_SUITE_P(Pinned, Golden, ::testing::ValuesIn(testing::golden_cases()),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(CleanText, LowercasesAndCollapses) {
  EXPECT_EQ(clean_text("  Hello,\tWORLD!!  "), "hello world");
  EXPECT_EQ(clean_text("a1b2c3"), "a b c");
  EXPECT_EQ(clean_text(""), "");
  EXPECT_EQ(clean_text("123 456"), "");
}

TEST(CleanText, NormalizesBeforeFiltering) {
  // Decomposed and precomposed e-acute clean identically.
  EXPECT_EQ(clean_text("cafe\xcc\x81 bar"), clean_text("caf\xc3\xa9 bar"));
}

TEST(CleanText, InvalidUtf8DoesNotThrow) {
  EXPECT_EQ(clean_text("abc\xff\xfe def"), "abc def");
}

TEST(Tokenize, RespectsMinimumLength) {
  EXPECT_EQ(tokenize("a bb ccc", 2), (std::vector<std::string>{"bb", "ccc"}));
  EXPECT_EQ(tokenize("a bb ccc", 3), (std::vector<std::string>{"ccc"}));
  EXPECT_TRUE(tokenize("", 2).empty());
}

TEST(Stopwords, BundledListsResolve) {
  EXPECT_EQ(bundled_stopword_list_ids(), (std::vector<std::string>{"english", "english_web"}));
  EXPECT_TRUE(stopword_list("english").contains("the"));
  EXPECT_FALSE(stopword_list("english").contains("ransomware"));
  EXPECT_TRUE(stopword_list("english_web").contains("newsletter"));
  EXPECT_TRUE(stopword_list("english_web").contains("the"));
  EXPECT_NE(stopword_list("english").content_hash(), stopword_list("english_web").content_hash());
}

TEST(Stopwords, UnknownListIsConfigError) {
  try {
    stopword_list("klingon");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
  }
  PrepConfig c;
  c.stopword_list_id = "klingon";
  EXPECT_THROW(prep("text", c), Error);
  EXPECT_THROW(prep_fingerprint(c), Error);
}

TEST(Lemma, SuffixRules) {
  EXPECT_EQ(lemma_of("glasses"), "glass");
  EXPECT_EQ(lemma_of("flies"), "fly");
  EXPECT_EQ(lemma_of("ies"), "ies");
  EXPECT_EQ(lemma_of("wishes"), "wish");
  EXPECT_EQ(lemma_of("axes"), "axe");
  EXPECT_EQ(lemma_of("boss"), "boss");
  EXPECT_EQ(lemma_of("bonus"), "bonus");
  EXPECT_EQ(lemma_of("thesis"), "thesis");
  EXPECT_EQ(lemma_of("videos"), "videos");
  EXPECT_EQ(lemma_of("its"), "its");
  EXPECT_EQ(lemma_of("logs"), "log");
  EXPECT_EQ(lemma_of("attack"), "attack");
}

TEST(Lemma, ExceptionTargetsAreFixedPoints) {
  for (const char* w : {"men", "indices", "analyses", "lives", "apis", "metrics", "data"}) {
    const std::string once = lemma_of(w);
    EXPECT_EQ(lemma_of(once), once) << w;
  }
}

TEST(Preprocess, SummaryJoinsTokens) {
  const auto doc = prep("Ransomware encrypted the backups");
  EXPECT_EQ(doc.summary, "ransomware encrypted backup");
  EXPECT_EQ(doc.doc_id, "doc");
}

TEST(Preprocess, IsIdempotentOnItsOwnOutput) {
  for (const auto& c : testing::golden_cases()) {
    const auto once = prep(c.input, c.config);
    const auto twice = prep(once.summary, c.config);
    EXPECT_EQ(once.tokens, twice.tokens) << c.name;
  }
}

TEST(Preprocess, OutputHasNoStopwordsOrShortTokens) {
  const auto doc = prep("An is at the a I xs of it's don'ts");
  for (const auto& t : doc.tokens) {
    EXPECT_FALSE(stopword_list("english").contains(t)) << t;
    EXPECT_GE(t.size(), 2u);
  }
}

TEST(Preprocess, RejectsZeroMinimumLength) {
  EXPECT_THROW(prep("x", testing::min_len(0)), Error);
}

}  // namespace
}  // namespace secmatch
