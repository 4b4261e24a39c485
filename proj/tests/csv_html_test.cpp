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

#include "secmatch/csv.hpp"
#include "secmatch/error.hpp"
#include "secmatch/html.hpp"
#include "testing.hpp"

namespace secmatch {
namespace {

using Rows = std::vector<CsvRecord>;

TEST(Csv, PlainRecordsWithCrlfAndLf) {
  EXPECT_EQ(parse_csv("a,b\r\n1,2\n3,4"), (Rows{{"a", "b"}, {"1", "2"}, {"3", "4"}}));
}

TEST(Csv, QuotedFields) {
  EXPECT_EQ(parse_csv("x,y\n\"a,b\",\"say \"\"hi\"\"\"\n\"multi\r\nline\",z\n"),
            (Rows{{"x", "y"}, {"a,b", "say \"hi\""}, {"multi\r\nline", "z"}}));
}

TEST(Csv, EmptyFieldsBomAndBlankLines) {
  EXPECT_EQ(parse_csv("\xEF\xBB\xBFh1,h2\n,\n\nv,\n"), (Rows{{"h1", "h2"}, {"", ""}, {"v", ""}}));
  EXPECT_TRUE(parse_csv("").empty());
}

TEST(Csv, UnterminatedQuoteIsSchemaError) {
  try {
    parse_csv("a\n\"open");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::schema);
  }
}

TEST(Html, ExtractsVisibleText) {
  const std::string page =
      "<html><head><title>T</title><style>p{color:red}</style>"
      "<script>var x = '<p>no</p>';</script></head><body><!-- hidden -->"
      "<p>Hello&nbsp;<b>brave</b>\n  world</p><noscript>nojs</noscript><p>A &amp; B &#65;&#x42;</p>"
      "</body></html>";
  EXPECT_EQ(extract_text(page, "text/html"), "T Hello brave world A & B AB");
}

TEST(Html, SniffsMarkupWithoutContentType) {
  EXPECT_EQ(extract_text("<html><body><p>x y</p></body></html>", ""), "x y");
  EXPECT_EQ(extract_text("plain <b>text</b>", "text/plain"), "plain <b>text</b>");
  EXPECT_EQ(extract_text("plain <b>text</b>", ""), "plain <b>text</b>");
}

TEST(Html, DecodesEntities) {
  EXPECT_EQ(decode_entities("&lt;a&gt; &quot;q&quot; &#39; &unknown; &#xZZ;"),
            "<a> \"q\" ' &unknown; &#xZZ;");
  EXPECT_EQ(decode_entities("&eacute;"), "\xc3\xa9");
}

TEST(Html, SanitizesInvalidUtf8) {
  EXPECT_EQ(sanitize_utf8("ok\xff"), "ok\xef\xbf\xbd");
  EXPECT_EQ(sanitize_utf8("\xc3\xa9"), "\xc3\xa9");
}

TEST(Html, FixturePageDropsBoilerplateScripts) {
  const std::string text =
      extract_text(testing::read_file(testing::fixture("pages/saml-bypass-enterprise-server.html")),
                   "text/html");
  EXPECT_NE(text.find("authentication bypass vulnerability"), std::string::npos);
  EXPECT_EQ(text.find("analytics"), std::string::npos);
  EXPECT_EQ(text.find("font-family"), std::string::npos);
}

}  // namespace
}  // namespace secmatch
