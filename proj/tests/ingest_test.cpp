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

#include "secmatch/error.hpp"
#include "secmatch/ingest.hpp"
#include "testing.hpp"

namespace secmatch {
namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return Errc::config;
}

FetchPolicy offline(std::size_t parallelism = 4) {
  FetchPolicy p;
  p.offline_mode = true;
  p.cache_dir = testing::fixture("cache");
  p.parallelism = parallelism;
  return p;
}

TEST(DatasetTable, ParsesColumnsCaseInsensitively) {
  const auto table = load_dataset_table(
      " Reference ,TITLE,date,Notes,Source\n"
      "https://a.test/1,First,2024-01-02,n1,feed\n"
      "https://a.test/2,,,,\n");
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_TRUE(table.errors.empty());
  EXPECT_EQ(table.rows[0].reference, "https://a.test/1");
  EXPECT_EQ(table.rows[0].title, "First");
  EXPECT_EQ(table.rows[0].date, "2024-01-02");
  EXPECT_EQ(table.rows[0].notes, "n1");
  EXPECT_EQ(table.rows[0].extra.at("source"), "feed");
  EXPECT_FALSE(table.rows[1].title.has_value());
  EXPECT_FALSE(table.rows[1].date.has_value());
}

TEST(DatasetTable, ReportsBadRowsAndKeepsGoodOnes) {
  const auto table = load_dataset_table(testing::read_file(testing::fixture("incidents_with_failures.csv")));
  EXPECT_EQ(table.rows.size(), 4u);
  ASSERT_EQ(table.errors.size(), 2u);
  EXPECT_EQ(table.errors[0].row_number, 5u);
  EXPECT_NE(table.errors[0].message.find("invalid reference"), std::string::npos);
  EXPECT_EQ(table.errors[1].row_number, 6u);
  EXPECT_NE(table.errors[1].message.find("invalid date"), std::string::npos);
}

TEST(DatasetTable, SchemaErrors) {
  EXPECT_EQ(code_of([] { load_dataset_table("title,date\nx,2024-01-01\n"); }), Errc::schema);
  EXPECT_EQ(code_of([] { load_dataset_table(""); }), Errc::schema);
  EXPECT_EQ(code_of([] { load_dataset_table("reference\n\"unterminated\n"); }), Errc::schema);
  const auto blank = load_dataset_table("reference,title\n,Nothing\n");
  EXPECT_TRUE(blank.rows.empty());
  ASSERT_EQ(blank.errors.size(), 1u);
}

TEST(RowDocId, Format) {
  EXPECT_EQ(row_doc_id(0), "r000001");
  EXPECT_EQ(row_doc_id(41), "r000042");
}

TEST(Ingest, OfflineFixtureCorpus) {
  auto table = load_dataset_table(testing::read_file(testing::fixture("incidents.csv")));
  Fetcher fetcher(offline());
  const Dataset ds = ingest_dataset("incidents", table.rows, fetcher, {});
  EXPECT_EQ(ds.status, DatasetStatus::ingested);
  EXPECT_EQ(ds.documents.size(), 10u);
  EXPECT_TRUE(ds.fetch_failures.empty());
  EXPECT_EQ(ds.bows.size(), 10u);
  EXPECT_EQ(ds.vectors.size(), 10u);
  EXPECT_EQ(ds.stopword_hash, prep_fingerprint(PrepConfig{}));
  for (std::size_t i = 0; i < ds.documents.size(); ++i) {
    EXPECT_EQ(ds.documents[i].doc_id, row_doc_id(i));
    EXPECT_EQ(ds.document_link(i), table.rows[i].reference);
    EXPECT_FALSE(ds.documents[i].tokens.empty());
  }
  EXPECT_TRUE(ds.dictionary.id_of("ransomware").has_value());
  EXPECT_FALSE(ds.dictionary.id_of("the").has_value());
}

TEST(Ingest, OrderIndependentOfParallelism) {
  auto table = load_dataset_table(testing::read_file(testing::fixture("incidents.csv")));
  Fetcher serial(offline(1));
  Fetcher parallel(offline(8));
  const Dataset a = ingest_dataset("x", table.rows, serial, {});
  const Dataset b = ingest_dataset("x", table.rows, parallel, {});
  EXPECT_EQ(a.documents, b.documents);
  EXPECT_EQ(a.dictionary, b.dictionary);
  EXPECT_EQ(a.bows, b.bows);
}

TEST(Ingest, FailedFetchesRecordedAndSkipped) {
  auto table = load_dataset_table(testing::read_file(testing::fixture("incidents_with_failures.csv")));
  Fetcher fetcher(offline());
  const Dataset ds = ingest_dataset("partial", table.rows, fetcher, {});
  EXPECT_EQ(ds.status, DatasetStatus::ingested);
  EXPECT_EQ(ds.documents.size(), 3u);
  ASSERT_EQ(ds.fetch_failures.size(), 1u);
  EXPECT_EQ(ds.fetch_failures[0].row_index, 3u);
  EXPECT_EQ(ds.fetch_failures[0].error, "offline cache miss");
  EXPECT_EQ(ds.document_rows, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Ingest, NothingFetchedMeansFailed) {
  std::vector<DatasetTableRow> rows = {{"https://incidents.example.org/nope.html", {}, {}, {}, {}}};
  Fetcher fetcher(offline());
  Dataset ds = ingest_dataset("empty", rows, fetcher, {});
  EXPECT_EQ(ds.status, DatasetStatus::failed);
  EXPECT_TRUE(ds.documents.empty());
  EXPECT_EQ(code_of([&] { train_dataset(ds, {}); }), Errc::state);
  EXPECT_EQ(code_of([&] { ingest_dataset("none", {}, fetcher, {}); }), Errc::invalid_argument);
}

TEST(Ingest, TrainedDatasetCarriesModel) {
  auto table = load_dataset_table(testing::read_file(testing::fixture("incidents.csv")));
  Fetcher fetcher(offline());
  LdaConfig c;
  c.num_topics = 4;
  const Dataset ds = train_dataset(ingest_dataset("incidents", table.rows, fetcher, {}), c);
  EXPECT_EQ(ds.status, DatasetStatus::trained);
  ASSERT_TRUE(ds.model.has_value());
  EXPECT_EQ(ds.model->dictionary_hash, ds.dictionary.hash());
  EXPECT_EQ(ds.model->training_doc_topics.rows, ds.documents.size());
}

}  // namespace
}  // namespace secmatch
