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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secmatch/corpus.hpp"
#include "secmatch/textprep.hpp"
#include "secmatch/topics.hpp"

namespace secmatch {

struct DatasetTableRow {
  std::string reference;
  std::optional<std::string> title;
  std::optional<std::string> date;
  std::optional<std::string> notes;
  // Columns other than reference/title/date/notes, by header name.
  std::map<std::string, std::string> extra;

  bool operator==(const DatasetTableRow&) const = default;
};

struct FetchFailure {
  std::size_t row_index = 0;
  std::string error;

  bool operator==(const FetchFailure&) const = default;
};

enum class DatasetStatus { ingesting, ingested, trained, failed };

std::string_view to_string(DatasetStatus status);
DatasetStatus dataset_status_from_string(std::string_view s);

struct Dataset {
  std::string dataset_id;
  std::string name;
  std::string owner_id;
  bool is_public = false;
  std::vector<DatasetTableRow> rows;
  // Parallel to the rows that were fetched successfully.
  std::vector<CleanDocument> documents;
  std::vector<std::size_t> document_rows;
  std::vector<FetchFailure> fetch_failures;
  PrepConfig prep;
  Digest stopword_hash{};
  Dictionary dictionary;
  std::vector<BowVector> bows;
  std::vector<TfidfVector> vectors;
  std::optional<LdaModel> model;
  std::uint64_t model_version = 0;
  DatasetStatus status = DatasetStatus::ingesting;

  const std::string& document_link(std::size_t doc_index) const {
    return rows.at(document_rows.at(doc_index)).reference;
  }
};

}  // namespace secmatch
