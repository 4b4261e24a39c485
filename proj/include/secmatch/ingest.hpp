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

#include <string>
#include <string_view>
#include <vector>

#include "secmatch/dataset.hpp"
#include "secmatch/fetch.hpp"
#include "secmatch/topics.hpp"

namespace secmatch {

struct RowError {
  // 1-based data row number (header excluded).
  std::size_t row_number = 0;
  std::string message;
};

struct DatasetTable {
  std::vector<DatasetTableRow> rows;
  std::vector<RowError> errors;
};

// Header must contain `reference`. Rows with an invalid reference or date are
// reported in `errors` and skipped. Throws Error(schema) for a missing
// column or an empty file.
DatasetTable load_dataset_table(std::string_view csv);

// Document id for the n-th table row.
std::string row_doc_id(std::size_t row_index);

// Fetch, extract and preprocess every row, then build the dictionary and the
// vectors. Rows that fail are recorded and skipped.
Dataset ingest_dataset(std::string name, std::vector<DatasetTableRow> table, Fetcher& fetcher,
                       const PrepConfig& prep);

// Rebuilds dictionary, bag-of-words and TF-IDF vectors from `documents`.
void vectorize(Dataset& dataset);

// Requires status ingested or trained. Throws Error(state) otherwise.
Dataset train_dataset(Dataset dataset, const LdaConfig& config);

}  // namespace secmatch
