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

#include "secmatch/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <exception>
#include <thread>

#include "secmatch/csv.hpp"
#include "secmatch/error.hpp"

namespace secmatch {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_fetch_error(Errc code) {
  switch (code) {
    case Errc::fetch_timeout:
    case Errc::fetch_status:
    case Errc::fetch_too_large:
    case Errc::fetch_cache_miss:
    case Errc::fetch_network:
    case Errc::storage_io:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string_view to_string(DatasetStatus status) {
  switch (status) {
    case DatasetStatus::ingesting: return "ingesting";
    case DatasetStatus::ingested: return "ingested";
    case DatasetStatus::trained: return "trained";
    case DatasetStatus::failed: return "failed";
  }
  return "failed";
}

DatasetStatus dataset_status_from_string(std::string_view s) {
  if (s == "ingesting") return DatasetStatus::ingesting;
  if (s == "ingested") return DatasetStatus::ingested;
  if (s == "trained") return DatasetStatus::trained;
  if (s == "failed") return DatasetStatus::failed;
  throw Error(Errc::invalid_argument, "unknown dataset status: " + std::string(s));
}

DatasetTable load_dataset_table(std::string_view csv) {
  const auto records = parse_csv(csv);
  if (records.empty()) throw Error(Errc::schema, "schema: empty file");

  std::vector<std::string> header;
  for (const auto& h : records.front()) header.push_back(lowercase(trim(h)));
  const auto ref_it = std::find(header.begin(), header.end(), "reference");
  if (ref_it == header.end()) throw Error(Errc::schema, "schema: reference column required");

  DatasetTable table;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    auto cell = [&](std::size_t col) { return col < record.size() ? trim(record[col]) : std::string(); };
    DatasetTableRow row;
    std::string date_text;
    for (std::size_t c = 0; c < header.size(); ++c) {
      std::string value = cell(c);
      const std::string& name = header[c];
      if (name == "reference") {
        row.reference = std::move(value);
      } else if (name == "title") {
        if (!value.empty()) row.title = std::move(value);
      } else if (name == "date") {
        date_text = value;
        if (!value.empty()) row.date = std::move(value);
      } else if (name == "notes") {
        if (!value.empty()) row.notes = std::move(value);
      } else if (!name.empty() && !value.empty()) {
        row.extra.emplace(name, std::move(value));
      }
    }
    if (row.reference.empty()) {
      table.errors.push_back({r, "missing reference"});
      continue;
    }
    if (!is_valid_http_url(row.reference)) {
      table.errors.push_back({r, "invalid reference: " + row.reference});
      continue;
    }
    if (!date_text.empty() && !parse_iso8601(date_text)) {
      table.errors.push_back({r, "invalid date: " + date_text});
      continue;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string row_doc_id(std::size_t row_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "r%06zu", row_index + 1);
  return buf;
}

void vectorize(Dataset& dataset) {
  dataset.dictionary = build_dictionary(dataset.documents);
  dataset.bows.clear();
  dataset.bows.reserve(dataset.documents.size());
  for (const auto& doc : dataset.documents) {
    dataset.bows.push_back(to_bow(doc, dataset.dictionary).bow);
  }
  dataset.vectors = compute_tfidf(dataset.bows, dataset.dictionary);
}

Dataset ingest_dataset(std::string name, std::vector<DatasetTableRow> table, Fetcher& fetcher,
                       const PrepConfig& prep) {
  if (table.empty()) throw Error(Errc::invalid_argument, "dataset table has no valid rows");
  Dataset dataset;
  dataset.name = std::move(name);
  dataset.prep = prep;
  dataset.stopword_hash = prep_fingerprint(prep);
  dataset.rows = std::move(table);

  const std::size_t n = dataset.rows.size();
  std::vector<std::optional<CleanDocument>> docs(n);
  std::vector<std::string> errors(n);
  std::vector<std::exception_ptr> fatal(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const RawDocument raw = fetcher.fetch_url(dataset.rows[i].reference, row_doc_id(i));
        docs[i] = preprocess_document(raw, prep);
      } catch (const Error& e) {
        if (!is_fetch_error(e.code())) {
          fatal[i] = std::current_exception();
        } else {
          errors[i] = e.what();
        }
      } catch (...) {
        fatal[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(fetcher.policy().parallelism, n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : fatal) {
    if (e) std::rethrow_exception(e);
  }

  // Row order, not completion order.
  for (std::size_t i = 0; i < n; ++i) {
    if (docs[i]) {
      dataset.documents.push_back(std::move(*docs[i]));
      dataset.document_rows.push_back(i);
    } else {
      dataset.fetch_failures.push_back({i, errors[i]});
    }
  }
  vectorize(dataset);
  dataset.status = dataset.documents.empty() ? DatasetStatus::failed : DatasetStatus::ingested;
  return dataset;
}

Dataset train_dataset(Dataset dataset, const LdaConfig& config) {
  if (dataset.status != DatasetStatus::ingested && dataset.status != DatasetStatus::trained) {
    throw Error(Errc::state, "dataset not ready");
  }
  dataset.model = train(dataset.bows, dataset.dictionary, config);
  dataset.status = DatasetStatus::trained;
  return dataset;
}

}  // namespace secmatch
