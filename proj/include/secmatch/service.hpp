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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "secmatch/fetch.hpp"
#include "secmatch/ingest.hpp"
#include "secmatch/report.hpp"
#include "secmatch/store.hpp"

namespace secmatch {

struct ServiceConfig {
  std::filesystem::path data_dir;
  // cache_dir defaults to <data_dir>/cache.
  FetchPolicy fetch;
  PrepConfig prep;
  std::chrono::seconds session_ttl{std::chrono::hours(12)};
  std::chrono::seconds job_lease{std::chrono::minutes(10)};
};

struct DatasetCreated {
  DatasetMeta meta;
  std::vector<RowError> row_errors;
};

struct TopicSummary {
  std::size_t topic = 0;
  std::vector<std::pair<std::string, double>> words;
};

// Operations shared by the HTTP API and the CLI. Every method that acts on
// behalf of a user takes the user id returned by authenticate().
class Service {
 public:
  explicit Service(ServiceConfig config, Clock clock = now_seconds);

  Store& store() { return store_; }
  const ServiceConfig& config() const { return config_; }

  UserAccount register_user(const std::string& username, const std::string& password);
  // Returns a fresh session token. Unknown users and wrong passwords fail
  // identically with Error(unauthenticated).
  std::string login(const std::string& username, const std::string& password);
  void logout(const std::string& token);
  std::string authenticate(const std::string& token);

  UploadedFile upload_file(const std::string& user_id, const std::string& filename,
                           std::string bytes);
  // Parses the table and ingests it synchronously. Throws Error(schema) for
  // a malformed table and Error(duplicate_key) when the user already owns a
  // dataset of that name.
  DatasetCreated create_dataset(const std::string& user_id, const std::string& name,
                                std::string_view csv, bool is_public = false);
  std::vector<DatasetMeta> list_datasets(const std::string& user_id);
  // Accepts a dataset id, or a name owned by the user, or a public name.
  DatasetMeta dataset_meta(const std::string& user_id, const std::string& id_or_name);
  std::vector<TopicSummary> topics(const std::string& user_id, const std::string& dataset,
                                   std::size_t words);

  Job submit_train(const std::string& user_id, const std::string& dataset,
                   std::uint32_t num_topics = 10, std::uint64_t seed = 42);
  Job submit_compare(const std::string& user_id, const std::string& file_id,
                     const std::vector<std::string>& datasets, const CompareParams& params);
  Job get_job(const std::string& user_id, const std::string& job_id);
  // Throws Error(state) until the job is done.
  ComparisonReport get_report(const std::string& user_id, const std::string& job_id);

  // Moves a queued job to running (a job already leased is taken as is),
  // executes it and records the outcome. Execution errors end in state
  // failed rather than an exception.
  Job run_job(const std::string& job_id);
  // Claims the oldest runnable job and runs it. False when none is waiting.
  bool run_next_job();

  // Container bytes of the latest model for the dataset.
  std::string model_container(const std::string& user_id, const std::string& dataset);

 private:
  Job execute(Job job);
  DatasetMeta readable_dataset(const std::string& user_id, const std::string& id_or_name);

  ServiceConfig config_;
  Store store_;
};

// Background job runners polling the store.
class WorkerPool {
 public:
  WorkerPool(Service& service, std::size_t workers,
             std::chrono::milliseconds poll = std::chrono::milliseconds(50));
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

 private:
  std::vector<std::jthread> threads_;
};

Json dataset_to_json(const DatasetMeta& meta);
Json job_to_json(const Job& job);

}  // namespace secmatch
