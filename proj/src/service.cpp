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

#include "secmatch/service.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>

#include "secmatch/error.hpp"
#include "secmatch/html.hpp"
#include "secmatch/match.hpp"

namespace secmatch {
namespace {

void validate_username(const std::string& username) {
  const bool ok = username.size() >= 3 && username.size() <= 64 &&
                  std::all_of(username.begin(), username.end(), [](char c) {
                    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                           (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
                  });
  if (!ok) {
    throw Error(Errc::invalid_argument,
                "username must be 3 to 64 characters of letters, digits, '_', '-' or '.'");
  }
}

// Verified against when the username is unknown so both login failures cost
// the same.
const std::string& decoy_hash() {
  static const std::string hash = hash_password("decoy-password-for-unknown-users");
  return hash;
}

Json optional_time(const std::optional<Timestamp>& t) {
  return t ? Json(format_iso8601(*t)) : Json(nullptr);
}

}  // namespace

Service::Service(ServiceConfig config, Clock clock)
    : config_(std::move(config)), store_(config_.data_dir, std::move(clock)) {
  if (config_.fetch.cache_dir.empty()) config_.fetch.cache_dir = config_.data_dir / "cache";
  config_.fetch.validate();
  (void)stopword_list(config_.prep.stopword_list_id);
}

UserAccount Service::register_user(const std::string& username, const std::string& password) {
  validate_username(username);
  return store_.create_user(username, password);
}

std::string Service::login(const std::string& username, const std::string& password) {
  const auto user = store_.find_user_by_name(username);
  const bool ok = verify_password(password, user ? user->credential_hash : decoy_hash());
  if (!user || !ok) throw Error(Errc::unauthenticated, "invalid username or password");
  return store_.create_session(user->user_id, config_.session_ttl).token;
}

void Service::logout(const std::string& token) {
  store_.resolve_session(token);
  store_.revoke_session(token);
}

std::string Service::authenticate(const std::string& token) { return store_.resolve_session(token); }

UploadedFile Service::upload_file(const std::string& user_id, const std::string& filename,
                                  std::string bytes) {
  if (filename.empty() || filename.size() > 255) {
    throw Error(Errc::invalid_argument, "filename must be 1 to 255 bytes");
  }
  UploadedFile file;
  file.file_id = store_.next_id("file");
  file.user_id = user_id;
  file.filename = filename;
  file.uploaded_at = store_.now();
  file.prep = config_.prep;
  const RawDocument raw{file.file_id, filename, extract_text(bytes, ""), file.uploaded_at};
  file.clean_document = preprocess_document(raw, file.prep);
  file.raw_bytes = std::move(bytes);
  store_.files().insert(file);
  return file;
}

DatasetCreated Service::create_dataset(const std::string& user_id, const std::string& name,
                                       std::string_view csv, bool is_public) {
  if (name.empty() || name.size() > 128) {
    throw Error(Errc::invalid_argument, "dataset name must be 1 to 128 bytes");
  }
  if (store_.find_dataset_by_name(user_id, name)) {
    throw Error(Errc::duplicate_key, "dataset name already exists: " + name);
  }
  DatasetTable table = load_dataset_table(csv);
  Fetcher fetcher(config_.fetch);
  Dataset dataset = ingest_dataset(name, std::move(table.rows), fetcher, config_.prep);
  dataset.dataset_id = store_.next_id("ds");
  dataset.owner_id = user_id;
  dataset.is_public = is_public;
  store_.save_dataset(dataset);
  return {store_.datasets().get(dataset.dataset_id), std::move(table.errors)};
}

std::vector<DatasetMeta> Service::list_datasets(const std::string& user_id) {
  std::vector<DatasetMeta> out;
  for (auto& meta : store_.datasets().list()) {
    if (meta.owner_id == user_id || meta.is_public) out.push_back(std::move(meta));
  }
  return out;
}

DatasetMeta Service::readable_dataset(const std::string& user_id, const std::string& id_or_name) {
  if (auto meta = store_.datasets().find(id_or_name)) {
    if (meta->owner_id != user_id && !meta->is_public) {
      throw Error(Errc::forbidden, "dataset belongs to another user");
    }
    return std::move(*meta);
  }
  if (auto meta = store_.find_dataset_by_name(user_id, id_or_name)) return std::move(*meta);
  for (auto& meta : store_.datasets().list()) {
    if (meta.is_public && meta.name == id_or_name) return std::move(meta);
  }
  throw Error(Errc::not_found, "dataset not found: " + id_or_name);
}

DatasetMeta Service::dataset_meta(const std::string& user_id, const std::string& id_or_name) {
  return readable_dataset(user_id, id_or_name);
}

std::vector<TopicSummary> Service::topics(const std::string& user_id, const std::string& dataset,
                                          std::size_t words) {
  if (words == 0 || words > 1000) throw Error(Errc::invalid_argument, "words must be 1 to 1000");
  const Dataset d = store_.load_dataset(readable_dataset(user_id, dataset).dataset_id);
  if (!d.model) throw Error(Errc::model_missing, "train dataset first");
  std::vector<TopicSummary> out;
  for (std::size_t k = 0; k < d.model->num_topics(); ++k) {
    out.push_back({k, top_words(*d.model, d.dictionary, k, words)});
  }
  return out;
}

std::string Service::model_container(const std::string& user_id, const std::string& dataset) {
  const auto record = store_.latest_model(readable_dataset(user_id, dataset).dataset_id);
  if (!record) throw Error(Errc::model_missing, "train dataset first");
  return record->container;
}

Job Service::submit_train(const std::string& user_id, const std::string& dataset,
                          std::uint32_t num_topics, std::uint64_t seed) {
  const DatasetMeta meta = readable_dataset(user_id, dataset);
  if (meta.owner_id != user_id) throw Error(Errc::forbidden, "only the owner can train a dataset");
  LdaConfig lda;
  lda.num_topics = num_topics;
  lda.seed = seed;
  lda.validate();
  if (meta.status != DatasetStatus::ingested && meta.status != DatasetStatus::trained) {
    throw Error(Errc::state, "dataset not ready: status " + std::string(to_string(meta.status)));
  }
  Job job;
  job.kind = JobKind::train;
  job.user_id = user_id;
  job.dataset_ids = {meta.dataset_id};
  job.num_topics = num_topics;
  job.seed = seed;
  return store_.submit_job(std::move(job));
}

Job Service::submit_compare(const std::string& user_id, const std::string& file_id,
                            const std::vector<std::string>& datasets, const CompareParams& params) {
  if (datasets.empty()) throw Error(Errc::invalid_argument, "dataset_ids must not be empty");
  params.validate();
  const UploadedFile file = store_.files().get(file_id);
  if (file.user_id != user_id) throw Error(Errc::forbidden, "file belongs to another user");
  Job job;
  job.kind = JobKind::compare;
  job.user_id = user_id;
  job.file_id = file_id;
  job.params = params;
  for (const auto& d : datasets) {
    std::string id = readable_dataset(user_id, d).dataset_id;
    if (std::find(job.dataset_ids.begin(), job.dataset_ids.end(), id) == job.dataset_ids.end()) {
      job.dataset_ids.push_back(std::move(id));
    }
  }
  return store_.submit_job(std::move(job));
}

Job Service::get_job(const std::string& user_id, const std::string& job_id) {
  Job job = store_.jobs().get(job_id);
  if (job.user_id != user_id) throw Error(Errc::forbidden, "job belongs to another user");
  return job;
}

ComparisonReport Service::get_report(const std::string& user_id, const std::string& job_id) {
  Job job = get_job(user_id, job_id);
  if (job.kind != JobKind::compare) throw Error(Errc::state, "training jobs have no report");
  if (job.state == JobState::failed) throw Error(Errc::state, "job failed: " + *job.error);
  if (job.state != JobState::done) {
    throw Error(Errc::state, "job not finished: " + std::string(to_string(job.state)));
  }
  return std::move(*job.report);
}

Job Service::run_job(const std::string& job_id) {
  Job job = store_.jobs().get(job_id);
  if (job.state == JobState::queued) {
    const Timestamp lease_end = store_.now() + config_.job_lease;
    job = store_.update_job(job_id, [&](Job& j) {
      j.state = JobState::running;
      j.lease_expires_at = lease_end;
      ++j.attempts;
    });
  } else if (job.state != JobState::running) {
    throw Error(Errc::state, "job already " + std::string(to_string(job.state)));
  }
  return execute(std::move(job));
}

bool Service::run_next_job() {
  auto job = store_.claim_next_job(config_.job_lease);
  if (!job) return false;
  execute(std::move(*job));
  return true;
}

Job Service::execute(Job job) {
  try {
    if (job.kind == JobKind::train) {
      LdaConfig lda;
      lda.num_topics = job.num_topics;
      lda.seed = job.seed;
      const Dataset trained = train_dataset(store_.load_dataset(job.dataset_ids.at(0)), lda);
      const auto record =
          store_.add_model(trained.dataset_id, save_model(*trained.model, trained.dictionary));
      return store_.update_job(job.job_id, [&](Job& j) {
        j.state = JobState::done;
        j.model_version = record.version;
      });
    }

    const UploadedFile file = store_.files().get(job.file_id);
    std::vector<Dataset> datasets;
    datasets.reserve(job.dataset_ids.size());
    for (const auto& id : job.dataset_ids) {
      datasets.push_back(store_.load_dataset(id));
      if (!datasets.back().model) throw Error(Errc::model_missing, "train dataset first");
    }
    CleanDocument query = file.clean_document;
    if (datasets.front().prep != file.prep) {
      query = preprocess_document(
          {file.file_id, file.filename, extract_text(file.raw_bytes, ""), file.uploaded_at},
          datasets.front().prep);
    }
    std::vector<const Dataset*> ptrs;
    for (const auto& d : datasets) ptrs.push_back(&d);
    ComparisonReport report = compare(query, ptrs, job.params);
    report.job_id = job.job_id;
    report.file_ref = file.filename;
    report.generated_at = format_iso8601(store_.now());
    return store_.update_job(job.job_id, [&](Job& j) {
      j.state = JobState::done;
      j.report = std::move(report);
    });
  } catch (const std::exception& e) {
    const std::string message = e.what();
    return store_.update_job(job.job_id, [&](Job& j) {
      j.state = JobState::failed;
      j.error = message;
    });
  }
}

WorkerPool::WorkerPool(Service& service, std::size_t workers, std::chrono::milliseconds poll) {
  for (std::size_t i = 0; i < workers; ++i) {
    threads_.emplace_back([&service, poll](std::stop_token stop) {
      std::mutex mu;
      std::condition_variable_any cv;
      while (!stop.stop_requested()) {
        bool ran = false;
        try {
          ran = service.run_next_job();
        } catch (const std::exception&) {
          // Storage failures leave the job leased; it is retried after the
          // lease expires.
        }
        if (!ran) {
          std::unique_lock lock(mu);
          cv.wait_for(lock, stop, poll, [] { return false; });
        }
      }
    });
  }
}

WorkerPool::~WorkerPool() {
  for (auto& t : threads_) t.request_stop();
}

Json dataset_to_json(const DatasetMeta& meta) {
  Json failures = Json::array();
  for (const auto& f : meta.fetch_failures) {
    failures.push_back({{"row_index", f.row_index},
                        {"reference", meta.rows.at(f.row_index).reference},
                        {"error", f.error}});
  }
  return {{"dataset_id", meta.dataset_id},
          {"name", meta.name},
          {"owner_id", meta.owner_id},
          {"is_public", meta.is_public},
          {"status", to_string(meta.status)},
          {"rows", meta.rows.size()},
          {"documents", meta.document_rows.size()},
          {"fetch_failures", std::move(failures)},
          {"model_version", meta.model_version ? Json(meta.model_version) : Json(nullptr)},
          {"created_at", format_iso8601(meta.created_at)}};
}

Json job_to_json(const Job& job) {
  Json j = {{"job_id", job.job_id},
            {"kind", to_string(job.kind)},
            {"state", to_string(job.state)},
            {"dataset_ids", job.dataset_ids}};
  if (job.kind == JobKind::compare) {
    j["file_id"] = job.file_id;
    j["params"] = params_to_json(job.params);
  } else {
    j["num_topics"] = job.num_topics;
    j["seed"] = job.seed;
    j["model_version"] = job.model_version ? Json(*job.model_version) : Json(nullptr);
  }
  j["submitted_at"] = format_iso8601(job.submitted_at);
  j["finished_at"] = optional_time(job.finished_at);
  j["error"] = job.error ? Json(*job.error) : Json(nullptr);
  if (job.report) j["report"] = report_to_json(*job.report);
  return j;
}

}  // namespace secmatch
