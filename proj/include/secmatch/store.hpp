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
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "secmatch/dataset.hpp"
#include "secmatch/error.hpp"
#include "secmatch/match.hpp"
#include "secmatch/timeutil.hpp"

struct sqlite3;

namespace secmatch {

using Clock = std::function<Timestamp()>;

// ---------------------------------------------------------------------------
// Credentials

inline constexpr std::size_t kMinPasswordLength = 8;
inline constexpr std::size_t kMaxPasswordLength = 1024;

// Argon2id via libsodium; the returned string encodes algorithm, parameters,
// salt and digest. Throws Error(invalid_argument) for a password outside
// 8..1024 characters.
std::string hash_password(std::string_view plaintext);
bool verify_password(std::string_view plaintext, const std::string& credential_hash);

// ---------------------------------------------------------------------------
// Entities

struct UserAccount {
  std::string user_id;
  std::string username;
  std::string credential_hash;
  Timestamp created_at{};

  bool operator==(const UserAccount&) const = default;
};

// Only a digest of the token is persisted; `token` is filled in when the
// session is created and empty when read back.
struct SessionToken {
  std::string token;
  std::string token_digest;
  std::string user_id;
  Timestamp expires_at{};

  bool operator==(const SessionToken&) const = default;
};

struct UploadedFile {
  std::string file_id;
  std::string user_id;
  std::string filename;
  std::string raw_bytes;
  CleanDocument clean_document;
  PrepConfig prep;
  Timestamp uploaded_at{};

  bool operator==(const UploadedFile&) const = default;
};

// Dataset without its documents, vectors and model.
struct DatasetMeta {
  std::string dataset_id;
  std::string name;
  std::string owner_id;
  bool is_public = false;
  DatasetStatus status = DatasetStatus::ingesting;
  std::vector<DatasetTableRow> rows;
  std::vector<std::size_t> document_rows;
  std::vector<FetchFailure> fetch_failures;
  PrepConfig prep;
  Digest stopword_hash{};
  std::uint64_t model_version = 0;
  Timestamp created_at{};

  bool operator==(const DatasetMeta&) const = default;
};

struct DatasetDocuments {
  std::string dataset_id;
  std::vector<CleanDocument> documents;

  bool operator==(const DatasetDocuments&) const = default;
};

struct DatasetVectors {
  std::string dataset_id;
  Dictionary dictionary;
  std::vector<BowVector> bows;

  bool operator==(const DatasetVectors&) const = default;
};

struct StoredModelRecord {
  std::string model_id;
  std::string dataset_id;
  // Container bytes as produced by save_model.
  std::string container;
  std::uint64_t version = 0;
  Timestamp created_at{};

  bool operator==(const StoredModelRecord&) const = default;
};

enum class JobKind { compare, train };
enum class JobState { queued, running, done, failed };

std::string_view to_string(JobKind kind);
std::string_view to_string(JobState state);
JobState job_state_from_string(std::string_view s);

struct Job {
  std::string job_id;
  JobKind kind = JobKind::compare;
  std::string user_id;
  std::string file_id;
  std::vector<std::string> dataset_ids;
  CompareParams params;
  // Training jobs only.
  std::uint32_t num_topics = 10;
  std::uint64_t seed = 42;
  std::optional<std::uint64_t> model_version;

  JobState state = JobState::queued;
  std::optional<ComparisonReport> report;
  std::optional<std::string> error;
  Timestamp submitted_at{};
  std::optional<Timestamp> finished_at;
  std::optional<Timestamp> lease_expires_at;
  std::uint32_t attempts = 0;

  bool operator==(const Job&) const = default;
};

// ---------------------------------------------------------------------------
// Store

enum class Family { users, sessions, files, datasets, documents, vectors, models, jobs };
std::string_view to_string(Family family);

// Row of the generic record table. `tag`, `parent` and `version` are indexed
// attributes each family uses as it needs (username, job state, owning
// dataset, model version).
struct Record {
  std::string id;
  std::string owner;
  std::string tag;
  std::string parent;
  std::int64_t version = 0;
  std::string body;
  Timestamp created_at{};
};

template <class T>
struct EntityTraits;

class Store;

// put/get/list/remove over one entity family.
template <class T>
class Collection {
 public:
  using Traits = EntityTraits<T>;

  explicit Collection(Store& store) : store_(&store) {}

  // Insert or replace. Unique secondary keys still raise duplicate_key.
  void put(const T& entity);
  // Throws Error(duplicate_key) when the id already exists.
  void insert(const T& entity);
  std::optional<T> find(const std::string& id) const;
  // Throws Error(not_found).
  T get(const std::string& id) const;
  std::vector<T> list() const;
  // Throws Error(not_found).
  void remove(const std::string& id);

 private:
  Store* store_;
};

class Store {
 public:
  // Opens (creating if needed) <data_dir>/store.db.
  explicit Store(const std::filesystem::path& data_dir, Clock clock = now_seconds);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  Timestamp now() const { return clock_(); }
  const std::filesystem::path& data_dir() const { return data_dir_; }

  Collection<UserAccount> users() { return Collection<UserAccount>(*this); }
  Collection<SessionToken> sessions() { return Collection<SessionToken>(*this); }
  Collection<UploadedFile> files() { return Collection<UploadedFile>(*this); }
  Collection<DatasetMeta> datasets() { return Collection<DatasetMeta>(*this); }
  Collection<DatasetDocuments> documents() { return Collection<DatasetDocuments>(*this); }
  Collection<DatasetVectors> vectors() { return Collection<DatasetVectors>(*this); }
  Collection<StoredModelRecord> models() { return Collection<StoredModelRecord>(*this); }
  Collection<Job> jobs() { return Collection<Job>(*this); }

  // "<prefix>_<n>" from a persistent per-prefix counter.
  std::string next_id(std::string_view prefix);

  // Users and sessions.
  UserAccount create_user(const std::string& username, std::string_view password);
  std::optional<UserAccount> find_user_by_name(const std::string& username);
  SessionToken create_session(const std::string& user_id, std::chrono::seconds ttl);
  // Throws Error(unauthenticated) for unknown, expired or revoked tokens.
  std::string resolve_session(const std::string& token);
  void revoke_session(const std::string& token);

  // Datasets, written and read as a unit.
  void save_dataset(const Dataset& dataset);
  // Loads the latest model when one exists. Throws Error(not_found).
  Dataset load_dataset(const std::string& dataset_id);
  std::optional<DatasetMeta> find_dataset_by_name(const std::string& owner_id,
                                                  const std::string& name);

  // Appends a model version for the dataset and marks it trained.
  StoredModelRecord add_model(const std::string& dataset_id, std::string container);
  std::optional<StoredModelRecord> latest_model(const std::string& dataset_id);
  std::vector<StoredModelRecord> model_history(const std::string& dataset_id);

  // Jobs. Transitions are restricted to queued -> running -> done | failed.
  Job submit_job(Job job);
  // Takes the oldest queued job, or a running job whose lease has expired,
  // marks it running and leases it.
  std::optional<Job> claim_next_job(std::chrono::seconds lease);
  // Applies `mutate` inside a transaction and validates the transition.
  Job update_job(const std::string& job_id, const std::function<void(Job&)>& mutate);

  // Generic record access behind Collection<T>.
  void put_record(Family family, const Record& record, bool insert_only);
  std::optional<Record> get_record(Family family, const std::string& id);
  std::vector<Record> list_records(Family family, const std::string* parent = nullptr);
  bool remove_record(Family family, const std::string& id);

  // Runs `fn` in an IMMEDIATE transaction; rolls back on exception.
  void transaction(const std::function<void()>& fn);

 private:
  void exec(const char* sql);

  std::filesystem::path data_dir_;
  Clock clock_;
  sqlite3* db_ = nullptr;
  std::recursive_mutex mu_;
  int tx_depth_ = 0;
};

template <class T>
void Collection<T>::put(const T& entity) {
  store_->put_record(Traits::family, Traits::to_record(entity), false);
}

template <class T>
void Collection<T>::insert(const T& entity) {
  store_->put_record(Traits::family, Traits::to_record(entity), true);
}

template <class T>
std::optional<T> Collection<T>::find(const std::string& id) const {
  auto record = store_->get_record(Traits::family, id);
  if (!record) return std::nullopt;
  return Traits::from_record(*record);
}

template <class T>
T Collection<T>::get(const std::string& id) const {
  auto entity = find(id);
  if (!entity) {
    throw Error(Errc::not_found, std::string(to_string(Traits::family)) + " " + id + " not found");
  }
  return std::move(*entity);
}

template <class T>
std::vector<T> Collection<T>::list() const {
  std::vector<T> out;
  for (const auto& record : store_->list_records(Traits::family)) {
    out.push_back(Traits::from_record(record));
  }
  return out;
}

template <class T>
void Collection<T>::remove(const std::string& id) {
  if (!store_->remove_record(Traits::family, id)) {
    throw Error(Errc::not_found, std::string(to_string(Traits::family)) + " " + id + " not found");
  }
}

#define SECMATCH_DECLARE_ENTITY(Type, FamilyValue)  \
  template <>                                       \
  struct EntityTraits<Type> {                       \
    static constexpr Family family = FamilyValue;   \
    static Record to_record(const Type& entity);    \
    static Type from_record(const Record& record);  \
  }

SECMATCH_DECLARE_ENTITY(UserAccount, Family::users);
SECMATCH_DECLARE_ENTITY(SessionToken, Family::sessions);
SECMATCH_DECLARE_ENTITY(UploadedFile, Family::files);
SECMATCH_DECLARE_ENTITY(DatasetMeta, Family::datasets);
SECMATCH_DECLARE_ENTITY(DatasetDocuments, Family::documents);
SECMATCH_DECLARE_ENTITY(DatasetVectors, Family::vectors);
SECMATCH_DECLARE_ENTITY(StoredModelRecord, Family::models);
SECMATCH_DECLARE_ENTITY(Job, Family::jobs);

#undef SECMATCH_DECLARE_ENTITY

}  // namespace secmatch
