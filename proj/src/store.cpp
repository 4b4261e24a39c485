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

#include "secmatch/store.hpp"

#include <sodium.h>
#include <sqlite3.h>

#include <algorithm>

#include <json.hpp>

#include "secmatch/binary.hpp"
#include "secmatch/crypto.hpp"
#include "secmatch/error.hpp"
#include "secmatch/report.hpp"

namespace secmatch {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS meta(key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS counters(name TEXT PRIMARY KEY, value INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS records(
  family TEXT NOT NULL,
  id TEXT NOT NULL,
  owner TEXT NOT NULL DEFAULT '',
  tag TEXT NOT NULL DEFAULT '',
  parent TEXT NOT NULL DEFAULT '',
  version INTEGER NOT NULL DEFAULT 0,
  created_at INTEGER NOT NULL,
  body BLOB NOT NULL,
  PRIMARY KEY(family, id));
CREATE UNIQUE INDEX IF NOT EXISTS users_by_name ON records(tag) WHERE family = 'users';
CREATE UNIQUE INDEX IF NOT EXISTS datasets_by_name ON records(owner, tag) WHERE family = 'datasets';
CREATE UNIQUE INDEX IF NOT EXISTS models_by_version ON records(parent, version) WHERE family = 'models';
CREATE INDEX IF NOT EXISTS records_by_parent ON records(family, parent);
CREATE INDEX IF NOT EXISTS records_by_tag ON records(family, tag);
)sql";

std::int64_t to_epoch(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_epoch(std::int64_t s) { return Timestamp{std::chrono::seconds{s}}; }

[[noreturn]] void throw_sqlite(sqlite3* db, int rc, std::string_view what) {
  const std::string msg = std::string(what) + ": " + (db ? sqlite3_errmsg(db) : sqlite3_errstr(rc));
  if ((rc & 0xff) == SQLITE_CONSTRAINT) throw Error(Errc::duplicate_key, "duplicate key: " + msg);
  throw Error(Errc::storage_io, msg);
}

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    const int rc = sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr);
    if (rc != SQLITE_OK) throw_sqlite(db, rc, "prepare");
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, std::string_view text) {
    check(sqlite3_bind_text(stmt_, i, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Statement& bind_blob(int i, std::string_view bytes) {
    check(sqlite3_bind_blob(stmt_, i, bytes.data(), static_cast<int>(bytes.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Statement& bind(int i, std::int64_t v) {
    check(sqlite3_bind_int64(stmt_, i, v));
    return *this;
  }

  // True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw_sqlite(db_, rc, "step");
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  std::string blob(int col) const {
    const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  std::int64_t int64(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) throw_sqlite(db_, rc, "bind");
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

constexpr const char* kSelectColumns = "SELECT id, owner, tag, parent, version, created_at, body FROM records";

Record read_record(const Statement& s) {
  Record r;
  r.id = s.text(0);
  r.owner = s.text(1);
  r.tag = s.text(2);
  r.parent = s.text(3);
  r.version = s.int64(4);
  r.created_at = from_epoch(s.int64(5));
  r.body = s.blob(6);
  return r;
}

std::string to_body(const json& j) {
  const auto bytes = json::to_cbor(j);
  return std::string(bytes.begin(), bytes.end());
}

json from_body(const Record& r) {
  try {
    return json::from_cbor(r.body);
  } catch (const json::exception& e) {
    throw Error(Errc::storage_io, "corrupt record " + r.id + ": " + e.what());
  }
}

json digest_json(const Digest& d) { return to_hex(d); }
Digest digest_from(const json& j) { return digest_from_hex(j.get<std::string>()); }

json prep_to_json(const PrepConfig& p) {
  return {{"stopword_list_id", p.stopword_list_id},
          {"pos_filter_enabled", p.pos_filter_enabled},
          {"min_token_len", p.min_token_len}};
}

PrepConfig prep_from_json(const json& j) {
  PrepConfig p;
  p.stopword_list_id = j.at("stopword_list_id").get<std::string>();
  p.pos_filter_enabled = j.at("pos_filter_enabled").get<bool>();
  p.min_token_len = j.at("min_token_len").get<std::size_t>();
  return p;
}

json doc_to_json(const CleanDocument& d) {
  return {{"doc_id", d.doc_id}, {"summary", d.summary}, {"tokens", d.tokens}};
}

CleanDocument doc_from_json(const json& j) {
  return {j.at("doc_id").get<std::string>(), j.at("summary").get<std::string>(),
          j.at("tokens").get<std::vector<std::string>>()};
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }
std::optional<std::string> optional_string(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

bool transition_allowed(JobState from, JobState to) {
  switch (from) {
    case JobState::queued: return to == JobState::queued || to == JobState::running;
    case JobState::running:
      return to == JobState::running || to == JobState::done || to == JobState::failed;
    case JobState::done:
    case JobState::failed:
      return false;
  }
  return false;
}

void check_job_shape(const Job& job) {
  const bool has_report = job.report.has_value();
  if (job.kind == JobKind::compare && has_report != (job.state == JobState::done)) {
    throw Error(Errc::state, "job " + job.job_id + ": report present iff done");
  }
  if (job.kind == JobKind::train && has_report) {
    throw Error(Errc::state, "job " + job.job_id + ": training jobs carry no report");
  }
  if (job.error.has_value() != (job.state == JobState::failed)) {
    throw Error(Errc::state, "job " + job.job_id + ": error present iff failed");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Credentials

std::string hash_password(std::string_view plaintext) {
  if (plaintext.size() < kMinPasswordLength || plaintext.size() > kMaxPasswordLength) {
    throw Error(Errc::invalid_argument, "password must be 8 to 1024 characters");
  }
  if (sodium_init() < 0) throw Error(Errc::storage_io, "libsodium initialisation failed");
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, plaintext.data(), plaintext.size(),
                        crypto_pwhash_OPSLIMIT_INTERACTIVE,
                        crypto_pwhash_MEMLIMIT_INTERACTIVE) != 0) {
    throw Error(Errc::storage_io, "password hashing ran out of memory");
  }
  return out;
}

bool verify_password(std::string_view plaintext, const std::string& credential_hash) {
  if (sodium_init() < 0) return false;
  if (credential_hash.size() >= crypto_pwhash_STRBYTES) return false;
  return crypto_pwhash_str_verify(credential_hash.c_str(), plaintext.data(), plaintext.size()) == 0;
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Family family) {
  switch (family) {
    case Family::users: return "users";
    case Family::sessions: return "sessions";
    case Family::files: return "files";
    case Family::datasets: return "datasets";
    case Family::documents: return "documents";
    case Family::vectors: return "vectors";
    case Family::models: return "models";
    case Family::jobs: return "jobs";
  }
  return "unknown";
}

std::string_view to_string(JobKind kind) { return kind == JobKind::compare ? "compare" : "train"; }

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "failed";
}

JobState job_state_from_string(std::string_view s) {
  if (s == "queued") return JobState::queued;
  if (s == "running") return JobState::running;
  if (s == "done") return JobState::done;
  if (s == "failed") return JobState::failed;
  throw Error(Errc::invalid_argument, "unknown job state: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Entity codecs

Record EntityTraits<UserAccount>::to_record(const UserAccount& u) {
  return {u.user_id, u.user_id, u.username, "", 0,
          to_body({{"username", u.username}, {"credential_hash", u.credential_hash}}),
          u.created_at};
}

UserAccount EntityTraits<UserAccount>::from_record(const Record& r) {
  const json j = from_body(r);
  return {r.id, j.at("username").get<std::string>(), j.at("credential_hash").get<std::string>(),
          r.created_at};
}

Record EntityTraits<SessionToken>::to_record(const SessionToken& s) {
  return {s.token_digest, s.user_id, "", "", 0,
          to_body({{"user_id", s.user_id}, {"expires_at", to_epoch(s.expires_at)}}), Timestamp{}};
}

SessionToken EntityTraits<SessionToken>::from_record(const Record& r) {
  const json j = from_body(r);
  return {"", r.id, j.at("user_id").get<std::string>(),
          from_epoch(j.at("expires_at").get<std::int64_t>())};
}

Record EntityTraits<UploadedFile>::to_record(const UploadedFile& f) {
  json j = {{"filename", f.filename},
            {"raw", json::binary(std::vector<std::uint8_t>(f.raw_bytes.begin(), f.raw_bytes.end()))},
            {"document", doc_to_json(f.clean_document)},
            {"prep", prep_to_json(f.prep)}};
  return {f.file_id, f.user_id, f.filename, "", 0, to_body(j), f.uploaded_at};
}

UploadedFile EntityTraits<UploadedFile>::from_record(const Record& r) {
  const json j = from_body(r);
  const auto& raw = j.at("raw").get_binary();
  return {r.id,
          r.owner,
          j.at("filename").get<std::string>(),
          std::string(raw.begin(), raw.end()),
          doc_from_json(j.at("document")),
          prep_from_json(j.at("prep")),
          r.created_at};
}

Record EntityTraits<DatasetMeta>::to_record(const DatasetMeta& d) {
  json rows = json::array();
  for (const auto& row : d.rows) {
    rows.push_back({{"reference", row.reference},
                    {"title", optional_string(row.title)},
                    {"date", optional_string(row.date)},
                    {"notes", optional_string(row.notes)},
                    {"extra", row.extra}});
  }
  json failures = json::array();
  for (const auto& f : d.fetch_failures) failures.push_back({{"row", f.row_index}, {"error", f.error}});
  json j = {{"is_public", d.is_public},
            {"status", to_string(d.status)},
            {"rows", std::move(rows)},
            {"document_rows", d.document_rows},
            {"fetch_failures", std::move(failures)},
            {"prep", prep_to_json(d.prep)},
            {"stopword_hash", digest_json(d.stopword_hash)},
            {"model_version", d.model_version}};
  return {d.dataset_id, d.owner_id, d.name, "", 0, to_body(j), d.created_at};
}

DatasetMeta EntityTraits<DatasetMeta>::from_record(const Record& r) {
  const json j = from_body(r);
  DatasetMeta d;
  d.dataset_id = r.id;
  d.owner_id = r.owner;
  d.name = r.tag;
  d.created_at = r.created_at;
  d.is_public = j.at("is_public").get<bool>();
  d.status = dataset_status_from_string(j.at("status").get<std::string>());
  for (const auto& row : j.at("rows")) {
    d.rows.push_back({row.at("reference").get<std::string>(), optional_string(row.at("title")),
                      optional_string(row.at("date")), optional_string(row.at("notes")),
                      row.at("extra").get<std::map<std::string, std::string>>()});
  }
  d.document_rows = j.at("document_rows").get<std::vector<std::size_t>>();
  for (const auto& f : j.at("fetch_failures")) {
    d.fetch_failures.push_back({f.at("row").get<std::size_t>(), f.at("error").get<std::string>()});
  }
  d.prep = prep_from_json(j.at("prep"));
  d.stopword_hash = digest_from(j.at("stopword_hash"));
  d.model_version = j.at("model_version").get<std::uint64_t>();
  return d;
}

Record EntityTraits<DatasetDocuments>::to_record(const DatasetDocuments& d) {
  json docs = json::array();
  for (const auto& doc : d.documents) docs.push_back(doc_to_json(doc));
  return {d.dataset_id, "", "", d.dataset_id, 0, to_body(docs), Timestamp{}};
}

DatasetDocuments EntityTraits<DatasetDocuments>::from_record(const Record& r) {
  DatasetDocuments d{r.id, {}};
  for (const auto& doc : from_body(r)) d.documents.push_back(doc_from_json(doc));
  return d;
}

Record EntityTraits<DatasetVectors>::to_record(const DatasetVectors& v) {
  ByteWriter w;
  w.block(v.dictionary.encode());
  w.block(encode_bows(v.bows));
  return {v.dataset_id, "", "", v.dataset_id, 0, std::move(w).bytes(), Timestamp{}};
}

DatasetVectors EntityTraits<DatasetVectors>::from_record(const Record& r) {
  ByteReader reader(r.body);
  DatasetVectors v;
  v.dataset_id = r.id;
  v.dictionary = Dictionary::decode(reader.block());
  v.bows = decode_bows(reader.block());
  return v;
}

Record EntityTraits<StoredModelRecord>::to_record(const StoredModelRecord& m) {
  return {m.model_id, "", "", m.dataset_id, static_cast<std::int64_t>(m.version), m.container,
          m.created_at};
}

StoredModelRecord EntityTraits<StoredModelRecord>::from_record(const Record& r) {
  return {r.id, r.parent, r.body, static_cast<std::uint64_t>(r.version), r.created_at};
}

Record EntityTraits<Job>::to_record(const Job& job) {
  json j = {{"kind", to_string(job.kind)},
            {"file_id", job.file_id},
            {"dataset_ids", job.dataset_ids},
            {"params", params_to_json(job.params)},
            {"num_topics", job.num_topics},
            {"seed", job.seed},
            {"model_version", job.model_version ? json(*job.model_version) : json(nullptr)},
            {"report", job.report ? json(report_to_json(*job.report)) : json(nullptr)},
            {"error", optional_string(job.error)},
            {"finished_at", job.finished_at ? json(to_epoch(*job.finished_at)) : json(nullptr)},
            {"lease_expires_at",
             job.lease_expires_at ? json(to_epoch(*job.lease_expires_at)) : json(nullptr)},
            {"attempts", job.attempts}};
  return {job.job_id, job.user_id, std::string(to_string(job.state)), "", 0, to_body(j),
          job.submitted_at};
}

Job EntityTraits<Job>::from_record(const Record& r) {
  const json j = from_body(r);
  Job job;
  job.job_id = r.id;
  job.user_id = r.owner;
  job.state = job_state_from_string(r.tag);
  job.submitted_at = r.created_at;
  job.kind = j.at("kind").get<std::string>() == "train" ? JobKind::train : JobKind::compare;
  job.file_id = j.at("file_id").get<std::string>();
  job.dataset_ids = j.at("dataset_ids").get<std::vector<std::string>>();
  job.params = params_from_json(Json::parse(j.at("params").dump()));
  job.num_topics = j.at("num_topics").get<std::uint32_t>();
  job.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("model_version").is_null()) job.model_version = j.at("model_version").get<std::uint64_t>();
  if (!j.at("report").is_null()) job.report = report_from_json(Json::parse(j.at("report").dump()));
  job.error = optional_string(j.at("error"));
  if (!j.at("finished_at").is_null()) job.finished_at = from_epoch(j.at("finished_at").get<std::int64_t>());
  if (!j.at("lease_expires_at").is_null()) {
    job.lease_expires_at = from_epoch(j.at("lease_expires_at").get<std::int64_t>());
  }
  job.attempts = j.at("attempts").get<std::uint32_t>();
  return job;
}

// ---------------------------------------------------------------------------
// Store

Store::Store(const std::filesystem::path& data_dir, Clock clock)
    : data_dir_(data_dir), clock_(std::move(clock)) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir_, ec);
  if (ec) throw Error(Errc::storage_io, "cannot create data directory " + data_dir_.string());
  const auto path = (data_dir_ / "store.db").string();
  const int rc = sqlite3_open_v2(path.c_str(), &db_,
                                 SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                                 nullptr);
  if (rc != SQLITE_OK) {
    const std::string msg = db_ ? sqlite3_errmsg(db_) : sqlite3_errstr(rc);
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(Errc::storage_io, "cannot open " + path + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 10000);
  exec("PRAGMA journal_mode=WAL");
  exec("PRAGMA synchronous=FULL");
  exec("PRAGMA foreign_keys=ON");
  transaction([&] {
    exec(kSchema);
    Statement get(db_, "SELECT value FROM meta WHERE key = 'schema_version'");
    if (get.step()) {
      if (get.text(0) != std::to_string(kSchemaVersion)) {
        throw Error(Errc::storage_io, "unsupported store schema version " + get.text(0));
      }
    } else {
      Statement put(db_, "INSERT INTO meta(key, value) VALUES('schema_version', ?)");
      put.bind(1, std::to_string(kSchemaVersion));
      put.step();
    }
  });
}

Store::~Store() {
  if (db_) sqlite3_close(db_);
}

void Store::exec(const char* sql) {
  char* err = nullptr;
  const int rc = sqlite3_exec(db_, sql, nullptr, nullptr, &err);
  if (rc != SQLITE_OK) {
    const std::string msg = err ? err : sqlite3_errstr(rc);
    sqlite3_free(err);
    if ((rc & 0xff) == SQLITE_CONSTRAINT) throw Error(Errc::duplicate_key, msg);
    throw Error(Errc::storage_io, msg);
  }
}

void Store::transaction(const std::function<void()>& fn) {
  std::lock_guard lock(mu_);
  if (tx_depth_ > 0) {
    ++tx_depth_;
    try {
      fn();
    } catch (...) {
      --tx_depth_;
      throw;
    }
    --tx_depth_;
    return;
  }
  exec("BEGIN IMMEDIATE");
  ++tx_depth_;
  try {
    fn();
    exec("COMMIT");
    --tx_depth_;
  } catch (...) {
    --tx_depth_;
    sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    throw;
  }
}

void Store::put_record(Family family, const Record& record, bool insert_only) {
  std::lock_guard lock(mu_);
  const char* sql = insert_only
                        ? "INSERT INTO records(family, id, owner, tag, parent, version, created_at, body) "
                          "VALUES(?, ?, ?, ?, ?, ?, ?, ?)"
                        : "INSERT INTO records(family, id, owner, tag, parent, version, created_at, body) "
                          "VALUES(?, ?, ?, ?, ?, ?, ?, ?) ON CONFLICT(family, id) DO UPDATE SET "
                          "owner = excluded.owner, tag = excluded.tag, parent = excluded.parent, "
                          "version = excluded.version, created_at = excluded.created_at, "
                          "body = excluded.body";
  Statement s(db_, sql);
  s.bind(1, to_string(family))
      .bind(2, record.id)
      .bind(3, record.owner)
      .bind(4, record.tag)
      .bind(5, record.parent)
      .bind(6, record.version)
      .bind(7, to_epoch(record.created_at))
      .bind_blob(8, record.body);
  s.step();
}

std::optional<Record> Store::get_record(Family family, const std::string& id) {
  std::lock_guard lock(mu_);
  Statement s(db_, (std::string(kSelectColumns) + " WHERE family = ? AND id = ?").c_str());
  s.bind(1, to_string(family)).bind(2, id);
  if (!s.step()) return std::nullopt;
  return read_record(s);
}

std::vector<Record> Store::list_records(Family family, const std::string* parent) {
  std::lock_guard lock(mu_);
  std::string sql = std::string(kSelectColumns) + " WHERE family = ?";
  if (parent) sql += " AND parent = ?";
  sql += " ORDER BY rowid";
  Statement s(db_, sql.c_str());
  s.bind(1, to_string(family));
  if (parent) s.bind(2, *parent);
  std::vector<Record> out;
  while (s.step()) out.push_back(read_record(s));
  return out;
}

bool Store::remove_record(Family family, const std::string& id) {
  std::lock_guard lock(mu_);
  Statement s(db_, "DELETE FROM records WHERE family = ? AND id = ?");
  s.bind(1, to_string(family)).bind(2, id);
  s.step();
  return sqlite3_changes(db_) > 0;
}

std::string Store::next_id(std::string_view prefix) {
  std::int64_t value = 0;
  transaction([&] {
    Statement up(db_,
                 "INSERT INTO counters(name, value) VALUES(?, 1) "
                 "ON CONFLICT(name) DO UPDATE SET value = value + 1 RETURNING value");
    up.bind(1, prefix);
    if (!up.step()) throw Error(Errc::storage_io, "counter update returned no row");
    value = up.int64(0);
  });
  return std::string(prefix) + "_" + std::to_string(value);
}

UserAccount Store::create_user(const std::string& username, std::string_view password) {
  UserAccount user;
  user.username = username;
  user.credential_hash = hash_password(password);
  user.created_at = now();
  transaction([&] {
    if (find_user_by_name(username)) {
      throw Error(Errc::duplicate_key, "username already taken");
    }
    user.user_id = next_id("user");
    users().insert(user);
  });
  return user;
}

std::optional<UserAccount> Store::find_user_by_name(const std::string& username) {
  std::lock_guard lock(mu_);
  Statement s(db_, (std::string(kSelectColumns) + " WHERE family = 'users' AND tag = ?").c_str());
  s.bind(1, username);
  if (!s.step()) return std::nullopt;
  return EntityTraits<UserAccount>::from_record(read_record(s));
}

SessionToken Store::create_session(const std::string& user_id, std::chrono::seconds ttl) {
  SessionToken session;
  session.token = random_token(32);
  session.token_digest = to_hex(sha256(session.token));
  session.user_id = user_id;
  session.expires_at = now() + ttl;
  sessions().insert(session);
  return session;
}

std::string Store::resolve_session(const std::string& token) {
  static const Error rejected(Errc::unauthenticated, "authentication required");
  if (token.empty()) throw rejected;
  const auto session = sessions().find(to_hex(sha256(token)));
  if (!session) throw rejected;
  if (now() >= session->expires_at) {
    remove_record(Family::sessions, session->token_digest);
    throw rejected;
  }
  return session->user_id;
}

void Store::revoke_session(const std::string& token) {
  remove_record(Family::sessions, to_hex(sha256(token)));
}

void Store::save_dataset(const Dataset& dataset) {
  if (dataset.dataset_id.empty()) throw Error(Errc::invalid_argument, "dataset id is empty");
  DatasetMeta meta;
  meta.dataset_id = dataset.dataset_id;
  meta.name = dataset.name;
  meta.owner_id = dataset.owner_id;
  meta.is_public = dataset.is_public;
  meta.status = dataset.status;
  meta.rows = dataset.rows;
  meta.document_rows = dataset.document_rows;
  meta.fetch_failures = dataset.fetch_failures;
  meta.prep = dataset.prep;
  meta.stopword_hash = dataset.stopword_hash;
  meta.model_version = dataset.model_version;
  transaction([&] {
    if (auto existing = datasets().find(dataset.dataset_id)) {
      meta.created_at = existing->created_at;
    } else {
      meta.created_at = now();
    }
    datasets().put(meta);
    documents().put({dataset.dataset_id, dataset.documents});
    vectors().put({dataset.dataset_id, dataset.dictionary, dataset.bows});
  });
}

Dataset Store::load_dataset(const std::string& dataset_id) {
  DatasetMeta meta;
  DatasetDocuments docs;
  DatasetVectors vecs;
  std::optional<StoredModelRecord> model_record;
  transaction([&] {
    meta = datasets().get(dataset_id);
    docs = documents().get(dataset_id);
    vecs = vectors().get(dataset_id);
    model_record = latest_model(dataset_id);
  });

  Dataset d;
  d.dataset_id = meta.dataset_id;
  d.name = meta.name;
  d.owner_id = meta.owner_id;
  d.is_public = meta.is_public;
  d.status = meta.status;
  d.rows = std::move(meta.rows);
  d.document_rows = std::move(meta.document_rows);
  d.fetch_failures = std::move(meta.fetch_failures);
  d.prep = meta.prep;
  d.stopword_hash = meta.stopword_hash;
  d.documents = std::move(docs.documents);
  d.dictionary = std::move(vecs.dictionary);
  d.bows = std::move(vecs.bows);
  d.vectors = compute_tfidf(d.bows, d.dictionary);
  if (model_record) {
    auto loaded = load_model(model_record->container);
    if (loaded.dictionary.hash() != d.dictionary.hash()) {
      throw Error(Errc::invariant_violation, "stored model is bound to a different dictionary");
    }
    loaded.model.trained_at = model_record->created_at;
    d.model = std::move(loaded.model);
    d.model_version = model_record->version;
  }
  return d;
}

std::optional<DatasetMeta> Store::find_dataset_by_name(const std::string& owner_id,
                                                       const std::string& name) {
  std::lock_guard lock(mu_);
  Statement s(db_, (std::string(kSelectColumns) +
                    " WHERE family = 'datasets' AND owner = ? AND tag = ?").c_str());
  s.bind(1, owner_id).bind(2, name);
  if (!s.step()) return std::nullopt;
  return EntityTraits<DatasetMeta>::from_record(read_record(s));
}

StoredModelRecord Store::add_model(const std::string& dataset_id, std::string container) {
  StoredModelRecord record;
  transaction([&] {
    DatasetMeta meta = datasets().get(dataset_id);
    const auto latest = latest_model(dataset_id);
    record.version = latest ? latest->version + 1 : 1;
    record.model_id = dataset_id + "@v" + std::to_string(record.version);
    record.dataset_id = dataset_id;
    record.container = std::move(container);
    record.created_at = now();
    models().insert(record);
    meta.status = DatasetStatus::trained;
    meta.model_version = record.version;
    datasets().put(meta);
  });
  return record;
}

std::optional<StoredModelRecord> Store::latest_model(const std::string& dataset_id) {
  std::lock_guard lock(mu_);
  Statement s(db_, (std::string(kSelectColumns) +
                    " WHERE family = 'models' AND parent = ? ORDER BY version DESC LIMIT 1").c_str());
  s.bind(1, dataset_id);
  if (!s.step()) return std::nullopt;
  return EntityTraits<StoredModelRecord>::from_record(read_record(s));
}

std::vector<StoredModelRecord> Store::model_history(const std::string& dataset_id) {
  std::vector<StoredModelRecord> out;
  for (const auto& r : list_records(Family::models, &dataset_id)) {
    out.push_back(EntityTraits<StoredModelRecord>::from_record(r));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.version < b.version; });
  return out;
}

Job Store::submit_job(Job job) {
  transaction([&] {
    job.job_id = next_id("job");
    job.state = JobState::queued;
    job.report.reset();
    job.error.reset();
    job.finished_at.reset();
    job.lease_expires_at.reset();
    job.attempts = 0;
    job.submitted_at = now();
    jobs().insert(job);
  });
  return job;
}

std::optional<Job> Store::claim_next_job(std::chrono::seconds lease) {
  std::optional<Job> claimed;
  transaction([&] {
    Statement s(db_, (std::string(kSelectColumns) +
                      " WHERE family = 'jobs' AND tag IN ('queued', 'running') ORDER BY rowid").c_str());
    const Timestamp t = now();
    while (s.step()) {
      Job job = EntityTraits<Job>::from_record(read_record(s));
      const bool expired = job.state == JobState::running &&
                           (!job.lease_expires_at || *job.lease_expires_at <= t);
      if (job.state == JobState::queued || expired) {
        claimed = std::move(job);
        break;
      }
    }
    if (!claimed) return;
    claimed->state = JobState::running;
    claimed->lease_expires_at = t + lease;
    ++claimed->attempts;
    jobs().put(*claimed);
  });
  return claimed;
}

Job Store::update_job(const std::string& job_id, const std::function<void(Job&)>& mutate) {
  Job job;
  transaction([&] {
    job = jobs().get(job_id);
    const JobState before = job.state;
    mutate(job);
    if (job.job_id != job_id) throw Error(Errc::state, "job id cannot change");
    if (!transition_allowed(before, job.state)) {
      throw Error(Errc::state, "illegal job transition " + std::string(to_string(before)) + " -> " +
                                   std::string(to_string(job.state)));
    }
    check_job_shape(job);
    if (job.state == JobState::done || job.state == JobState::failed) {
      job.lease_expires_at.reset();
      if (!job.finished_at) job.finished_at = now();
    }
    jobs().put(job);
  });
  return job;
}

}  // namespace secmatch
