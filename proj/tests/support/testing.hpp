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

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "secmatch/corpus.hpp"
#include "secmatch/ingest.hpp"
#include "secmatch/textprep.hpp"

extern char** environ;

namespace secmatch::testing {

inline const std::array<std::string, 5> kClusterA = {"phishing", "credential", "mailbox",
                                                      "spoofing", "lure"};
inline const std::array<std::string, 5> kClusterB = {"ransomware", "encryption", "bitcoin",
                                                      "decryptor", "extortion"};

struct LabeledCorpus {
  std::vector<CleanDocument> docs;
  std::vector<int> labels;
};

// Documents alternate between the two clusters; each token is drawn
// uniformly from its cluster's five words.
inline LabeledCorpus two_cluster_corpus(std::uint64_t seed, std::size_t per_cluster = 20,
                                        std::size_t tokens = 50) {
  std::mt19937_64 gen(seed);
  LabeledCorpus out;
  for (std::size_t i = 0; i < 2 * per_cluster; ++i) {
    const int label = static_cast<int>(i % 2);
    const auto& vocab = label == 0 ? kClusterA : kClusterB;
    CleanDocument doc;
    char id[32];
    std::snprintf(id, sizeof id, "d%03zu", i);
    doc.doc_id = id;
    for (std::size_t t = 0; t < tokens; ++t) doc.tokens.push_back(vocab[gen() % vocab.size()]);
    for (const auto& t : doc.tokens) doc.summary += (doc.summary.empty() ? "" : " ") + t;
    out.docs.push_back(std::move(doc));
    out.labels.push_back(label);
  }
  return out;
}

struct Vectorized {
  Dictionary dict;
  std::vector<BowVector> bows;
};

inline Vectorized vectorize_docs(const std::vector<CleanDocument>& docs) {
  Vectorized v;
  v.dict = build_dictionary(docs);
  for (const auto& d : docs) v.bows.push_back(to_bow(d, v.dict).bow);
  return v;
}

// Documents over words w000..w{vocab-1} with a skewed word distribution so
// that scores collide now and then.
inline std::vector<CleanDocument> random_docs(std::uint64_t seed, std::size_t n, std::size_t vocab,
                                              std::size_t min_len, std::size_t max_len,
                                              const std::string& prefix = "d") {
  std::mt19937_64 gen(seed);
  std::vector<CleanDocument> docs;
  for (std::size_t i = 0; i < n; ++i) {
    CleanDocument d;
    char id[32];
    std::snprintf(id, sizeof id, "%s%04zu", prefix.c_str(), i);
    d.doc_id = id;
    const std::size_t len = min_len + gen() % (max_len - min_len + 1);
    for (std::size_t t = 0; t < len; ++t) {
      const std::size_t a = gen() % vocab;
      const std::size_t b = gen() % vocab;
      char w[32];
      std::snprintf(w, sizeof w, "w%03zu", std::min(a, b));
      d.tokens.emplace_back(w);
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

// In-memory dataset over ready-made documents; trained when a config is
// given.
inline Dataset make_dataset(const std::string& name, std::vector<CleanDocument> docs,
                            const LdaConfig* config = nullptr) {
  Dataset ds;
  ds.dataset_id = name;
  ds.name = name;
  ds.owner_id = "tester";
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ds.rows.push_back({"https://example.test/" + name + "/" + docs[i].doc_id, std::nullopt,
                       std::nullopt, std::nullopt, {}});
    ds.document_rows.push_back(i);
  }
  ds.documents = std::move(docs);
  ds.stopword_hash = prep_fingerprint(ds.prep);
  vectorize(ds);
  ds.status = DatasetStatus::ingested;
  if (config) ds = train_dataset(std::move(ds), *config);
  return ds;
}

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(SECMATCH_FIXTURE_DIR) / rel;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("secmatch-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// Plain dense TF-IDF scoring written out longhand: raw counts times
// ln((1+N)/(1+df))+1, full-dimension cosine, sort by score then doc id.
struct OracleHit {
  std::string doc_id;
  double score;
};

inline std::vector<OracleHit> dense_top_k_oracle(const std::vector<CleanDocument>& docs,
                                                 const CleanDocument& query, std::size_t k) {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> vocab;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) {
      if (index.emplace(t, vocab.size()).second) vocab.push_back(t);
    }
  }
  const std::size_t v = vocab.size();
  std::vector<double> df(v, 0.0);
  std::vector<std::vector<double>> counts(docs.size(), std::vector<double>(v, 0.0));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const auto& t : docs[i].tokens) counts[i][index[t]] += 1.0;
    for (std::size_t j = 0; j < v; ++j) {
      if (counts[i][j] > 0) df[j] += 1.0;
    }
  }
  const double n = static_cast<double>(docs.size());
  std::vector<double> idf(v);
  for (std::size_t j = 0; j < v; ++j) idf[j] = std::log((1.0 + n) / (1.0 + df[j])) + 1.0;

  std::vector<double> q(v, 0.0);
  for (const auto& t : query.tokens) {
    if (auto it = index.find(t); it != index.end()) q[it->second] += 1.0;
  }
  for (std::size_t j = 0; j < v; ++j) q[j] *= idf[j];

  std::vector<OracleHit> hits;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double dot = 0.0, nq = 0.0, nd = 0.0;
    for (std::size_t j = 0; j < v; ++j) {
      const double w = counts[i][j] * idf[j];
      dot += q[j] * w;
      nq += q[j] * q[j];
      nd += w * w;
    }
    double s = (nq == 0.0 || nd == 0.0) ? 0.0 : dot / (std::sqrt(nq) * std::sqrt(nd));
    s = std::min(1.0, std::max(0.0, s));
    hits.push_back({docs[i].doc_id, s});
  }
  std::sort(hits.begin(), hits.end(), [](const OracleHit& a, const OracleHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

// Child process with stdout and stderr captured to files.
class Process {
 public:
  Process(const std::vector<std::string>& argv, const std::filesystem::path& log_dir) {
    static std::atomic<int> counter{0};
    const int n = counter++;
    out_path_ = log_dir / ("proc" + std::to_string(n) + ".out");
    err_path_ = log_dir / ("proc" + std::to_string(n) + ".err");
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 1, out_path_.c_str(), O_WRONLY | O_CREAT | O_TRUNC,
                                     0644);
    posix_spawn_file_actions_addopen(&actions, 2, err_path_.c_str(), O_WRONLY | O_CREAT | O_TRUNC,
                                     0644);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    const int rc = posix_spawn(&pid_, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw std::runtime_error("posix_spawn failed for " + argv[0]);
  }
  ~Process() {
    if (pid_ > 0 && !reaped_) {
      ::kill(pid_, SIGKILL);
      wait();
    }
  }

  int wait() {
    if (reaped_) return status_;
    int st = 0;
    ::waitpid(pid_, &st, 0);
    reaped_ = true;
    status_ = WIFEXITED(st) ? WEXITSTATUS(st) : 128 + WTERMSIG(st);
    return status_;
  }
  void kill(int sig) { ::kill(pid_, sig); }
  std::string out() const { return read_file(out_path_); }
  std::string err() const { return read_file(err_path_); }

 private:
  pid_t pid_ = -1;
  bool reaped_ = false;
  int status_ = -1;
  std::filesystem::path out_path_;
  std::filesystem::path err_path_;
};

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

inline RunResult run(const std::vector<std::string>& argv, const std::filesystem::path& log_dir) {
  Process p(argv, log_dir);
  const int code = p.wait();
  return {code, p.out(), p.err()};
}

}  // namespace secmatch::testing
