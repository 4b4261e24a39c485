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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "secmatch/textprep.hpp"

namespace secmatch {

struct FetchPolicy {
  std::chrono::seconds timeout{20};
  std::uint64_t max_bytes = 5ull << 20;
  int retries = 2;
  int max_redirects = 5;
  bool offline_mode = false;
  // Content-addressed response cache; offline mode reads only from here.
  std::filesystem::path cache_dir;
  std::size_t parallelism = 4;

  void validate() const;
};

// A cached or fetched HTTP response body.
struct FetchedPage {
  std::string url;
  std::string body;
  std::string content_type;
  int status = 200;
  std::optional<Timestamp> retrieved_at;
};

bool is_valid_http_url(std::string_view url);

// Cache entry layout: <cache_dir>/<sha256(url)> holds the raw body and
// <cache_dir>/<sha256(url)>.meta.json the content type, status and time.
std::string cache_key(std::string_view url);
void write_cache_entry(const std::filesystem::path& cache_dir, const FetchedPage& page);
std::optional<FetchedPage> read_cache_entry(const std::filesystem::path& cache_dir,
                                            std::string_view url);

// Fetches pages over HTTP(S) or from the cache. Each URL hits the network at
// most once per Fetcher; safe to share between threads.
class Fetcher {
 public:
  explicit Fetcher(FetchPolicy policy);

  // Throws Error with one of the fetch_* codes.
  FetchedPage fetch_page(const std::string& url);
  // fetch_page followed by extract_text.
  RawDocument fetch_url(const std::string& url, std::string doc_id = {});

  const FetchPolicy& policy() const { return policy_; }
  std::uint64_t network_requests() const { return network_requests_.load(); }

 private:
  FetchedPage fetch_network(const std::string& url);

  FetchPolicy policy_;
  std::mutex mu_;
  std::map<std::string, std::shared_future<FetchedPage>> memo_;
  std::atomic<std::uint64_t> network_requests_{0};
};

}  // namespace secmatch
