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
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "secmatch/service.hpp"

namespace secmatch {

// One source of settings. Unset fields defer to the next layer.
struct ConfigLayer {
  std::optional<std::string> data_dir;
  std::optional<std::string> listen_addr;
  std::optional<std::string> cache_dir;
  std::optional<bool> offline_mode;
  std::optional<long> fetch_timeout_seconds;
  std::optional<long> fetch_retries;
  std::optional<long> fetch_parallelism;
  std::optional<long> worker_count;
};

struct AppConfig {
  std::filesystem::path data_dir;
  std::string listen_addr = "127.0.0.1:8080";
  std::filesystem::path cache_dir;
  bool offline_mode = false;
  std::chrono::seconds fetch_timeout{20};
  int fetch_retries = 2;
  std::size_t fetch_parallelism = 4;
  std::size_t worker_count = 1;

  ServiceConfig service_config() const;
};

using EnvLookup = std::function<const char*(const char*)>;

// SECMATCH_DATA_DIR, SECMATCH_LISTEN_ADDR, SECMATCH_CACHE_DIR,
// SECMATCH_OFFLINE, SECMATCH_FETCH_TIMEOUT, SECMATCH_FETCH_RETRIES,
// SECMATCH_FETCH_PARALLELISM, SECMATCH_WORKERS.
ConfigLayer config_from_env(const EnvLookup& lookup);
// JSON object with keys data_dir, listen_addr, cache_dir, offline_mode,
// fetch_timeout_seconds, fetch_retries, fetch_parallelism, worker_count.
ConfigLayer config_from_file(const std::filesystem::path& path);

// flags > env > file > defaults. Throws Error(config) when no data
// directory is given or a value is out of range.
AppConfig resolve_config(const ConfigLayer& flags, const ConfigLayer& env, const ConfigLayer& file);

}  // namespace secmatch
