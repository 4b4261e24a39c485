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

#include "secmatch/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "secmatch/error.hpp"
#include "secmatch/report.hpp"

namespace secmatch {
namespace {

long parse_long(const char* name, std::string_view s) {
  long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(Errc::config, std::string(name) + ": not an integer: " + std::string(s));
  }
  return v;
}

bool parse_bool(const char* name, std::string_view s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off" || s.empty()) return false;
  throw Error(Errc::config, std::string(name) + ": not a boolean: " + std::string(s));
}

template <class T>
const T& pick(const std::optional<T>& a, const std::optional<T>& b, const std::optional<T>& c,
              const T& fallback) {
  if (a) return *a;
  if (b) return *b;
  if (c) return *c;
  return fallback;
}

long in_range(const char* name, long v, long lo, long hi) {
  if (v < lo || v > hi) {
    throw Error(Errc::config, std::string(name) + " must be in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
  }
  return v;
}

}  // namespace

ServiceConfig AppConfig::service_config() const {
  ServiceConfig c;
  c.data_dir = data_dir;
  c.fetch.timeout = fetch_timeout;
  c.fetch.retries = fetch_retries;
  c.fetch.parallelism = fetch_parallelism;
  c.fetch.offline_mode = offline_mode;
  c.fetch.cache_dir = cache_dir;
  return c;
}

ConfigLayer config_from_env(const EnvLookup& lookup) {
  ConfigLayer layer;
  auto get = [&](const char* name) -> std::optional<std::string> {
    const char* v = lookup(name);
    if (!v) return std::nullopt;
    return std::string(v);
  };
  layer.data_dir = get("SECMATCH_DATA_DIR");
  layer.listen_addr = get("SECMATCH_LISTEN_ADDR");
  layer.cache_dir = get("SECMATCH_CACHE_DIR");
  if (auto v = get("SECMATCH_OFFLINE")) layer.offline_mode = parse_bool("SECMATCH_OFFLINE", *v);
  if (auto v = get("SECMATCH_FETCH_TIMEOUT")) {
    layer.fetch_timeout_seconds = parse_long("SECMATCH_FETCH_TIMEOUT", *v);
  }
  if (auto v = get("SECMATCH_FETCH_RETRIES")) {
    layer.fetch_retries = parse_long("SECMATCH_FETCH_RETRIES", *v);
  }
  if (auto v = get("SECMATCH_FETCH_PARALLELISM")) {
    layer.fetch_parallelism = parse_long("SECMATCH_FETCH_PARALLELISM", *v);
  }
  if (auto v = get("SECMATCH_WORKERS")) layer.worker_count = parse_long("SECMATCH_WORKERS", *v);
  return layer;
}

ConfigLayer config_from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(Errc::config, "config file is not a JSON object: " + path.string());
  }
  ConfigLayer layer;
  try {
    auto str = [&](const char* key, std::optional<std::string>& out) {
      if (j.contains(key)) out = j.at(key).get<std::string>();
    };
    auto num = [&](const char* key, std::optional<long>& out) {
      if (j.contains(key)) out = j.at(key).get<long>();
    };
    str("data_dir", layer.data_dir);
    str("listen_addr", layer.listen_addr);
    str("cache_dir", layer.cache_dir);
    if (j.contains("offline_mode")) layer.offline_mode = j.at("offline_mode").get<bool>();
    num("fetch_timeout_seconds", layer.fetch_timeout_seconds);
    num("fetch_retries", layer.fetch_retries);
    num("fetch_parallelism", layer.fetch_parallelism);
    num("worker_count", layer.worker_count);
  } catch (const Json::exception& e) {
    throw Error(Errc::config, path.string() + ": " + e.what());
  }
  return layer;
}

AppConfig resolve_config(const ConfigLayer& flags, const ConfigLayer& env, const ConfigLayer& file) {
  AppConfig c;
  const std::string data_dir = pick(flags.data_dir, env.data_dir, file.data_dir, std::string());
  if (data_dir.empty()) {
    throw Error(Errc::config, "data directory not configured (--data-dir or SECMATCH_DATA_DIR)");
  }
  c.data_dir = data_dir;
  c.listen_addr = pick(flags.listen_addr, env.listen_addr, file.listen_addr, c.listen_addr);
  const std::string cache = pick(flags.cache_dir, env.cache_dir, file.cache_dir, std::string());
  c.cache_dir = cache.empty() ? c.data_dir / "cache" : std::filesystem::path(cache);
  c.offline_mode = pick(flags.offline_mode, env.offline_mode, file.offline_mode, false);
  c.fetch_timeout = std::chrono::seconds(in_range(
      "fetch_timeout_seconds",
      pick(flags.fetch_timeout_seconds, env.fetch_timeout_seconds, file.fetch_timeout_seconds, 20L),
      1, 3600));
  c.fetch_retries = static_cast<int>(in_range(
      "fetch_retries", pick(flags.fetch_retries, env.fetch_retries, file.fetch_retries, 2L), 0, 10));
  c.fetch_parallelism = static_cast<std::size_t>(in_range(
      "fetch_parallelism",
      pick(flags.fetch_parallelism, env.fetch_parallelism, file.fetch_parallelism, 4L), 1, 64));
  c.worker_count = static_cast<std::size_t>(in_range(
      "worker_count", pick(flags.worker_count, env.worker_count, file.worker_count, 1L), 0, 64));
  return c;
}

}  // namespace secmatch
