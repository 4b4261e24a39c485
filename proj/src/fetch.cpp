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

#include "secmatch/fetch.hpp"

#include <httplib.h>

#include <cctype>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "secmatch/crypto.hpp"
#include "secmatch/error.hpp"
#include "secmatch/html.hpp"

namespace secmatch {
namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

std::optional<ParsedUrl> parse_url(std::string_view url) {
  std::string_view rest;
  std::string scheme;
  auto iprefix = [&](std::string_view p) {
    if (url.size() < p.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(url[i])) != p[i]) return false;
    }
    return true;
  };
  if (iprefix("http://")) {
    scheme = "http";
    rest = url.substr(7);
  } else if (iprefix("https://")) {
    scheme = "https";
    rest = url.substr(8);
  } else {
    return std::nullopt;
  }
  const auto slash = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, slash);
  std::string path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (!path.empty() && path[0] != '/') path.insert(path.begin(), '/');
  if (const auto hash = path.find('#'); hash != std::string::npos) path.resize(hash);
  if (authority.find('@') != std::string_view::npos) return std::nullopt;
  std::string_view host = authority;
  if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    const std::string_view port = authority.substr(colon + 1);
    if (port.empty() || port.size() > 5) return std::nullopt;
    for (char c : port) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    }
    host = authority.substr(0, colon);
  }
  if (host.empty() || host.front() == '.' || host.front() == '-') return std::nullopt;
  for (char c : host) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') return std::nullopt;
  }
  return ParsedUrl{scheme + "://" + std::string(authority), path};
}

std::string resolve_location(const ParsedUrl& base, const std::string& location) {
  if (parse_url(location)) return location;
  if (location.rfind("//", 0) == 0) {
    return base.origin.substr(0, base.origin.find("://") + 1) + location;
  }
  if (!location.empty() && location[0] == '/') return base.origin + location;
  const auto dir = base.path.substr(0, base.path.rfind('/') + 1);
  return base.origin + dir + location;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::storage_io, "cannot write cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void FetchPolicy::validate() const {
  if (timeout.count() <= 0) throw Error(Errc::config, "fetch timeout must be positive");
  if (max_bytes == 0) throw Error(Errc::config, "fetch max_bytes must be positive");
  if (retries < 0) throw Error(Errc::config, "fetch retries must be >= 0");
  if (parallelism == 0) throw Error(Errc::config, "fetch parallelism must be >= 1");
  if (offline_mode && cache_dir.empty()) {
    throw Error(Errc::config, "offline mode needs a cache directory");
  }
}

bool is_valid_http_url(std::string_view url) {
  for (char c : url) {
    if (static_cast<unsigned char>(c) <= 0x20 || c == 0x7f) return false;
  }
  return parse_url(url).has_value();
}

std::string cache_key(std::string_view url) { return to_hex(sha256(url)); }

void write_cache_entry(const std::filesystem::path& cache_dir, const FetchedPage& page) {
  std::filesystem::create_directories(cache_dir);
  const std::string key = cache_key(page.url);
  nlohmann::json meta = {{"url", page.url},
                         {"content_type", page.content_type},
                         {"status", page.status}};
  if (page.retrieved_at) meta["retrieved_at"] = format_iso8601(*page.retrieved_at);
  write_file_atomic(cache_dir / key, page.body);
  write_file_atomic(cache_dir / (key + ".meta.json"), meta.dump(2) + "\n");
}

std::optional<FetchedPage> read_cache_entry(const std::filesystem::path& cache_dir,
                                            std::string_view url) {
  if (cache_dir.empty()) return std::nullopt;
  const std::string key = cache_key(url);
  const auto body_path = cache_dir / key;
  if (!std::filesystem::is_regular_file(body_path)) return std::nullopt;
  FetchedPage page;
  page.url = std::string(url);
  page.body = read_file(body_path);
  const auto meta_path = cache_dir / (key + ".meta.json");
  if (std::filesystem::is_regular_file(meta_path)) {
    const auto meta = nlohmann::json::parse(read_file(meta_path), nullptr, false);
    if (meta.is_object()) {
      page.content_type = meta.value("content_type", std::string());
      page.status = meta.value("status", 200);
      if (meta.contains("retrieved_at") && meta["retrieved_at"].is_string()) {
        page.retrieved_at = parse_iso8601(meta["retrieved_at"].get<std::string>());
      }
    }
  }
  return page;
}

Fetcher::Fetcher(FetchPolicy policy) : policy_(std::move(policy)) { policy_.validate(); }

FetchedPage Fetcher::fetch_page(const std::string& url) {
  std::shared_future<FetchedPage> result;
  std::promise<FetchedPage> promise;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    auto it = memo_.find(url);
    if (it == memo_.end()) {
      it = memo_.emplace(url, promise.get_future().share()).first;
      owner = true;
    }
    result = it->second;
  }
  if (owner) {
    try {
      if (!is_valid_http_url(url)) throw Error(Errc::fetch_network, "invalid URL: " + url);
      if (policy_.offline_mode) {
        auto page = read_cache_entry(policy_.cache_dir, url);
        if (!page) throw Error(Errc::fetch_cache_miss, "offline cache miss");
        promise.set_value(std::move(*page));
      } else {
        promise.set_value(fetch_network(url));
      }
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return result.get();
}

RawDocument Fetcher::fetch_url(const std::string& url, std::string doc_id) {
  FetchedPage page = fetch_page(url);
  RawDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.source = url;
  doc.raw_text = extract_text(page.body, page.content_type);
  doc.retrieved_at = page.retrieved_at;
  return doc;
}

FetchedPage Fetcher::fetch_network(const std::string& original_url) {
  std::string url = original_url;
  for (int hop = 0;; ++hop) {
    const auto parsed = parse_url(url);
    if (!parsed) throw Error(Errc::fetch_network, "invalid URL: " + url);

    std::optional<Error> last_error;
    for (int attempt = 0; attempt <= policy_.retries; ++attempt) {
      httplib::Client client(parsed->origin);
      client.set_connection_timeout(policy_.timeout);
      client.set_read_timeout(policy_.timeout);
      client.set_write_timeout(policy_.timeout);
      client.set_follow_location(false);

      std::string body;
      std::string content_type;
      bool too_large = false;
      int status = 0;
      std::string location;
      ++network_requests_;
      auto res = client.Get(
          parsed->path, httplib::Headers{{"Accept", "text/html, text/plain;q=0.9, */*;q=0.5"}},
          [&](const httplib::Response& response) {
            status = response.status;
            content_type = response.get_header_value("Content-Type");
            location = response.get_header_value("Location");
            if (response.has_header("Content-Length")) {
              std::uint64_t len = 0;
              try {
                len = std::stoull(response.get_header_value("Content-Length"));
              } catch (const std::exception&) {
                len = 0;
              }
              if (len > policy_.max_bytes) {
                too_large = true;
                return false;
              }
            }
            return true;
          },
          [&](const char* data, std::size_t n) {
            if (body.size() + n > policy_.max_bytes) {
              too_large = true;
              return false;
            }
            body.append(data, n);
            return true;
          });

      if (too_large) throw Error(Errc::fetch_too_large, "size cap exceeded");
      if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
          last_error = Error(Errc::fetch_timeout, "timeout fetching " + url);
        } else {
          last_error = Error(Errc::fetch_network, "network error fetching " + url + ": " +
                                                      httplib::to_string(err));
        }
        continue;
      }
      if (status >= 300 && status < 400 && !location.empty()) {
        if (hop >= policy_.max_redirects) {
          throw Error(Errc::fetch_status, "too many redirects fetching " + original_url);
        }
        url = resolve_location(*parsed, location);
        last_error.reset();
        break;
      }
      if (status >= 500) {
        last_error = Error(Errc::fetch_status, "HTTP " + std::to_string(status));
        continue;
      }
      if (status < 200 || status >= 300) {
        throw Error(Errc::fetch_status, "HTTP " + std::to_string(status));
      }

      FetchedPage page{original_url, std::move(body), content_type, status, now_seconds()};
      if (!policy_.cache_dir.empty()) write_cache_entry(policy_.cache_dir, page);
      return page;
    }
    if (last_error) throw *last_error;
  }
}

}  // namespace secmatch
