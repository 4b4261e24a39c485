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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "secmatch/error.hpp"
#include "secmatch/fetch.hpp"
#include "testing.hpp"

namespace secmatch {
namespace {

class LocalSite {
 public:
  LocalSite() {
    server_.Get("/page", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<html><body><p>Incident page</p></body></html>", "text/html");
    });
    server_.Get("/text", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("plain words", "text/plain");
    });
    server_.Get("/redirect", [](const httplib::Request&, httplib::Response& res) {
      res.set_redirect("/page");
    });
    server_.Get("/loop", [](const httplib::Request&, httplib::Response& res) {
      res.set_redirect("/loop");
    });
    server_.Get("/missing", [](const httplib::Request&, httplib::Response& res) {
      res.status = 404;
    });
    server_.Get("/flaky", [this](const httplib::Request&, httplib::Response& res) {
      if (flaky_hits_++ < 2) {
        res.status = 503;
        return;
      }
      res.set_content("recovered", "text/plain");
    });
    server_.Get("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    server_.Get("/big", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(4096, 'x'), "text/plain");
    });
    server_.Get("/stream", [](const httplib::Request&, httplib::Response& res) {
      res.set_chunked_content_provider("text/plain", [](std::size_t, httplib::DataSink& sink) {
        const std::string chunk(1024, 'y');
        for (int i = 0; i < 8; ++i) sink.write(chunk.data(), chunk.size());
        sink.done();
        return true;
      });
    });
    server_.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(2500));
      res.set_content("late", "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalSite() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  int flaky_hits() const { return flaky_hits_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> flaky_hits_{0};
};

Errc fetch_error(Fetcher& f, const std::string& url) {
  try {
    f.fetch_page(url);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "fetch of " << url << " succeeded";
  return Errc::config;
}

FetchPolicy policy_in(const testing::TempDir& dir) {
  FetchPolicy p;
  p.cache_dir = dir / "cache";
  p.timeout = std::chrono::seconds(5);
  return p;
}

TEST(Url, Validation) {
  EXPECT_TRUE(is_valid_http_url("https://example.org/a?b=c"));
  EXPECT_TRUE(is_valid_http_url("http://127.0.0.1:8080/"));
  EXPECT_FALSE(is_valid_http_url("ftp://example.org/"));
  EXPECT_FALSE(is_valid_http_url("https://"));
  EXPECT_FALSE(is_valid_http_url("example.org"));
  EXPECT_FALSE(is_valid_http_url("https://exa mple.org/"));
}

TEST(FetchPolicy, Validation) {
  FetchPolicy p;
  EXPECT_NO_THROW(p.validate());
  p.parallelism = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.offline_mode = true;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Fetcher, FetchesExtractsAndCaches) {
  LocalSite site;
  testing::TempDir dir;
  Fetcher f(policy_in(dir));
  const RawDocument doc = f.fetch_url(site.url("/page"), "r000001");
  EXPECT_EQ(doc.raw_text, "Incident page");
  EXPECT_EQ(doc.doc_id, "r000001");
  EXPECT_EQ(doc.source, site.url("/page"));
  EXPECT_TRUE(doc.retrieved_at.has_value());

  const auto cached = read_cache_entry(dir / "cache", site.url("/page"));
  ASSERT_TRUE(cached.has_value());
  EXPECT_EQ(cached->content_type, "text/html");
  EXPECT_EQ(cached->status, 200);
  EXPECT_TRUE(std::filesystem::exists(dir / "cache" / cache_key(site.url("/page"))));
  EXPECT_EQ(cache_key("https://a.test/"), to_hex(sha256(std::string_view("https://a.test/"))));
}

TEST(Fetcher, EachUrlHitsNetworkOnce) {
  LocalSite site;
  testing::TempDir dir;
  Fetcher f(policy_in(dir));
  f.fetch_page(site.url("/text"));
  f.fetch_page(site.url("/text"));
  EXPECT_EQ(f.network_requests(), 1u);
  EXPECT_EQ(fetch_error(f, site.url("/missing")), Errc::fetch_status);
  EXPECT_EQ(fetch_error(f, site.url("/missing")), Errc::fetch_status);
  EXPECT_EQ(f.network_requests(), 2u);
}

TEST(Fetcher, ConcurrentCallersShareOneRequest) {
  LocalSite site;
  testing::TempDir dir;
  Fetcher f(policy_in(dir));
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) threads.emplace_back([&] { f.fetch_page(site.url("/text")); });
  for (auto& t : threads) t.join();
  EXPECT_EQ(f.network_requests(), 1u);
}

TEST(Fetcher, FollowsRedirects) {
  LocalSite site;
  testing::TempDir dir;
  Fetcher f(policy_in(dir));
  const auto page = f.fetch_page(site.url("/redirect"));
  EXPECT_EQ(page.url, site.url("/redirect"));
  EXPECT_NE(page.body.find("Incident page"), std::string::npos);
  EXPECT_EQ(fetch_error(f, site.url("/loop")), Errc::fetch_status);
}

TEST(Fetcher, RetriesServerErrors) {
  LocalSite site;
  testing::TempDir dir;
  Fetcher f(policy_in(dir));
  EXPECT_EQ(f.fetch_page(site.url("/flaky")).body, "recovered");
  EXPECT_EQ(site.flaky_hits(), 3);

  FetchPolicy no_retry = policy_in(dir);
  no_retry.retries = 0;
  Fetcher once(no_retry);
  EXPECT_EQ(fetch_error(once, site.url("/broken")), Errc::fetch_status);
  EXPECT_EQ(once.network_requests(), 1u);
}

TEST(Fetcher, SizeCap) {
  LocalSite site;
  testing::TempDir dir;
  FetchPolicy p = policy_in(dir);
  p.max_bytes = 1000;
  Fetcher f(p);
  EXPECT_EQ(fetch_error(f, site.url("/big")), Errc::fetch_too_large);
  EXPECT_EQ(fetch_error(f, site.url("/stream")), Errc::fetch_too_large);
  EXPECT_EQ(f.fetch_page(site.url("/text")).body, "plain words");
}

TEST(Fetcher, Timeout) {
  LocalSite site;
  testing::TempDir dir;
  FetchPolicy p = policy_in(dir);
  p.timeout = std::chrono::seconds(1);
  p.retries = 0;
  Fetcher f(p);
  EXPECT_EQ(fetch_error(f, site.url("/slow")), Errc::fetch_timeout);
}

TEST(Fetcher, ConnectionRefusedIsNetworkError) {
  testing::TempDir dir;
  FetchPolicy p = policy_in(dir);
  p.retries = 0;
  Fetcher f(p);
  EXPECT_EQ(fetch_error(f, "http://127.0.0.1:1/"), Errc::fetch_network);
  EXPECT_EQ(fetch_error(f, "not a url"), Errc::fetch_network);
}

TEST(Fetcher, OfflineReadsOnlyTheCache) {
  testing::TempDir dir;
  FetchPolicy p;
  p.offline_mode = true;
  p.cache_dir = testing::fixture("cache");
  Fetcher f(p);
  const auto doc = f.fetch_url("https://incidents.example.org/ddos-api-gateway.html", "r1");
  EXPECT_NE(doc.raw_text.find("botnet"), std::string::npos);
  EXPECT_EQ(fetch_error(f, "https://incidents.example.org/absent.html"), Errc::fetch_cache_miss);
  EXPECT_EQ(f.network_requests(), 0u);
}

TEST(Cache, WriteReadRoundTrip) {
  testing::TempDir dir;
  FetchedPage page{"https://x.test/a", "body bytes", "text/plain", 200,
                   parse_iso8601("2026-01-02T03:04:05Z")};
  write_cache_entry(dir.path(), page);
  const auto back = read_cache_entry(dir.path(), "https://x.test/a");
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->body, page.body);
  EXPECT_EQ(back->content_type, page.content_type);
  EXPECT_EQ(back->retrieved_at, page.retrieved_at);
  EXPECT_FALSE(read_cache_entry(dir.path(), "https://x.test/b").has_value());
}

TEST(Cache, FixtureEntriesMatchPages) {
  for (const auto& entry : std::filesystem::directory_iterator(testing::fixture("pages"))) {
    const std::string url = "https://incidents.example.org/" + entry.path().filename().string();
    const auto cached = read_cache_entry(testing::fixture("cache"), url);
    ASSERT_TRUE(cached.has_value()) << url;
    EXPECT_EQ(cached->body, testing::read_file(entry.path())) << url;
  }
}

}  // namespace
}  // namespace secmatch
