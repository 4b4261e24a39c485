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

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "secmatch/config.hpp"
#include "secmatch/crypto.hpp"
#include "secmatch/error.hpp"
#include "secmatch/http_api.hpp"
#include "secmatch/report.hpp"
#include "secmatch/service.hpp"

namespace {

using namespace secmatch;

// Identity the CLI acts under. Its datasets are public so API users can
// compare against them.
constexpr const char* kOperator = "operator";

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitHighlights = 3;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::not_found, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::storage_io, "cannot write " + path.string());
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

int print_report(const ComparisonReport& report) {
  print_json(report_to_json(report));
  return report.highlights.empty() ? kExitOk : kExitHighlights;
}

Job finish(Service& service, const Job& submitted) {
  Job job = service.run_job(submitted.job_id);
  if (job.state == JobState::failed) throw Error(Errc::state, *job.error);
  return job;
}

int serve(Service& service, const AppConfig& config) {
  WorkerPool workers(service, config.worker_count);
  ApiServer api(service);
  const auto [host, port] = parse_listen_addr(config.listen_addr);
  const int bound = api.bind(host, port);
  std::cout << "listening on http://" << host << ':' << bound << std::endl;

  std::thread([&api] {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    int sig = 0;
    sigwait(&set, &sig);
    api.stop();
  }).detach();
  api.listen();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-gated similarity search of pipeline artifacts against incident corpora"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string data_dir, config_path, cache_dir;
  bool offline = false;
  long fetch_timeout = 0;
  long workers = 0;
  app.add_option("--data-dir", data_dir, "Data directory (env SECMATCH_DATA_DIR)");
  app.add_option("--config", config_path, "JSON config file (env SECMATCH_CONFIG)");
  app.add_option("--cache-dir", cache_dir, "Fetch cache directory");
  auto* offline_flag = app.add_flag("--offline", offline, "Fetch only from the cache");
  auto* timeout_opt = app.add_option("--fetch-timeout", fetch_timeout, "Fetch timeout in seconds");
  auto* workers_opt = app.add_option("--workers", workers, "Background job workers for serve");

  std::string csv_path, dataset_name;
  auto* ingest = app.add_subcommand("ingest", "Fetch and preprocess a dataset table");
  ingest->add_option("csv", csv_path, "CSV with a reference column")->required();
  ingest->add_option("--name", dataset_name, "Dataset name")->required();
  ingest->add_flag("--offline", offline, "Fetch only from the cache");

  std::string dataset;
  std::uint32_t num_topics = 10;
  std::uint64_t seed = 42;
  std::string model_out;
  auto* train = app.add_subcommand("train", "Train the topic model of a dataset");
  train->add_option("dataset", dataset, "Dataset name or id")->required();
  train->add_option("--topics", num_topics, "Number of topics")->capture_default_str();
  train->add_option("--seed", seed, "Sampler seed")->capture_default_str();
  train->add_option("--out", model_out, "Also write the model container to this file");

  std::string file_path;
  std::vector<std::string> datasets;
  CompareParams params;
  bool no_gate = false;
  auto* cmp = app.add_subcommand("compare", "Compare a file against trained datasets");
  cmp->add_option("file", file_path, "Release notes, log or other text file")->required();
  cmp->add_option("--datasets", datasets, "Dataset names or ids")->required()->delimiter(',');
  cmp->add_option("--k", params.k, "Number of results")->capture_default_str();
  cmp->add_option("--threshold", params.highlight_threshold, "Highlight threshold")
      ->capture_default_str();
  cmp->add_option("--relevance-threshold", params.relevance_gate_threshold,
                  "Topic relevance gate threshold")
      ->capture_default_str();
  cmp->add_flag("--no-gate", no_gate, "Disable the relevance gate");

  std::string job_id;
  auto* report = app.add_subcommand("report", "Print the report of a comparison job");
  report->add_option("job", job_id, "Job id")->required();

  std::size_t words = 10;
  auto* topics = app.add_subcommand("topics", "Print the top words of every topic");
  topics->add_option("dataset", dataset, "Dataset name or id")->required();
  topics->add_option("--words", words, "Words per topic")->capture_default_str();

  std::string addr;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API and job workers");
  serve_cmd->add_option("--addr", addr, "Listen address host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    ConfigLayer flags;
    if (!data_dir.empty()) flags.data_dir = data_dir;
    if (!cache_dir.empty()) flags.cache_dir = cache_dir;
    if (!addr.empty()) flags.listen_addr = addr;
    if (offline_flag->count() > 0 || offline) flags.offline_mode = true;
    if (timeout_opt->count() > 0) flags.fetch_timeout_seconds = fetch_timeout;
    if (workers_opt->count() > 0) flags.worker_count = workers;
    const EnvLookup env_lookup = [](const char* name) { return std::getenv(name); };
    const ConfigLayer env = config_from_env(env_lookup);
    if (config_path.empty()) {
      if (const char* p = std::getenv("SECMATCH_CONFIG")) config_path = p;
    }
    const ConfigLayer file = config_path.empty() ? ConfigLayer{} : config_from_file(config_path);
    const AppConfig config = resolve_config(flags, env, file);

    if (*serve_cmd) {
      // Signals are taken by a dedicated thread; block them everywhere else
      // before any thread starts.
      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);
    }

    Service service(config.service_config());

    if (*ingest) {
      const auto created = service.create_dataset(kOperator, dataset_name, read_file(csv_path), true);
      Json out = dataset_to_json(created.meta);
      Json row_errors = Json::array();
      for (const auto& e : created.row_errors) {
        row_errors.push_back({{"row", e.row_number}, {"error", e.message}});
      }
      out["row_errors"] = std::move(row_errors);
      print_json(out);
      for (const auto& f : created.meta.fetch_failures) {
        std::cerr << created.meta.rows.at(f.row_index).reference << ": " << f.error << '\n';
      }
      return created.meta.status == DatasetStatus::failed ? kExitError : kExitOk;
    }
    if (*train) {
      const Job job = finish(service, service.submit_train(kOperator, dataset, num_topics, seed));
      const std::string container = service.model_container(kOperator, job.dataset_ids.at(0));
      if (!model_out.empty()) write_file(model_out, container);
      print_json({{"job_id", job.job_id},
                  {"dataset_id", job.dataset_ids.at(0)},
                  {"model_version", *job.model_version},
                  {"model_sha256", to_hex(sha256(container))}});
      return kExitOk;
    }
    if (*cmp) {
      params.gate_enabled = !no_gate;
      params.validate();
      const std::filesystem::path path(file_path);
      const UploadedFile file =
          service.upload_file(kOperator, path.filename().string(), read_file(path));
      const Job job = finish(service, service.submit_compare(kOperator, file.file_id, datasets, params));
      return print_report(*job.report);
    }
    if (*report) {
      const Job job = service.get_job(kOperator, job_id);
      if (job.state == JobState::done && job.report) return print_report(*job.report);
      print_json(job_to_json(job));
      return job.state == JobState::failed ? kExitError : kExitOk;
    }
    if (*topics) {
      const DatasetMeta meta = service.dataset_meta(kOperator, dataset);
      Json list = Json::array();
      for (const auto& t : service.topics(kOperator, meta.dataset_id, words)) {
        Json ws = Json::array();
        for (const auto& [word, weight] : t.words) ws.push_back({{"word", word}, {"weight", weight}});
        list.push_back({{"topic", t.topic}, {"words", std::move(ws)}});
      }
      print_json({{"dataset_id", meta.dataset_id},
                  {"model_version", meta.model_version},
                  {"topics", std::move(list)}});
      return kExitOk;
    }
    if (*serve_cmd) return serve(service, config);
  } catch (const Error& e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
