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

#include "secmatch/http_api.hpp"

#include <charconv>
#include <functional>
#include <stdexcept>

#include <httplib.h>

#include "secmatch/report.hpp"

namespace secmatch {
namespace {

// Structurally invalid request: bad JSON, missing field, wrong type.
class BadRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

Json parse_body(const httplib::Request& req, bool allow_empty) {
  if (req.body.empty()) {
    if (allow_empty) return Json::object();
    throw BadRequest("request body required");
  }
  Json j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw BadRequest("request body is not valid JSON");
  if (!j.is_object()) throw BadRequest("request body must be a JSON object");
  return j;
}

std::string required_string(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw BadRequest(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

template <class T>
T optional_unsigned(const Json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number_unsigned()) {
    throw BadRequest(std::string("field '") + key + "' must be a nonnegative integer");
  }
  const auto v = it->get<std::uint64_t>();
  if (v > std::numeric_limits<T>::max()) throw BadRequest(std::string("field '") + key + "' too large");
  return static_cast<T>(v);
}

std::string bearer_token(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return {};
  return header.substr(prefix.size());
}

const httplib::MultipartFormData& form_field(const httplib::Request& req, const char* name) {
  if (!req.is_multipart_form_data()) throw BadRequest("multipart/form-data body required");
  if (!req.has_file(name)) throw BadRequest(std::string("form field '") + name + "' required");
  return req.files.find(name)->second;
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;
using AuthedHandler =
    std::function<void(const std::string& user_id, const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const BadRequest& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const Json::exception& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const Error& e) {
      const int status = http_status(e.code());
      // Internal details stay in the server log.
      send_error(res, status, errc_name(e.code()), status == 500 ? "internal error" : e.what());
    } catch (const std::exception&) {
      send_error(res, 500, "internal", "internal error");
    }
  };
}

Handler authed(Service& service, AuthedHandler fn) {
  return guarded([&service, fn = std::move(fn)](const httplib::Request& req,
                                                httplib::Response& res) {
    const std::string user_id = service.authenticate(bearer_token(req));
    fn(user_id, req, res);
  });
}

void register_routes(httplib::Server& server, Service& service) {
  server.Post("/api/register", guarded([&](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req, false);
    const auto user =
        service.register_user(required_string(body, "username"), required_string(body, "password"));
    send_json(res, 201, {{"user_id", user.user_id}, {"username", user.username}});
  }));

  server.Post("/api/login", guarded([&](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req, false);
    const std::string token =
        service.login(required_string(body, "username"), required_string(body, "password"));
    send_json(res, 200, {{"token", token}});
  }));

  server.Post("/api/logout", guarded([&](const httplib::Request& req, httplib::Response& res) {
    service.logout(bearer_token(req));
    send_json(res, 200, {{"ok", true}});
  }));

  server.Post("/api/files", authed(service, [&](const std::string& user, const httplib::Request& req,
                                                httplib::Response& res) {
    const auto& field = form_field(req, "file");
    const auto file = service.upload_file(user, field.filename.empty() ? "upload.txt" : field.filename,
                                          field.content);
    send_json(res, 201, {{"file_id", file.file_id},
                         {"filename", file.filename},
                         {"tokens", file.clean_document.tokens.size()},
                         {"uploaded_at", format_iso8601(file.uploaded_at)}});
  }));

  server.Post("/api/datasets", authed(service, [&](const std::string& user,
                                                   const httplib::Request& req,
                                                   httplib::Response& res) {
    const auto& csv = form_field(req, "csv");
    const auto& name = form_field(req, "name");
    const auto created = service.create_dataset(user, name.content, csv.content);
    Json body = dataset_to_json(created.meta);
    Json row_errors = Json::array();
    for (const auto& e : created.row_errors) {
      row_errors.push_back({{"row", e.row_number}, {"error", e.message}});
    }
    body["row_errors"] = std::move(row_errors);
    send_json(res, 201, body);
  }));

  server.Get("/api/datasets", authed(service, [&](const std::string& user, const httplib::Request&,
                                                  httplib::Response& res) {
    Json list = Json::array();
    for (const auto& meta : service.list_datasets(user)) list.push_back(dataset_to_json(meta));
    send_json(res, 200, {{"datasets", std::move(list)}});
  }));

  server.Post("/api/datasets/:id/train", authed(service, [&](const std::string& user,
                                                             const httplib::Request& req,
                                                             httplib::Response& res) {
    const Json body = parse_body(req, true);
    const Job job = service.submit_train(user, req.path_params.at("id"),
                                         optional_unsigned<std::uint32_t>(body, "num_topics", 10),
                                         optional_unsigned<std::uint64_t>(body, "seed", 42));
    send_json(res, 202, {{"job_id", job.job_id}, {"state", to_string(job.state)}});
  }));

  server.Get("/api/datasets/:id/topics", authed(service, [&](const std::string& user,
                                                             const httplib::Request& req,
                                                             httplib::Response& res) {
    std::size_t words = 10;
    if (req.has_param("words")) {
      const std::string raw = req.get_param_value("words");
      const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), words);
      if (ec != std::errc() || end != raw.data() + raw.size()) {
        throw BadRequest("words must be a positive integer");
      }
    }
    const DatasetMeta meta = service.dataset_meta(user, req.path_params.at("id"));
    Json topics = Json::array();
    for (const auto& t : service.topics(user, meta.dataset_id, words)) {
      Json list = Json::array();
      for (const auto& [word, weight] : t.words) list.push_back({{"word", word}, {"weight", weight}});
      topics.push_back({{"topic", t.topic}, {"words", std::move(list)}});
    }
    send_json(res, 200, {{"dataset_id", meta.dataset_id},
                         {"model_version", meta.model_version},
                         {"topics", std::move(topics)}});
  }));

  server.Post("/api/compare", authed(service, [&](const std::string& user,
                                                  const httplib::Request& req,
                                                  httplib::Response& res) {
    const Json body = parse_body(req, false);
    const std::string file_id = required_string(body, "file_id");
    const auto ids = body.find("dataset_ids");
    if (ids == body.end() || !ids->is_array()) throw BadRequest("field 'dataset_ids' must be an array");
    std::vector<std::string> dataset_ids;
    for (const auto& id : *ids) {
      if (!id.is_string()) throw BadRequest("dataset_ids must hold strings");
      dataset_ids.push_back(id.get<std::string>());
    }
    CompareParams params;
    if (const auto p = body.find("params"); p != body.end() && !p->is_null()) {
      if (!p->is_object()) throw BadRequest("field 'params' must be an object");
      params = params_from_json(*p);
    }
    const Job job = service.submit_compare(user, file_id, dataset_ids, params);
    send_json(res, 202, {{"job_id", job.job_id}, {"state", to_string(job.state)}});
  }));

  server.Get("/api/jobs/:id", authed(service, [&](const std::string& user,
                                                  const httplib::Request& req,
                                                  httplib::Response& res) {
    send_json(res, 200, job_to_json(service.get_job(user, req.path_params.at("id"))));
  }));

  server.Get("/api/jobs/:id/report", authed(service, [&](const std::string& user,
                                                         const httplib::Request& req,
                                                         httplib::Response& res) {
    try {
      send_json(res, 200, report_to_json(service.get_report(user, req.path_params.at("id"))));
    } catch (const Error& e) {
      if (e.code() != Errc::state) throw;
      send_error(res, 409, errc_name(e.code()), e.what());
    }
  }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "not_found" : "http",
                 httplib::status_message(res.status));
    }
  });
}

}  // namespace

int http_status(Errc code) {
  switch (code) {
    case Errc::unauthenticated: return 401;
    case Errc::forbidden: return 403;
    case Errc::not_found: return 404;
    case Errc::duplicate_key: return 409;
    case Errc::config:
    case Errc::invalid_argument:
    case Errc::empty_corpus:
    case Errc::no_tokens:
    case Errc::dictionary_mismatch:
    case Errc::schema:
    case Errc::state:
    case Errc::model_missing:
    case Errc::fetch_timeout:
    case Errc::fetch_status:
    case Errc::fetch_too_large:
    case Errc::fetch_cache_miss:
    case Errc::fetch_network:
      return 422;
    case Errc::corrupt_container:
    case Errc::unsupported_version:
    case Errc::checksum_mismatch:
    case Errc::invariant_violation:
    case Errc::storage_io:
      return 500;
  }
  return 500;
}

std::pair<std::string, int> parse_listen_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(Errc::config, "listen address must be host:port: " + addr);
  }
  int port = -1;
  const char* first = addr.data() + colon + 1;
  const char* last = addr.data() + addr.size();
  const auto [end, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || end != last || port < 0 || port > 65535) {
    throw Error(Errc::config, "invalid port in listen address: " + addr);
  }
  return {addr.substr(0, colon), port};
}

ApiServer::ApiServer(Service& service) : server_(std::make_unique<httplib::Server>()) {
  server_->set_payload_max_length(64ull << 20);
  register_routes(*server_, service);
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(Errc::config, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(Errc::config, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void ApiServer::listen() { server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_->is_running()) server_->stop();
}

}  // namespace secmatch
