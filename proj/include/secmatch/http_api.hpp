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

#include <memory>
#include <string>
#include <utility>

#include "secmatch/error.hpp"
#include "secmatch/service.hpp"

namespace httplib {
class Server;
}

namespace secmatch {

// Status code the API answers with for a library error.
int http_status(Errc code);

// "host:port" split; throws Error(config) when malformed.
std::pair<std::string, int> parse_listen_addr(const std::string& addr);

// JSON API under /api. Request handlers are stateless; all state goes
// through the Service and its store.
class ApiServer {
 public:
  explicit ApiServer(Service& service);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

  httplib::Server& server() { return *server_; }

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace secmatch
