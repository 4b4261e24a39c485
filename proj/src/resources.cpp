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

#include "secmatch/resources.hpp"

#include <map>
#include <string>

#include "secmatch/error.hpp"

namespace secmatch {
namespace detail {
const std::map<std::string, std::string_view, std::less<>>& embedded_resources();
}  // namespace detail

std::string_view bundled_resource(std::string_view name) {
  const auto& table = detail::embedded_resources();
  auto it = table.find(name);
  if (it == table.end()) {
    throw Error(Errc::config, "bundled resource not found: " + std::string(name));
  }
  return it->second;
}

bool has_bundled_resource(std::string_view name) {
  return detail::embedded_resources().contains(name);
}

}  // namespace secmatch
