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

#include <stdexcept>
#include <string>
#include <string_view>

namespace secmatch {

enum class Errc {
  config,
  invalid_argument,
  empty_corpus,
  no_tokens,
  dictionary_mismatch,
  corrupt_container,
  unsupported_version,
  checksum_mismatch,
  invariant_violation,
  schema,
  not_found,
  duplicate_key,
  storage_io,
  unauthenticated,
  forbidden,
  state,
  model_missing,
  fetch_timeout,
  fetch_status,
  fetch_too_large,
  fetch_cache_miss,
  fetch_network,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure surfaced by the library carries one of the codes above so the
// HTTP layer and the CLI can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace secmatch
