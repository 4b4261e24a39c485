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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace secmatch {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::byte> bytes);
Digest sha256(std::string_view bytes);

std::string to_hex(const Digest& digest);
// Throws Error(invalid_argument) unless the input is 64 hex characters.
Digest digest_from_hex(std::string_view hex);

// URL-safe base64 of `num_bytes` bytes from the system CSPRNG.
std::string random_token(std::size_t num_bytes = 32);

}  // namespace secmatch
