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

#include "secmatch/crypto.hpp"

#include <sodium.h>

#include <stdexcept>
#include <vector>

#include "secmatch/error.hpp"

namespace secmatch {
namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::config: return "config";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::empty_corpus: return "empty_corpus";
    case Errc::no_tokens: return "no_tokens";
    case Errc::dictionary_mismatch: return "dictionary_mismatch";
    case Errc::corrupt_container: return "corrupt_container";
    case Errc::unsupported_version: return "unsupported_version";
    case Errc::checksum_mismatch: return "checksum_mismatch";
    case Errc::invariant_violation: return "invariant_violation";
    case Errc::schema: return "schema";
    case Errc::not_found: return "not_found";
    case Errc::duplicate_key: return "duplicate_key";
    case Errc::storage_io: return "storage_io";
    case Errc::unauthenticated: return "unauthenticated";
    case Errc::forbidden: return "forbidden";
    case Errc::state: return "state";
    case Errc::model_missing: return "model_missing";
    case Errc::fetch_timeout: return "fetch_timeout";
    case Errc::fetch_status: return "fetch_status";
    case Errc::fetch_too_large: return "fetch_too_large";
    case Errc::fetch_cache_miss: return "fetch_cache_miss";
    case Errc::fetch_network: return "fetch_network";
  }
  return "unknown";
}

Digest sha256(std::span<const std::byte> bytes) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), reinterpret_cast<const unsigned char*>(bytes.data()),
                     bytes.size());
  return out;
}

Digest sha256(std::string_view bytes) {
  return sha256(std::as_bytes(std::span(bytes.data(), bytes.size())));
}

std::string to_hex(const Digest& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

Digest digest_from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() != 64) throw Error(Errc::invalid_argument, "digest must be 64 hex characters");
  Digest out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::invalid_argument, "digest must be 64 hex characters");
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return out;
}

std::string random_token(std::size_t num_bytes) {
  ensure_sodium();
  std::vector<unsigned char> buf(num_bytes);
  randombytes_buf(buf.data(), buf.size());
  const int variant = sodium_base64_VARIANT_URLSAFE_NO_PADDING;
  std::string out(sodium_base64_ENCODED_LEN(num_bytes, variant), '\0');
  sodium_bin2base64(out.data(), out.size(), buf.data(), buf.size(), variant);
  out.resize(std::char_traits<char>::length(out.c_str()));
  return out;
}

}  // namespace secmatch
