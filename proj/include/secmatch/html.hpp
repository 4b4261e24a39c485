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

#include <string>
#include <string_view>

namespace secmatch {

// Visible text of an HTML page or a plain-text body. HTML loses script,
// style and noscript subtrees, comments and tags; entities are decoded and
// text nodes joined with single spaces. Anything else is decoded as UTF-8
// with U+FFFD replacement. Never throws.
std::string extract_text(std::string_view body, std::string_view content_type);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

// Decodes named and numeric character references.
std::string decode_entities(std::string_view text);

}  // namespace secmatch
