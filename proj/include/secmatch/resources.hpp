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

#include <string_view>

namespace secmatch {

// Files bundled from data/ at build time, addressed by their path relative to
// data/ (e.g. "stopwords/english.txt"). Throws Error(config) when absent.
std::string_view bundled_resource(std::string_view name);

bool has_bundled_resource(std::string_view name);

}  // namespace secmatch
