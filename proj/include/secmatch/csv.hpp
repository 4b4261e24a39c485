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
#include <vector>

namespace secmatch {

using CsvRecord = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain commas, CR/LF and doubled
// quotes; records end in CRLF or LF. A leading UTF-8 BOM is skipped.
// Throws Error(schema) on an unterminated quoted field.
std::vector<CsvRecord> parse_csv(std::string_view text);

}  // namespace secmatch
