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

#include <json.hpp>

#include "secmatch/match.hpp"

namespace secmatch {

using Json = nlohmann::ordered_json;

Json report_to_json(const ComparisonReport& report);
ComparisonReport report_from_json(const Json& j);

Json params_to_json(const CompareParams& params);
// Missing keys keep their defaults; throws Error(invalid_argument) on bad types
// or out-of-range values.
CompareParams params_from_json(const Json& j);

// Compact serialization used for byte-level comparisons and storage.
std::string dump_report(const ComparisonReport& report);

}  // namespace secmatch
