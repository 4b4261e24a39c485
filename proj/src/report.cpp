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

#include "secmatch/report.hpp"

#include "secmatch/error.hpp"

namespace secmatch {
namespace {

Json result_to_json(const MatchResult& r) {
  return Json{{"rank", r.rank},
              {"dataset_name", r.dataset_name},
              {"doc_id", r.doc_id},
              {"link", r.document_link},
              {"similarity", r.similarity}};
}

MatchResult result_from_json(const Json& j) {
  MatchResult r;
  r.rank = j.at("rank").get<std::size_t>();
  r.dataset_name = j.at("dataset_name").get<std::string>();
  r.doc_id = j.at("doc_id").get<std::string>();
  r.document_link = j.value("link", std::string());
  r.similarity = j.value("similarity", 0.0);
  return r;
}

}  // namespace

Json params_to_json(const CompareParams& p) {
  return Json{{"k", p.k},
              {"highlight_threshold", p.highlight_threshold},
              {"relevance_gate_threshold", p.relevance_gate_threshold},
              {"gate_enabled", p.gate_enabled}};
}

CompareParams params_from_json(const Json& j) {
  CompareParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error(Errc::invalid_argument, "params must be an object");
  try {
    if (j.contains("k")) {
      const auto& k = j.at("k");
      if (!k.is_number_integer() || k.get<long long>() < 1) {
        throw Error(Errc::invalid_argument, "k must be a positive integer");
      }
      p.k = k.get<std::size_t>();
    }
    if (j.contains("highlight_threshold")) {
      p.highlight_threshold = j.at("highlight_threshold").get<double>();
    }
    if (j.contains("threshold")) p.highlight_threshold = j.at("threshold").get<double>();
    if (j.contains("relevance_gate_threshold")) {
      p.relevance_gate_threshold = j.at("relevance_gate_threshold").get<double>();
    }
    if (j.contains("gate_enabled")) p.gate_enabled = j.at("gate_enabled").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("params: ") + e.what());
  }
  p.validate();
  return p;
}

Json report_to_json(const ComparisonReport& report) {
  Json datasets = Json::array();
  for (const auto& d : report.datasets) {
    datasets.push_back(Json{{"name", d.name}, {"relevance", d.relevance}, {"gated", d.gated}});
  }
  Json results = Json::array();
  for (const auto& r : report.results) results.push_back(result_to_json(r));
  Json highlights = Json::array();
  for (const auto& r : report.highlights) highlights.push_back(result_to_json(r));
  return Json{{"job_id", report.job_id},
              {"file", report.file_ref},
              {"params", params_to_json(report.params)},
              {"datasets", std::move(datasets)},
              {"results", std::move(results)},
              {"highlights", std::move(highlights)},
              {"generated_at", report.generated_at}};
}

ComparisonReport report_from_json(const Json& j) {
  try {
    ComparisonReport report;
    report.job_id = j.at("job_id").get<std::string>();
    report.file_ref = j.at("file").get<std::string>();
    report.params = params_from_json(j.at("params"));
    for (const auto& d : j.at("datasets")) {
      report.datasets.push_back({d.at("name").get<std::string>(), d.at("relevance").get<double>(),
                                 d.at("gated").get<bool>()});
    }
    for (const auto& r : j.at("results")) report.results.push_back(result_from_json(r));
    for (const auto& r : j.at("highlights")) report.highlights.push_back(result_from_json(r));
    report.generated_at = j.value("generated_at", std::string());
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::corrupt_container, std::string("report: ") + e.what());
  }
}

std::string dump_report(const ComparisonReport& report) { return report_to_json(report).dump(); }

}  // namespace secmatch
