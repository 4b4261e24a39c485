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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "secmatch/corpus.hpp"
#include "secmatch/dataset.hpp"
#include "secmatch/topics.hpp"

namespace secmatch {

struct MatchResult {
  std::string dataset_name;
  std::string doc_id;
  std::string document_link;
  double similarity = 0.0;
  std::size_t rank = 0;

  bool operator==(const MatchResult&) const = default;
};

struct CompareParams {
  std::size_t k = 10;
  double highlight_threshold = 0.60;
  double relevance_gate_threshold = 0.20;
  bool gate_enabled = true;

  // Throws Error(invalid_argument).
  void validate() const;
  bool operator==(const CompareParams&) const = default;
};

struct DatasetVerdict {
  std::string name;
  double relevance = 0.0;
  bool gated = false;

  bool operator==(const DatasetVerdict&) const = default;
};

struct ComparisonReport {
  std::string job_id;
  std::string file_ref;
  CompareParams params;
  std::vector<DatasetVerdict> datasets;
  std::vector<MatchResult> results;
  std::vector<MatchResult> highlights;
  std::string generated_at;

  bool operator==(const ComparisonReport&) const = default;
};

// Cosine of two sparse nonnegative vectors (entries ascending by term).
// Zero norm on either side gives 0; the result is clamped to [0, 1].
double cosine(std::span<const TermWeight> a, std::span<const TermWeight> b);
double cosine(std::span<const double> a, std::span<const double> b);

// Mean of the dataset's training theta rows, renormalized.
std::vector<double> topic_centroid(const Dataset& dataset);

// Throws Error(model_missing) when the dataset has not been trained.
double dataset_relevance(const TopicDistribution& query_theta, const Dataset& dataset);

// Query weighted with the dataset's idf, scored against every document.
// Ties are broken by ascending doc_id.
std::vector<MatchResult> top_k(const CleanDocument& query, const Dataset& dataset,
                               const CompareParams& params);

// Gate, rank and merge across datasets. job_id, file_ref and generated_at
// are left for the caller.
ComparisonReport compare(const CleanDocument& query, std::span<const Dataset* const> datasets,
                         const CompareParams& params);

}  // namespace secmatch
