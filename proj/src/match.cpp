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

#include "secmatch/match.hpp"

#include <algorithm>
#include <cmath>

#include "secmatch/error.hpp"

namespace secmatch {
namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

// Similarity descending, then dataset name, then doc id.
bool ranks_before(const MatchResult& a, const MatchResult& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  if (a.dataset_name != b.dataset_name) return a.dataset_name < b.dataset_name;
  return a.doc_id < b.doc_id;
}

void assign_ranks(std::vector<MatchResult>& results) {
  for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = i + 1;
}

// Seed key for query-side inference; independent of upload ids so the same
// text always gets the same topic vector.
constexpr std::string_view kQueryStreamKey = "query";

}  // namespace

void CompareParams::validate() const {
  if (k < 1) throw Error(Errc::invalid_argument, "k must be >= 1");
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(highlight_threshold)) {
    throw Error(Errc::invalid_argument, "highlight_threshold must be in [0, 1]");
  }
  if (!unit(relevance_gate_threshold)) {
    throw Error(Errc::invalid_argument, "relevance_gate_threshold must be in [0, 1]");
  }
}

double cosine(std::span<const TermWeight> a, std::span<const TermWeight> b) {
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (const auto& e : a) norm_a += e.weight * e.weight;
  for (const auto& e : b) norm_b += e.weight * e.weight;
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;

  double dot = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->term < ib->term) {
      ++ia;
    } else if (ib->term < ia->term) {
      ++ib;
    } else {
      dot += ia->weight * ib->weight;
      ++ia;
      ++ib;
    }
  }
  return clamp_unit(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::invalid_argument, "cosine: dimension mismatch");
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return clamp_unit(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)));
}

std::vector<double> topic_centroid(const Dataset& dataset) {
  if (!dataset.model) {
    throw Error(Errc::model_missing, "model missing for dataset " + dataset.name);
  }
  const Matrix& theta = dataset.model->training_doc_topics;
  std::vector<double> centroid(dataset.model->num_topics(), 0.0);
  for (std::size_t d = 0; d < theta.rows; ++d) {
    for (std::size_t k = 0; k < theta.cols; ++k) centroid[k] += theta.at(d, k);
  }
  double total = 0.0;
  for (double x : centroid) total += x;
  if (total == 0.0) return centroid;
  for (double& x : centroid) x /= total;
  return centroid;
}

double dataset_relevance(const TopicDistribution& query_theta, const Dataset& dataset) {
  const auto centroid = topic_centroid(dataset);
  return cosine(std::span<const double>(query_theta.theta), std::span<const double>(centroid));
}

std::vector<MatchResult> top_k(const CleanDocument& query, const Dataset& dataset,
                               const CompareParams& params) {
  if (dataset.vectors.empty()) return {};
  const TfidfVector q = to_tfidf(to_bow(query, dataset.dictionary).bow, dataset.dictionary);

  std::vector<MatchResult> scored;
  scored.reserve(dataset.vectors.size());
  for (std::size_t i = 0; i < dataset.vectors.size(); ++i) {
    const TfidfVector& doc = dataset.vectors[i];
    scored.push_back({dataset.name, doc.doc_id, dataset.document_link(i),
                      cosine(std::span<const TermWeight>(q.entries),
                             std::span<const TermWeight>(doc.entries)),
                      0});
  }
  const std::size_t take = std::min(params.k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), ranks_before);
  scored.resize(take);
  assign_ranks(scored);
  return scored;
}

ComparisonReport compare(const CleanDocument& query, std::span<const Dataset* const> datasets,
                         const CompareParams& params) {
  params.validate();
  if (datasets.empty()) throw Error(Errc::invalid_argument, "at least one dataset is required");

  ComparisonReport report;
  report.params = params;
  std::vector<MatchResult> merged;
  for (const Dataset* dataset : datasets) {
    if (!dataset->model) {
      throw Error(Errc::model_missing, "model missing for dataset " + dataset->name);
    }
    BowVector bow = to_bow(query, dataset->dictionary).bow;
    bow.doc_id = kQueryStreamKey;
    // No in-vocabulary tokens means no topical evidence at all.
    double relevance = 0.0;
    if (!bow.entries.empty()) {
      const auto theta = infer(*dataset->model, bow, dataset->model->config.seed);
      relevance = dataset_relevance(theta, *dataset);
    }
    const bool gated = params.gate_enabled && relevance < params.relevance_gate_threshold;
    report.datasets.push_back({dataset->name, relevance, gated});
    if (gated) continue;
    auto hits = top_k(query, *dataset, params);
    merged.insert(merged.end(), hits.begin(), hits.end());
  }

  std::sort(merged.begin(), merged.end(), ranks_before);
  if (merged.size() > params.k) merged.resize(params.k);
  assign_ranks(merged);
  for (const auto& r : merged) {
    if (r.similarity > params.highlight_threshold) report.highlights.push_back(r);
  }
  report.results = std::move(merged);
  return report;
}

}  // namespace secmatch
