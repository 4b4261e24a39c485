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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "secmatch/corpus.hpp"
#include "secmatch/rng.hpp"

namespace secmatch {

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct LdaConfig {
  std::uint32_t num_topics = 10;
  // Symmetric doc-topic prior; 50 / num_topics when unset.
  std::optional<double> alpha;
  double beta = 0.01;
  std::uint32_t train_iters = 1000;
  std::uint32_t burn_in = 200;
  // Estimates are averaged over every `thinning`-th sweep after burn-in.
  std::uint32_t thinning = 10;
  std::uint32_t infer_iters = 200;
  std::uint32_t infer_burn_in = 50;
  std::uint64_t seed = 42;

  double resolved_alpha() const { return alpha.value_or(50.0 / num_topics); }
  // Throws Error(config) on out-of-range values.
  void validate() const;

  bool operator==(const LdaConfig&) const = default;
};

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

struct LdaModel {
  LdaConfig config;
  Digest dictionary_hash{};
  // K x V topic-word probabilities.
  Matrix phi;
  // D x K topic proportions of the training documents, in training order.
  Matrix training_doc_topics;
  // Not part of the container; the store records creation time.
  std::optional<Timestamp> trained_at;
  std::uint32_t format_version = kModelFormatVersion;

  std::size_t num_topics() const { return phi.rows; }
  std::size_t vocab_size() const { return phi.cols; }

  // Row sums within 1e-9 and strictly positive entries for phi and theta.
  // Throws Error(invariant_violation).
  void check_invariants() const;
};

struct TopicDistribution {
  std::vector<double> theta;
};

// Collapsed Gibbs sampler state for one training job. Exposed so callers can
// observe the count tables between sweeps.
class GibbsSampler {
 public:
  GibbsSampler(std::span<const BowVector> bows, std::size_t vocab_size, const LdaConfig& config);

  void sweep();
  // Adds the current smoothed phi/theta to the running sums.
  void accumulate();

  std::uint32_t sweeps_done() const { return sweeps_; }
  std::uint32_t samples() const { return samples_; }
  std::size_t num_docs() const { return doc_len_.size(); }
  std::size_t num_topics() const { return k_; }
  std::size_t vocab_size() const { return v_; }

  std::uint32_t doc_topic(std::size_t d, std::size_t k) const { return n_dk_[d * k_ + k]; }
  std::uint32_t topic_word(std::size_t k, std::size_t w) const { return n_kw_[k * v_ + w]; }
  std::uint32_t topic_total(std::size_t k) const { return n_k_[k]; }
  std::uint32_t doc_length(std::size_t d) const { return doc_len_[d]; }

  // Sum_k n_dk == n_d for every document and Sum_w n_kw == n_k for every
  // topic, recomputed from the assignment vector.
  bool counts_conserved() const;

  // Averages of the accumulated samples, or the current state when nothing
  // has been accumulated.
  Matrix phi_estimate() const;
  Matrix theta_estimate() const;

 private:
  std::size_t k_;
  std::size_t v_;
  double alpha_;
  double beta_;
  Xoshiro256 rng_;
  std::vector<TermId> words_;
  std::vector<std::uint32_t> topics_;
  std::vector<std::size_t> doc_start_;
  std::vector<std::uint32_t> doc_len_;
  std::vector<std::uint32_t> n_dk_;
  std::vector<std::uint32_t> n_kw_;
  std::vector<std::uint32_t> n_k_;
  std::vector<double> weights_;
  Matrix phi_sum_;
  Matrix theta_sum_;
  std::uint32_t sweeps_ = 0;
  std::uint32_t samples_ = 0;
};

using SweepObserver = std::function<void(const GibbsSampler&)>;

// Throws Error(empty_corpus) / Error(no_tokens) / Error(dictionary_mismatch).
LdaModel train(std::span<const BowVector> bows, const Dictionary& dict, const LdaConfig& config,
               const SweepObserver& observer = {});

// Fold-in Gibbs sampling with phi fixed. Empty input yields the uniform
// distribution.
TopicDistribution infer(const LdaModel& model, const BowVector& bow, std::uint64_t seed);

std::vector<std::pair<std::string, double>> top_words(const LdaModel& model,
                                                      const Dictionary& dict, std::size_t topic,
                                                      std::size_t n);

// exp(-sum log p(w|d) / N) with theta_d from infer(); throws
// Error(no_tokens) when the corpus has no tokens.
double perplexity(const LdaModel& model, std::span<const BowVector> bows);

// Model with every phi row uniform over the vocabulary; a baseline for
// perplexity comparisons.
LdaModel uniform_model(const Dictionary& dict, const LdaConfig& config,
                       std::size_t num_training_docs = 0);

// "LDAM" | u32 version | SHA-256(payload) | payload. The payload holds the
// config, dictionary, binding, phi and theta blocks, each u64
// length-prefixed; numbers are little-endian.
std::string save_model(const LdaModel& model, const Dictionary& dict);

struct LoadedModel {
  LdaModel model;
  Dictionary dictionary;
};

LoadedModel load_model(std::string_view bytes);

}  // namespace secmatch
