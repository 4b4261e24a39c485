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

#include "secmatch/topics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "secmatch/error.hpp"

namespace secmatch {
namespace {

constexpr std::string_view kMagic = "LDAM";
constexpr double kSumTolerance = 1e-9;

void check_bows(std::span<const BowVector> bows, const Digest& dict_hash, std::size_t vocab) {
  for (const auto& bow : bows) {
    if (bow.dictionary_hash != dict_hash) {
      throw Error(Errc::dictionary_mismatch, "model/dictionary mismatch");
    }
    for (const auto& e : bow.entries) {
      if (e.term >= vocab) throw Error(Errc::dictionary_mismatch, "model/dictionary mismatch");
    }
  }
}

void check_stochastic_rows(const Matrix& m, std::string_view what) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    double sum = 0.0;
    for (double x : m.row(r)) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw Error(Errc::invariant_violation,
                    std::string(what) + " has a non-positive entry in row " + std::to_string(r));
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw Error(Errc::invariant_violation,
                  std::string(what) + " row " + std::to_string(r) + " does not sum to 1");
    }
  }
}

std::string encode_config(const LdaConfig& c) {
  ByteWriter w;
  w.u32(c.num_topics);
  w.u32(c.alpha.has_value() ? 1 : 0);
  w.f64(c.resolved_alpha());
  w.f64(c.beta);
  w.u32(c.train_iters);
  w.u32(c.burn_in);
  w.u32(c.thinning);
  w.u32(c.infer_iters);
  w.u32(c.infer_burn_in);
  w.u64(c.seed);
  return std::move(w).bytes();
}

LdaConfig decode_config(std::string_view block) {
  ByteReader r(block);
  LdaConfig c;
  c.num_topics = r.u32();
  const bool explicit_alpha = r.u32() != 0;
  const double alpha = r.f64();
  if (explicit_alpha) c.alpha = alpha;
  c.beta = r.f64();
  c.train_iters = r.u32();
  c.burn_in = r.u32();
  c.thinning = r.u32();
  c.infer_iters = r.u32();
  c.infer_burn_in = r.u32();
  c.seed = r.u64();
  if (!r.done()) throw Error(Errc::corrupt_container, "corrupt container");
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(Errc::invariant_violation, e.what());
  }
  return c;
}

std::string encode_matrix(const Matrix& m) {
  ByteWriter w;
  w.u64(m.rows);
  w.u64(m.cols);
  for (double x : m.data) w.f64(x);
  return std::move(w).bytes();
}

Matrix decode_matrix(std::string_view block) {
  ByteReader r(block);
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  if (cols != 0 && rows > r.remaining() / 8 / cols) {
    throw Error(Errc::corrupt_container, "corrupt container");
  }
  Matrix m(rows, cols);
  for (double& x : m.data) x = r.f64();
  if (!r.done()) throw Error(Errc::corrupt_container, "corrupt container");
  return m;
}

}  // namespace

void LdaConfig::validate() const {
  if (num_topics < 1) throw Error(Errc::config, "num_topics must be >= 1");
  if (alpha && !(*alpha > 0.0 && std::isfinite(*alpha))) {
    throw Error(Errc::config, "alpha must be positive");
  }
  if (!(beta > 0.0 && std::isfinite(beta))) throw Error(Errc::config, "beta must be positive");
  if (train_iters < 1) throw Error(Errc::config, "train_iters must be >= 1");
  if (burn_in >= train_iters) throw Error(Errc::config, "burn_in must be < train_iters");
  if (thinning < 1) throw Error(Errc::config, "thinning must be >= 1");
  if (infer_iters < 1) throw Error(Errc::config, "infer_iters must be >= 1");
  if (infer_burn_in >= infer_iters) {
    throw Error(Errc::config, "infer_burn_in must be < infer_iters");
  }
}

void LdaModel::check_invariants() const {
  if (phi.rows != config.num_topics || phi.cols == 0) {
    throw Error(Errc::invariant_violation, "phi has the wrong shape");
  }
  if (training_doc_topics.rows > 0 && training_doc_topics.cols != phi.rows) {
    throw Error(Errc::invariant_violation, "theta has the wrong shape");
  }
  check_stochastic_rows(phi, "phi");
  check_stochastic_rows(training_doc_topics, "theta");
}

GibbsSampler::GibbsSampler(std::span<const BowVector> bows, std::size_t vocab_size,
                           const LdaConfig& config)
    : k_(config.num_topics),
      v_(vocab_size),
      alpha_(config.resolved_alpha()),
      beta_(config.beta),
      rng_(config.seed),
      n_kw_(k_ * v_, 0),
      n_k_(k_, 0),
      weights_(k_, 0.0),
      phi_sum_(k_, v_),
      theta_sum_(bows.size(), k_) {
  doc_start_.reserve(bows.size() + 1);
  for (const auto& bow : bows) {
    doc_start_.push_back(words_.size());
    for (const auto& e : bow.entries) words_.insert(words_.end(), e.count, e.term);
    doc_len_.push_back(static_cast<std::uint32_t>(words_.size() - doc_start_.back()));
  }
  doc_start_.push_back(words_.size());
  n_dk_.assign(doc_len_.size() * k_, 0);

  topics_.resize(words_.size());
  for (std::size_t d = 0; d < doc_len_.size(); ++d) {
    for (std::size_t i = doc_start_[d]; i < doc_start_[d + 1]; ++i) {
      const std::uint32_t z = rng_.below(static_cast<std::uint32_t>(k_));
      topics_[i] = z;
      ++n_dk_[d * k_ + z];
      ++n_kw_[z * v_ + words_[i]];
      ++n_k_[z];
    }
  }
}

void GibbsSampler::sweep() {
  const double v_beta = static_cast<double>(v_) * beta_;
  for (std::size_t d = 0; d < doc_len_.size(); ++d) {
    std::uint32_t* doc_counts = &n_dk_[d * k_];
    for (std::size_t i = doc_start_[d]; i < doc_start_[d + 1]; ++i) {
      const TermId w = words_[i];
      std::uint32_t z = topics_[i];
      --doc_counts[z];
      --n_kw_[z * v_ + w];
      --n_k_[z];

      double total = 0.0;
      for (std::size_t k = 0; k < k_; ++k) {
        total += (doc_counts[k] + alpha_) * (n_kw_[k * v_ + w] + beta_) / (n_k_[k] + v_beta);
        weights_[k] = total;
      }
      const double u = rng_.uniform() * total;
      z = static_cast<std::uint32_t>(k_ - 1);
      for (std::size_t k = 0; k < k_; ++k) {
        if (u < weights_[k]) {
          z = static_cast<std::uint32_t>(k);
          break;
        }
      }

      topics_[i] = z;
      ++doc_counts[z];
      ++n_kw_[z * v_ + w];
      ++n_k_[z];
    }
  }
  ++sweeps_;
}

void GibbsSampler::accumulate() {
  const double v_beta = static_cast<double>(v_) * beta_;
  const double k_alpha = static_cast<double>(k_) * alpha_;
  for (std::size_t k = 0; k < k_; ++k) {
    const double denom = n_k_[k] + v_beta;
    auto row = phi_sum_.row(k);
    for (std::size_t w = 0; w < v_; ++w) row[w] += (n_kw_[k * v_ + w] + beta_) / denom;
  }
  for (std::size_t d = 0; d < doc_len_.size(); ++d) {
    const double denom = doc_len_[d] + k_alpha;
    auto row = theta_sum_.row(d);
    for (std::size_t k = 0; k < k_; ++k) row[k] += (n_dk_[d * k_ + k] + alpha_) / denom;
  }
  ++samples_;
}

bool GibbsSampler::counts_conserved() const {
  std::vector<std::uint64_t> dk(n_dk_.size(), 0), kw(n_kw_.size(), 0), kt(k_, 0);
  for (std::size_t d = 0; d < doc_len_.size(); ++d) {
    for (std::size_t i = doc_start_[d]; i < doc_start_[d + 1]; ++i) {
      ++dk[d * k_ + topics_[i]];
      ++kw[topics_[i] * v_ + words_[i]];
      ++kt[topics_[i]];
    }
  }
  if (!std::equal(dk.begin(), dk.end(), n_dk_.begin())) return false;
  if (!std::equal(kw.begin(), kw.end(), n_kw_.begin())) return false;
  if (!std::equal(kt.begin(), kt.end(), n_k_.begin())) return false;
  for (std::size_t d = 0; d < doc_len_.size(); ++d) {
    std::uint64_t sum = 0;
    for (std::size_t k = 0; k < k_; ++k) sum += n_dk_[d * k_ + k];
    if (sum != doc_len_[d]) return false;
  }
  for (std::size_t k = 0; k < k_; ++k) {
    std::uint64_t sum = 0;
    for (std::size_t w = 0; w < v_; ++w) sum += n_kw_[k * v_ + w];
    if (sum != n_k_[k]) return false;
  }
  return true;
}

Matrix GibbsSampler::phi_estimate() const {
  if (samples_ == 0) {
    GibbsSampler copy = *this;
    copy.accumulate();
    return copy.phi_estimate();
  }
  Matrix out = phi_sum_;
  for (double& x : out.data) x /= samples_;
  return out;
}

Matrix GibbsSampler::theta_estimate() const {
  if (samples_ == 0) {
    GibbsSampler copy = *this;
    copy.accumulate();
    return copy.theta_estimate();
  }
  Matrix out = theta_sum_;
  for (double& x : out.data) x /= samples_;
  return out;
}

LdaModel train(std::span<const BowVector> bows, const Dictionary& dict, const LdaConfig& config,
               const SweepObserver& observer) {
  config.validate();
  if (bows.empty()) throw Error(Errc::empty_corpus, "empty corpus");
  check_bows(bows, dict.hash(), dict.size());
  if (std::all_of(bows.begin(), bows.end(), [](const BowVector& b) { return b.entries.empty(); })) {
    throw Error(Errc::no_tokens, "no observable tokens");
  }

  GibbsSampler sampler(bows, dict.size(), config);
  for (std::uint32_t t = 1; t <= config.train_iters; ++t) {
    sampler.sweep();
    assert(sampler.counts_conserved());
    if (observer) observer(sampler);
    if (t > config.burn_in && (t - config.burn_in) % config.thinning == 0) sampler.accumulate();
  }

  LdaModel model;
  model.config = config;
  model.dictionary_hash = dict.hash();
  model.phi = sampler.phi_estimate();
  model.training_doc_topics = sampler.theta_estimate();
  model.check_invariants();
  return model;
}

TopicDistribution infer(const LdaModel& model, const BowVector& bow, std::uint64_t seed) {
  const std::size_t k_count = model.num_topics();
  if (bow.dictionary_hash != model.dictionary_hash) {
    throw Error(Errc::dictionary_mismatch, "model/dictionary mismatch");
  }
  TopicDistribution out;
  if (bow.entries.empty()) {
    out.theta.assign(k_count, 1.0 / static_cast<double>(k_count));
    return out;
  }
  std::vector<TermId> words;
  for (const auto& e : bow.entries) {
    if (e.term >= model.vocab_size()) {
      throw Error(Errc::dictionary_mismatch, "model/dictionary mismatch");
    }
    words.insert(words.end(), e.count, e.term);
  }

  const LdaConfig& config = model.config;
  const double alpha = config.resolved_alpha();
  const double denom = static_cast<double>(words.size()) + static_cast<double>(k_count) * alpha;
  Xoshiro256 rng(derive_seed(seed, bow.doc_id));
  std::vector<std::uint32_t> topics(words.size());
  std::vector<std::uint32_t> counts(k_count, 0);
  for (auto& z : topics) {
    z = rng.below(static_cast<std::uint32_t>(k_count));
    ++counts[z];
  }

  std::vector<double> weights(k_count);
  std::vector<double> sum(k_count, 0.0);
  std::uint32_t samples = 0;
  for (std::uint32_t t = 1; t <= config.infer_iters; ++t) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      const TermId w = words[i];
      --counts[topics[i]];
      double total = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) {
        total += (counts[k] + alpha) * model.phi.at(k, w);
        weights[k] = total;
      }
      const double u = rng.uniform() * total;
      std::uint32_t z = static_cast<std::uint32_t>(k_count - 1);
      for (std::size_t k = 0; k < k_count; ++k) {
        if (u < weights[k]) {
          z = static_cast<std::uint32_t>(k);
          break;
        }
      }
      topics[i] = z;
      ++counts[z];
    }
    if (t > config.infer_burn_in) {
      for (std::size_t k = 0; k < k_count; ++k) sum[k] += (counts[k] + alpha) / denom;
      ++samples;
    }
  }
  out.theta.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) out.theta[k] = sum[k] / samples;
  return out;
}

std::vector<std::pair<std::string, double>> top_words(const LdaModel& model,
                                                      const Dictionary& dict, std::size_t topic,
                                                      std::size_t n) {
  if (dict.hash() != model.dictionary_hash) {
    throw Error(Errc::dictionary_mismatch, "model/dictionary mismatch");
  }
  if (topic >= model.num_topics()) {
    throw Error(Errc::invalid_argument, "topic " + std::to_string(topic) + " out of range");
  }
  auto row = model.phi.row(topic);
  std::vector<TermId> ids(row.size());
  std::iota(ids.begin(), ids.end(), TermId{0});
  const std::size_t take = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                    [&](TermId a, TermId b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.emplace_back(dict.token(ids[i]), row[ids[i]]);
  return out;
}

double perplexity(const LdaModel& model, std::span<const BowVector> bows) {
  double log_likelihood = 0.0;
  std::uint64_t total = 0;
  for (const auto& bow : bows) {
    const auto theta = infer(model, bow, model.config.seed).theta;
    for (const auto& e : bow.entries) {
      double p = 0.0;
      for (std::size_t k = 0; k < theta.size(); ++k) p += theta[k] * model.phi.at(k, e.term);
      log_likelihood += e.count * std::log(p);
      total += e.count;
    }
  }
  if (total == 0) throw Error(Errc::no_tokens, "perplexity of a corpus with no tokens");
  return std::exp(-log_likelihood / static_cast<double>(total));
}

LdaModel uniform_model(const Dictionary& dict, const LdaConfig& config,
                       std::size_t num_training_docs) {
  config.validate();
  if (dict.size() == 0) throw Error(Errc::empty_corpus, "empty corpus");
  LdaModel model;
  model.config = config;
  model.dictionary_hash = dict.hash();
  model.phi = Matrix(config.num_topics, dict.size(), 1.0 / static_cast<double>(dict.size()));
  model.training_doc_topics =
      Matrix(num_training_docs, config.num_topics, 1.0 / static_cast<double>(config.num_topics));
  return model;
}

std::string save_model(const LdaModel& model, const Dictionary& dict) {
  if (model.dictionary_hash != dict.hash()) {
    throw Error(Errc::dictionary_mismatch, "model/dictionary mismatch");
  }
  ByteWriter payload;
  payload.block(encode_config(model.config));
  payload.block(dict.encode());
  payload.block(std::string_view(reinterpret_cast<const char*>(model.dictionary_hash.data()),
                                 model.dictionary_hash.size()));
  payload.block(encode_matrix(model.phi));
  payload.block(encode_matrix(model.training_doc_topics));

  const Digest digest = sha256(payload.bytes());
  ByteWriter out;
  out.raw(kMagic);
  out.u32(kModelFormatVersion);
  out.raw(std::string_view(reinterpret_cast<const char*>(digest.data()), digest.size()));
  out.raw(payload.bytes());
  return std::move(out).bytes();
}

LoadedModel load_model(std::string_view bytes) {
  ByteReader header(bytes);
  if (header.raw(kMagic.size()) != kMagic) {
    throw Error(Errc::corrupt_container, "corrupt container");
  }
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion) {
    throw Error(Errc::unsupported_version,
                "unsupported version " + std::to_string(version));
  }
  const auto stored_digest = header.raw(32);
  const std::string_view payload = bytes.substr(bytes.size() - header.remaining());

  // Frame the blocks before checking the digest so truncation reads as
  // corruption rather than tampering.
  ByteReader framing(payload);
  const auto config_block = framing.block();
  const auto dict_block = framing.block();
  const auto binding_block = framing.block();
  const auto phi_block = framing.block();
  const auto theta_block = framing.block();
  if (!framing.done()) throw Error(Errc::corrupt_container, "corrupt container");

  const Digest digest = sha256(payload);
  if (!std::equal(digest.begin(), digest.end(),
                  reinterpret_cast<const std::uint8_t*>(stored_digest.data()))) {
    throw Error(Errc::checksum_mismatch, "checksum mismatch");
  }

  LoadedModel out{LdaModel{}, Dictionary::decode(dict_block)};
  LdaModel& model = out.model;
  model.config = decode_config(config_block);
  if (binding_block.size() != model.dictionary_hash.size()) {
    throw Error(Errc::corrupt_container, "corrupt container");
  }
  std::copy(binding_block.begin(), binding_block.end(),
            reinterpret_cast<char*>(model.dictionary_hash.data()));
  if (model.dictionary_hash != out.dictionary.hash()) {
    throw Error(Errc::invariant_violation, "model is bound to a different dictionary");
  }
  model.phi = decode_matrix(phi_block);
  model.training_doc_topics = decode_matrix(theta_block);
  if (model.phi.cols != out.dictionary.size()) {
    throw Error(Errc::invariant_violation, "phi width differs from the vocabulary size");
  }
  model.check_invariants();
  return out;
}

}  // namespace secmatch
