// Copyright 2026 The tsi Authors.
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

#include "tsi/cbow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsi/keywords.hpp"
#include "tsi/rng.hpp"

namespace tsi {

namespace {

void check_context(std::span<const std::size_t> context, std::size_t vocab_size) {
  if (context.empty()) throw std::invalid_argument("cbow: empty context");
  for (std::size_t c : context) {
    if (c >= vocab_size) {
      throw std::invalid_argument("cbow: context index " + std::to_string(c) +
                                  " out of range for vocabulary of " + std::to_string(vocab_size));
    }
  }
}

// Stable softmax in place; returns log(sum(exp(y - max))) + max for the loss.
double softmax_inplace(std::vector<double>& y) {
  const double m = *std::max_element(y.begin(), y.end());
  double sum = 0.0;
  for (double& v : y) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : y) v /= sum;
  return std::log(sum) + m;
}

}  // namespace

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  const auto it = index.find(token);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(std::span<const TokenList> corpus, std::size_t min_count) {
  if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  const TokenCounts counts = count_tokens_serial(corpus, CountMode::kMultiplicity);
  std::vector<std::pair<std::string, std::uint64_t>> ranked;
  ranked.reserve(counts.size());
  for (const auto& [tok, n] : counts) {
    if (n >= min_count) ranked.emplace_back(tok, n);
  }
  if (ranked.empty()) {
    throw std::runtime_error("build_vocab: vocabulary is empty after min_count filtering");
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  vocab.tokens.reserve(ranked.size());
  vocab.counts.reserve(ranked.size());
  vocab.index.reserve(ranked.size());
  for (auto& [tok, n] : ranked) {
    vocab.index.emplace(tok, vocab.tokens.size());
    vocab.tokens.push_back(std::move(tok));
    vocab.counts.push_back(n);
  }
  return vocab;
}

CbowModel::CbowModel(Vocabulary vocab, std::size_t dimension, std::uint64_t seed)
    : vocab_(std::move(vocab)), dim_(dimension) {
  if (dim_ == 0) throw std::invalid_argument("cbow: dimension must be positive");
  if (vocab_.size() == 0) throw std::invalid_argument("cbow: empty vocabulary");
  const std::size_t n = vocab_.size() * dim_;
  w_in_.resize(n);
  w_out_.assign(n, 0.0);
  Rng rng(seed);
  const double scale = 1.0 / static_cast<double>(dim_);
  for (double& w : w_in_) w = (rng.real() - 0.5) * scale;
  scratch_h_.resize(dim_);
  scratch_p_.resize(vocab_.size());
  scratch_gh_.resize(dim_);
}

void CbowModel::hidden_mean(std::span<const std::size_t> context, std::vector<double>& h) const {
  std::fill(h.begin(), h.end(), 0.0);
  for (std::size_t c : context) {
    const double* row = &w_in_[c * dim_];
    for (std::size_t d = 0; d < dim_; ++d) h[d] += row[d];
  }
  const double inv = 1.0 / static_cast<double>(context.size());
  for (double& v : h) v *= inv;
}

void CbowModel::activations(const std::vector<double>& h, std::vector<double>& y) const {
  const std::size_t v_count = vocab_.size();
  for (std::size_t v = 0; v < v_count; ++v) {
    const double* row = &w_out_[v * dim_];
    double dot = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) dot += h[d] * row[d];
    y[v] = dot;
  }
}

std::vector<double> CbowModel::forward(std::span<const std::size_t> context) const {
  check_context(context, vocab_.size());
  std::vector<double> h(dim_);
  hidden_mean(context, h);
  std::vector<double> y(vocab_.size());
  activations(h, y);
  softmax_inplace(y);
  return y;
}

std::pair<double, CbowModel::Gradients> CbowModel::loss_and_grad(
    std::span<const std::size_t> context, std::size_t target) const {
  check_context(context, vocab_.size());
  if (target >= vocab_.size()) throw std::invalid_argument("cbow: target index out of range");

  std::vector<double> h(dim_);
  hidden_mean(context, h);
  std::vector<double> p(vocab_.size());
  activations(h, p);
  const double target_activation = p[target];
  const double lse = softmax_inplace(p);
  const double loss = lse - target_activation;

  Gradients g;
  g.input.assign(vocab_.size() * dim_, 0.0);
  g.output.assign(vocab_.size() * dim_, 0.0);

  // e = p - onehot(target); d(loss)/d(w_out[v]) = e_v * h; d(loss)/dh = sum_v e_v * w_out[v].
  std::vector<double> grad_h(dim_, 0.0);
  for (std::size_t v = 0; v < vocab_.size(); ++v) {
    const double e = p[v] - (v == target ? 1.0 : 0.0);
    const double* out_row = &w_out_[v * dim_];
    double* gout_row = &g.output[v * dim_];
    for (std::size_t d = 0; d < dim_; ++d) {
      gout_row[d] = e * h[d];
      grad_h[d] += e * out_row[d];
    }
  }
  const double inv = 1.0 / static_cast<double>(context.size());
  for (std::size_t c : context) {
    double* gin_row = &g.input[c * dim_];
    for (std::size_t d = 0; d < dim_; ++d) gin_row[d] += grad_h[d] * inv;
  }
  return {loss, std::move(g)};
}

double CbowModel::train_pair(std::span<const std::size_t> context, std::size_t target, double lr) {
  check_context(context, vocab_.size());
  if (target >= vocab_.size()) throw std::invalid_argument("cbow: target index out of range");

  hidden_mean(context, scratch_h_);
  activations(scratch_h_, scratch_p_);
  const double target_activation = scratch_p_[target];
  const double lse = softmax_inplace(scratch_p_);
  const double loss = lse - target_activation;

  // grad_h must be read out before the output rows move.
  std::fill(scratch_gh_.begin(), scratch_gh_.end(), 0.0);
  for (std::size_t v = 0; v < vocab_.size(); ++v) {
    const double e = scratch_p_[v] - (v == target ? 1.0 : 0.0);
    double* out_row = &w_out_[v * dim_];
    for (std::size_t d = 0; d < dim_; ++d) {
      scratch_gh_[d] += e * out_row[d];
      out_row[d] -= lr * (e * scratch_h_[d]);
    }
  }
  const double inv = 1.0 / static_cast<double>(context.size());
  for (std::size_t c : context) {
    double* in_row = &w_in_[c * dim_];
    for (std::size_t d = 0; d < dim_; ++d) in_row[d] -= lr * (scratch_gh_[d] * inv);
  }
  return loss;
}

EmbeddingTable CbowModel::to_embedding_table() const {
  EmbeddingTable table(dim_, "cbow-trained");
  table.reserve(vocab_.size());
  std::vector<float> row(dim_);
  for (std::size_t v = 0; v < vocab_.size(); ++v) {
    const double* src = &w_in_[v * dim_];
    for (std::size_t d = 0; d < dim_; ++d) row[d] = static_cast<float>(src[d]);
    table.add(vocab_.tokens[v], row);
  }
  return table;
}

CbowModel train_cbow(std::span<const TokenList> corpus, const CbowConfig& config,
                     TrainStats* stats) {
  if (config.window == 0) throw std::invalid_argument("cbow: window must be positive");
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("cbow: learning_rate must be positive");
  }
  Vocabulary vocab = build_vocab(corpus, config.min_count);
  CbowModel model(std::move(vocab), config.dimension, config.seed);

  // Map each tweet to its in-vocabulary index sequence once.
  std::vector<std::vector<std::size_t>> sequences;
  sequences.reserve(corpus.size());
  std::size_t trainable = 0;
  for (const auto& tweet : corpus) {
    std::vector<std::size_t> seq;
    seq.reserve(tweet.size());
    for (const auto& tok : tweet) {
      if (const auto idx = model.vocab().find(tok)) seq.push_back(*idx);
    }
    if (seq.size() >= 2) ++trainable;
    sequences.push_back(std::move(seq));
  }
  if (trainable == 0) {
    throw std::runtime_error("cbow: corpus has no (context, target) training pair");
  }

  if (stats) {
    stats->epoch_loss.clear();
    stats->vocab_size = model.vocab_size();
  }
  std::vector<std::size_t> context;
  context.reserve(2 * config.window);
  const auto k = static_cast<std::ptrdiff_t>(config.window);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& seq : sequences) {
      const auto len = static_cast<std::ptrdiff_t>(seq.size());
      for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
        context.clear();
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, pos - k);
             j < std::min(len, pos + k + 1); ++j) {
          if (j != pos) context.push_back(seq[static_cast<std::size_t>(j)]);
        }
        if (context.empty()) continue;
        const double loss =
            model.train_pair(context, seq[static_cast<std::size_t>(pos)], config.learning_rate);
        if (!std::isfinite(loss)) {
          throw std::runtime_error("cbow: training diverged (non-finite loss) at epoch " +
                                   std::to_string(epoch + 1) + ", pair " +
                                   std::to_string(pairs + 1));
        }
        loss_sum += loss;
        ++pairs;
      }
    }
    if (stats) {
      stats->epoch_loss.push_back(pairs > 0 ? loss_sum / static_cast<double>(pairs) : 0.0);
      stats->pairs_per_epoch = pairs;
    }
  }
  return model;
}

}  // namespace tsi
