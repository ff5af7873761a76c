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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tsi/embedding.hpp"
#include "tsi/preprocess.hpp"
#include "tsi/util.hpp"

namespace tsi {

// Desk-scale CBOW trainer: one-hidden-layer network with a full softmax
// output, trained by SGD on exact analytic gradients. Context windows never
// cross tweet boundaries.
struct CbowConfig {
  std::size_t dimension = 32;
  std::size_t window = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.05;
  std::size_t min_count = 1;
  std::uint64_t seed = 1;
};

// Tokens with corpus count >= min_count, indexed by descending count then
// lexicographically.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  StringMap<std::size_t> index;

  std::size_t size() const { return tokens.size(); }
  std::optional<std::size_t> find(std::string_view token) const;
};

Vocabulary build_vocab(std::span<const TokenList> corpus, std::size_t min_count);

class CbowModel {
 public:
  CbowModel(Vocabulary vocab, std::size_t dimension, std::uint64_t seed);

  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t dimension() const { return dim_; }
  const Vocabulary& vocab() const { return vocab_; }

  // Softmax distribution over the vocabulary given mean-of-context hidden
  // activations. Context indices must be valid; duplicates are allowed and
  // weighted accordingly.
  std::vector<double> forward(std::span<const std::size_t> context) const;

  struct Gradients {
    std::vector<double> input;   // V x D, row per word
    std::vector<double> output;  // V x D, row per word
  };

  // Cross-entropy loss of the target under forward(context) plus exact dense
  // gradients of both weight matrices.
  std::pair<double, Gradients> loss_and_grad(std::span<const std::size_t> context,
                                             std::size_t target) const;

  // One SGD step; touches only the context rows of the input matrix and the
  // full output matrix, which equals a dense update because every other input
  // gradient is zero. Returns the pre-update loss.
  double train_pair(std::span<const std::size_t> context, std::size_t target, double lr);

  std::span<const double> input_row(std::size_t v) const { return {&w_in_[v * dim_], dim_}; }
  std::span<const double> output_row(std::size_t v) const { return {&w_out_[v * dim_], dim_}; }
  std::span<double> mutable_input_row(std::size_t v) { return {&w_in_[v * dim_], dim_}; }
  std::span<double> mutable_output_row(std::size_t v) { return {&w_out_[v * dim_], dim_}; }

  // The input-weight rows as a float32 EmbeddingTable (source "cbow-trained").
  EmbeddingTable to_embedding_table() const;

 private:
  void hidden_mean(std::span<const std::size_t> context, std::vector<double>& h) const;
  void activations(const std::vector<double>& h, std::vector<double>& y) const;

  Vocabulary vocab_;
  std::size_t dim_;
  std::vector<double> w_in_;   // V x D, uniform init in [-0.5/D, 0.5/D]
  std::vector<double> w_out_;  // V x D, zero init
  // Scratch buffers for train_pair; training is single-threaded by contract.
  std::vector<double> scratch_h_, scratch_p_, scratch_gh_;
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean loss per epoch
  std::size_t pairs_per_epoch = 0;
  std::size_t vocab_size = 0;
};

// SGD over every (context, target) pair of every tweet, in corpus order,
// for the configured number of epochs. Deterministic given (seed, corpus
// order, config). Throws if the loss turns non-finite.
CbowModel train_cbow(std::span<const TokenList> corpus, const CbowConfig& config,
                     TrainStats* stats = nullptr);

}  // namespace tsi
