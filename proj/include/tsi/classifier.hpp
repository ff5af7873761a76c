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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsi/corpus.hpp"
#include "tsi/embedding.hpp"
#include "tsi/keywords.hpp"

namespace tsi {

// Mean cosine similarity between a tweet's in-vocabulary token vectors and
// the keyword centroid. Undefined (words_scored == 0) when the tweet is empty
// or fully out of vocabulary; out-of-vocabulary tokens are skipped from the
// mean, never scored as zero.
struct TsiScore {
  double value = 0.0;
  std::size_t words_scored = 0;
  std::size_t words_skipped = 0;
  bool defined() const { return words_scored > 0; }
};

// The trained classifier: keyword centroid plus the scalar decision
// threshold, with enough provenance to detect table mismatches later.
struct TsiModel {
  KeywordSet keywords;
  std::vector<double> mu;  // centroid of the in-vocabulary keyword vectors
  double threshold = 0.0;
  double nt_tsi = 0.0;  // class-mean TSI over the training run
  double tr_tsi = 0.0;
  std::string embedding_source;
  std::uint64_t embedding_hash = 0;
  std::size_t skipped_keywords = 0;  // keywords absent from the table
};

struct FitReport {
  double nt_tsi = 0.0;
  double tr_tsi = 0.0;
  double threshold = 0.0;
  std::size_t nt_scored = 0;
  std::size_t tr_scored = 0;
  std::size_t nt_undefined = 0;  // training tweets excluded from the class mean
  std::size_t tr_undefined = 0;
  std::size_t skipped_keywords = 0;
};

struct Prediction {
  BinaryLabel label = BinaryLabel::kNT;
  TsiScore score;
};

TsiScore tsi_score(const EmbeddingTable& table, std::span<const double> mu, const TokenList& tokens);

// Centroid from the keyword tokens present in the table, class-mean TSI per
// label over the defined-score training tweets, threshold at the midpoint.
// Throws when every keyword is out of vocabulary or when a class ends up
// with no defined-TSI tweet.
TsiModel fit(const EmbeddingTable& table, const KeywordSet& keywords,
             std::span<const LabeledTokens> train, FitReport* report = nullptr);

// TR iff the TSI is defined and strictly exceeds the threshold; NT otherwise
// (including the undefined case).
Prediction predict(const TsiModel& model, const EmbeddingTable& table, const TokenList& tokens);

// Element-wise identical to mapping predict; input order preserved. The
// parallel version and the serial reference produce identical output.
std::vector<Prediction> predict_batch(const TsiModel& model, const EmbeddingTable& table,
                                      std::span<const TokenList> tweets);
std::vector<Prediction> predict_batch_serial(const TsiModel& model, const EmbeddingTable& table,
                                             std::span<const TokenList> tweets);

// Versioned self-describing text format ("tsi-model v1"); doubles are written
// with 17 significant digits so a round-trip is exact.
void write_model(const TsiModel& model, const std::filesystem::path& path);
TsiModel read_model(const std::filesystem::path& path);

// Throws unless the table matches the model's dimension and content hash.
void verify_model_table(const TsiModel& model, const EmbeddingTable& table);

}  // namespace tsi
