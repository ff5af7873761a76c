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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsi/classifier.hpp"
#include "tsi/corpus.hpp"
#include "tsi/embedding.hpp"
#include "tsi/keywords.hpp"

namespace tsi {

// Confusion counts and the derived metrics. "F-score" is the harmonic mean
// of macro-averaged precision and recall.
struct EvalReport {
  // confusion[actual][predicted] over {NT=0, TR=1}.
  std::array<std::array<std::uint64_t, 2>, 2> confusion{};
  double accuracy = 0.0;
  double precision_nt = 0.0, precision_tr = 0.0;
  double recall_nt = 0.0, recall_tr = 0.0;
  double f_score = 0.0;

  std::uint64_t total() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
  }
  std::string to_text() const;
  std::string to_json() const;
};

EvalReport score(std::span<const BinaryLabel> preds, std::span<const BinaryLabel> truths);
EvalReport report_from_confusion(std::uint64_t nt_nt, std::uint64_t nt_tr, std::uint64_t tr_nt,
                                 std::uint64_t tr_tr);

struct HistogramReport {
  std::vector<double> edges;  // bins + 1 values over the joint score range
  std::vector<std::uint64_t> counts_nt;
  std::vector<std::uint64_t> counts_tr;
  double nt_mean = 0.0, tr_mean = 0.0;
  double nt_variance = 0.0, tr_variance = 0.0;  // population variance
  double threshold = 0.0;                       // midpoint marker

  std::string to_csv() const;  // "x,value_nt,value_tr", x = bin center
  std::string to_json() const;
};

HistogramReport histogram(std::span<const double> scores_nt, std::span<const double> scores_tr,
                          std::size_t bins);

struct SweepPoint {
  std::size_t k = 0;
  double accuracy = 0.0;
};

struct SweepReport {
  std::vector<SweepPoint> points;  // keyword counts strictly increasing

  std::string to_csv() const;  // "k,accuracy"
  std::string to_json() const;
};

// For each k, fit with the top-k entries of the ranking on train and report
// accuracy on test. ks must be strictly increasing and within the ranking.
SweepReport sweep_keywords(const EmbeddingTable& table, const KeywordSet& ranking,
                           std::span<const LabeledTokens> train,
                           std::span<const LabeledTokens> test,
                           std::span<const std::size_t> ks);

struct RobustnessConfig {
  std::size_t runs = 10;
  std::size_t sample_size = 1000;  // per keyword / threshold sample
  std::size_t k = 10;
  std::uint64_t seed = 0;
  // When the pool cannot serve runs pairwise-disjoint sample pairs, allow
  // re-sampling across runs (samples stay disjoint within a run).
  bool allow_replacement = false;
};

struct RobustnessRun {
  std::size_t run = 0;
  double accuracy = 0.0;
  double threshold = 0.0;
};

struct RobustnessReport {
  std::vector<RobustnessRun> runs;
  bool sampled_with_replacement = false;
  double min_accuracy = 0.0;
  double max_accuracy = 0.0;

  std::string to_json() const;
};

// Per run: draw a keyword-extraction sample and a threshold sample from the
// training pool, extract top-k keywords from the sample's TR tweets, fit, and
// score the fixed test set. Deterministic for a given seed.
RobustnessReport robustness(const EmbeddingTable& table,
                            std::span<const LabeledTokens> main_train,
                            std::span<const LabeledTokens> test, const RobustnessConfig& config);

}  // namespace tsi
