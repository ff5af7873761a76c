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
#include <string_view>
#include <vector>

#include "tsi/preprocess.hpp"

namespace tsi {

enum class Label3 { kNT, kTI, kTCI };
enum class BinaryLabel { kNT, kTR };

std::string_view to_string(Label3 label);
std::string_view to_string(BinaryLabel label);
Label3 parse_label3(std::string_view s);
BinaryLabel parse_binary_label(std::string_view s);

// NT stays NT; TI and TCI collapse into the traffic-related class TR.
BinaryLabel binarize(Label3 label);

struct LabeledTweet {
  RawTweet raw;
  Label3 label = Label3::kNT;
};

// A preprocessed tweet paired with its binarized label; the unit the
// classifier and the evaluation suite train and score on.
struct LabeledTokens {
  TokenList tokens;
  BinaryLabel label = BinaryLabel::kNT;
};

// JSONL corpus: one object per line with fields id (string), text (string),
// optional retweet_original (string), label ("NT"|"TI"|"TCI"). Errors carry
// line numbers. Unknown extra fields are ignored on read.
std::vector<LabeledTweet> read_jsonl(const std::filesystem::path& path);
void write_jsonl(std::span<const LabeledTweet> tweets, const std::filesystem::path& path);

// Lenient single-record parse for classification input: id and text required,
// label and anything else optional.
RawTweet parse_tweet_json(const std::string& line);

// CSV with a header "id,text,label[,retweet_original]", RFC-4180 quoting.
std::vector<LabeledTweet> read_csv(const std::filesystem::path& path);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;  // per binarized class
};

struct SplitResult {
  std::vector<LabeledTweet> train;
  std::vector<LabeledTweet> test;
};

// Seed-deterministic partition; with stratification each binary class
// contributes floor(fraction * class_size) tweets to train, plus one for any
// fractional remainder. Input order is preserved within both halves.
SplitResult split(std::span<const LabeledTweet> data, const SplitSpec& spec);

// Pairwise-disjoint random subsets of the requested sizes.
std::vector<std::vector<LabeledTweet>> sample_disjoint(std::span<const LabeledTweet> pool,
                                                       std::span<const std::size_t> sizes,
                                                       std::uint64_t seed);

// Preprocess + binarize a labeled corpus.
std::vector<LabeledTokens> tokenize_corpus(std::span<const LabeledTweet> tweets,
                                           const Preprocessor& pre);

// Synthetic corpus generator: two disjoint token pools ("traffic-like" and
// background); a tweet samples its pool uniformly with crossover noise, and
// one shared filler token is injected into every tweet so that keyword
// extraction has a deterministic, class-ambiguous rank-1 token.
struct SynthSpec {
  std::size_t n_tweets = 2000;
  double tr_fraction = 0.5;
  double ti_fraction = 0.7;  // share of TR tweets labeled TI (rest TCI)
  std::size_t pool_size = 50;
  double noise_rate = 0.1;  // probability a token is drawn from the other pool
  std::size_t min_len = 6;
  std::size_t max_len = 12;
  std::uint64_t seed = 1;
  std::string id_prefix = "t";
  // When non-empty these override the generated pools.
  std::vector<std::string> traffic_pool;
  std::vector<std::string> background_pool;
};

struct SynthCorpus {
  std::vector<LabeledTweet> tweets;
  std::vector<std::string> traffic_pool;
  std::vector<std::string> background_pool;
  std::string shared_token;
};

SynthCorpus generate_corpus(const SynthSpec& spec);

}  // namespace tsi
