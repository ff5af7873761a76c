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

#include "tsi/preprocess.hpp"
#include "tsi/util.hpp"

namespace tsi {

struct KeywordEntry {
  std::string token;
  std::uint64_t count = 0;

  bool operator==(const KeywordEntry&) const = default;
};

// Ranked keyword dictionary: counts non-increasing, ties broken
// lexicographically by token, no duplicates.
struct KeywordSet {
  std::vector<KeywordEntry> entries;
  std::size_t k = 0;         // requested size
  bool short_of_k = false;   // fewer distinct tokens existed than requested

  std::vector<std::string> tokens() const;
};

enum class CountMode {
  // A token occurring twice in one tweet contributes 2.
  kMultiplicity,
  // Each distinct token contributes at most 1 per tweet.
  kDistinctPerTweet,
};

using TokenCounts = StringMap<std::uint64_t>;

// Total occurrence count per token over the whole corpus. The parallel
// version shards the corpus per thread and merges; totals are bit-identical
// to the serial reference.
TokenCounts count_tokens(std::span<const TokenList> corpus,
                         CountMode mode = CountMode::kMultiplicity);
TokenCounts count_tokens_serial(std::span<const TokenList> corpus,
                                CountMode mode = CountMode::kMultiplicity);

// Top-k tokens by summed occurrence frequency. When fewer than k distinct
// tokens exist, returns them all with short_of_k set.
KeywordSet extract(std::span<const TokenList> corpus, std::size_t k,
                   CountMode mode = CountMode::kMultiplicity);
KeywordSet extract_serial(std::span<const TokenList> corpus, std::size_t k,
                          CountMode mode = CountMode::kMultiplicity);

// Drops entries whose token appears in the blocklist; ranking order kept.
KeywordSet curate(const KeywordSet& set, const StringSet& blocklist);

// Entries ranked [(band-1)*width+1 .. band*width], 1-based bands.
KeywordSet slice_band(const KeywordSet& set, std::size_t band, std::size_t width);

// UTF-8 lines "token<TAB>count".
void write_keywords(const KeywordSet& set, const std::filesystem::path& path);
KeywordSet read_keywords(const std::filesystem::path& path);

}  // namespace tsi
