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

#include "tsi/keywords.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace tsi {

namespace {

void count_one(TokenCounts& counts, const TokenList& tweet, CountMode mode) {
  if (mode == CountMode::kMultiplicity) {
    for (const auto& tok : tweet) ++counts[tok];
  } else {
    StringSet seen;
    for (const auto& tok : tweet) {
      if (seen.insert(tok).second) ++counts[tok];
    }
  }
}

TokenCounts count_impl(std::span<const TokenList> corpus, CountMode mode, bool parallel) {
  const int shards = parallel ? omp_get_max_threads() : 1;
  std::vector<TokenCounts> partial(static_cast<std::size_t>(shards));
#pragma omp parallel num_threads(shards) if (parallel)
  {
    TokenCounts& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
    const auto n = static_cast<std::int64_t>(corpus.size());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      count_one(local, corpus[static_cast<std::size_t>(i)], mode);
    }
  }
  TokenCounts result = std::move(partial[0]);
  for (std::size_t s = 1; s < partial.size(); ++s) {
    for (auto& [tok, n] : partial[s]) result[tok] += n;
  }
  return result;
}

KeywordSet extract_impl(std::span<const TokenList> corpus, std::size_t k, CountMode mode,
                        bool parallel) {
  if (corpus.empty()) throw std::invalid_argument("extract: empty corpus");
  if (k == 0) throw std::invalid_argument("extract: k must be positive");
  TokenCounts counts = count_impl(corpus, mode, parallel);

  std::vector<KeywordEntry> ranked;
  ranked.reserve(counts.size());
  for (auto& [tok, n] : counts) ranked.push_back(KeywordEntry{tok, n});
  std::sort(ranked.begin(), ranked.end(), [](const KeywordEntry& a, const KeywordEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  });

  KeywordSet set;
  set.k = k;
  set.short_of_k = ranked.size() < k;
  if (ranked.size() > k) ranked.resize(k);
  set.entries = std::move(ranked);
  return set;
}

}  // namespace

std::vector<std::string> KeywordSet::tokens() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.token);
  return out;
}

TokenCounts count_tokens(std::span<const TokenList> corpus, CountMode mode) {
  return count_impl(corpus, mode, true);
}

TokenCounts count_tokens_serial(std::span<const TokenList> corpus, CountMode mode) {
  return count_impl(corpus, mode, false);
}

KeywordSet extract(std::span<const TokenList> corpus, std::size_t k, CountMode mode) {
  return extract_impl(corpus, k, mode, true);
}

KeywordSet extract_serial(std::span<const TokenList> corpus, std::size_t k, CountMode mode) {
  return extract_impl(corpus, k, mode, false);
}

KeywordSet curate(const KeywordSet& set, const StringSet& blocklist) {
  KeywordSet out;
  out.k = set.k;
  out.short_of_k = set.short_of_k;
  for (const auto& e : set.entries) {
    if (blocklist.find(e.token) == blocklist.end()) out.entries.push_back(e);
  }
  return out;
}

KeywordSet slice_band(const KeywordSet& set, std::size_t band, std::size_t width) {
  if (band == 0 || width == 0) {
    throw std::invalid_argument("slice_band: band and width must be positive");
  }
  if (band * width > set.entries.size()) {
    throw std::out_of_range("slice_band: band " + std::to_string(band) + " of width " +
                            std::to_string(width) + " exceeds the " +
                            std::to_string(set.entries.size()) + " available entries");
  }
  KeywordSet out;
  out.k = width;
  const std::size_t start = (band - 1) * width;
  out.entries.assign(set.entries.begin() + static_cast<std::ptrdiff_t>(start),
                     set.entries.begin() + static_cast<std::ptrdiff_t>(start + width));
  return out;
}

void write_keywords(const KeywordSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  for (const auto& e : set.entries) {
    out << e.token << '\t' << e.count << '\n';
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

KeywordSet read_keywords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  KeywordSet set;
  StringSet seen;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t prev = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = path.string() + ":" + std::to_string(lineno);
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw std::runtime_error(where + ": expected 'token<TAB>count'");
    }
    KeywordEntry e;
    e.token = line.substr(0, tab);
    const char* begin = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    auto r = std::from_chars(begin, end, e.count);
    if (r.ec != std::errc{} || r.ptr != end) {
      throw std::runtime_error(where + ": bad count '" + line.substr(tab + 1) + "'");
    }
    if (!seen.insert(e.token).second) {
      throw std::runtime_error(where + ": duplicate token '" + e.token + "'");
    }
    if (!set.entries.empty() && e.count > prev) {
      throw std::runtime_error(where + ": counts not ranked (non-increasing) at '" + e.token + "'");
    }
    prev = e.count;
    set.entries.push_back(std::move(e));
  }
  set.k = set.entries.size();
  return set;
}

}  // namespace tsi
