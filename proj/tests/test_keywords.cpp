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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "tsi/keywords.hpp"
#include "tsi/rng.hpp"

using namespace tsi;
using tsitest::TempDir;

namespace {

// Counting oracle: naive nested loops, no sharding.
TokenCounts brute_counts(const std::vector<TokenList>& corpus, CountMode mode) {
  TokenCounts counts;
  for (const auto& tweet : corpus) {
    if (mode == CountMode::kMultiplicity) {
      for (const auto& t : tweet) ++counts[t];
    } else {
      StringSet seen;
      for (const auto& t : tweet) {
        if (seen.insert(t).second) ++counts[t];
      }
    }
  }
  return counts;
}

std::vector<TokenList> random_corpus(Rng& rng, std::size_t tweets, std::size_t vocab) {
  std::vector<TokenList> corpus(tweets);
  for (auto& tweet : corpus) {
    const std::size_t len = 1 + rng.index(12);
    for (std::size_t i = 0; i < len; ++i) {
      tweet.push_back("w" + std::to_string(rng.index(vocab)));
    }
  }
  return corpus;
}

}  // namespace

TEST_CASE("extract: counting oracle with lexicographic tie break") {
  const std::vector<TokenList> corpus{{"a", "b", "a"}, {"b", "c"}};
  const auto set = extract(corpus, 2);
  REQUIRE(set.entries.size() == 2);
  CHECK(set.entries[0].token == "a");
  CHECK(set.entries[0].count == 2);
  CHECK(set.entries[1].token == "b");
  CHECK(set.entries[1].count == 2);
  CHECK(!set.short_of_k);
}

TEST_CASE("extract: singleton corpus") {
  const std::vector<TokenList> corpus{{"x"}};
  const auto set = extract(corpus, 1);
  REQUIRE(set.entries.size() == 1);
  CHECK(set.entries[0].token == "x");
  CHECK(set.entries[0].count == 1);
}

TEST_CASE("extract: injected token ranks first") {
  Rng rng(3);
  auto corpus = random_corpus(rng, 200, 40);
  for (auto& tweet : corpus) tweet.push_back("highway");
  const auto set = extract(corpus, 1);
  CHECK(set.entries[0].token == "highway");
  CHECK(set.entries[0].count >= 200);
}

TEST_CASE("extract: k beyond the distinct-token count flags short") {
  const std::vector<TokenList> corpus{{"a", "b"}};
  const auto set = extract(corpus, 10);
  CHECK(set.entries.size() == 2);
  CHECK(set.short_of_k);
  CHECK(set.k == 10);
}

TEST_CASE("extract: argument errors") {
  const std::vector<TokenList> empty;
  CHECK_THROWS_AS(static_cast<void>(extract(empty, 1)), std::invalid_argument);
  const std::vector<TokenList> corpus{{"a"}};
  CHECK_THROWS_AS(static_cast<void>(extract(corpus, 0)), std::invalid_argument);
}

TEST_CASE("count invariants: totals, permutation, doubling") {
  Rng rng(17);
  const auto corpus = random_corpus(rng, 150, 30);
  const auto counts = count_tokens(corpus);

  std::size_t occurrences = 0;
  for (const auto& tweet : corpus) occurrences += tweet.size();
  std::uint64_t sum = 0;
  for (const auto& [tok, n] : counts) sum += n;
  CHECK(sum == occurrences);

  auto shuffled = corpus;
  rng.shuffle(shuffled);
  CHECK(extract(shuffled, 10).entries == extract(corpus, 10).entries);

  auto doubled = corpus;
  doubled.insert(doubled.end(), corpus.begin(), corpus.end());
  const auto once = extract(corpus, 20);
  const auto twice = extract(doubled, 20);
  REQUIRE(once.entries.size() == twice.entries.size());
  for (std::size_t i = 0; i < once.entries.size(); ++i) {
    CHECK(twice.entries[i].token == once.entries[i].token);
    CHECK(twice.entries[i].count == 2 * once.entries[i].count);
  }
}

TEST_CASE("parallel counting is bit-identical to the serial reference") {
  Rng rng(29);
  const auto corpus = random_corpus(rng, 2000, 80);
  for (const auto mode : {CountMode::kMultiplicity, CountMode::kDistinctPerTweet}) {
    const auto par = count_tokens(corpus, mode);
    const auto ser = count_tokens_serial(corpus, mode);
    const auto brute = brute_counts(corpus, mode);
    CHECK(par.size() == ser.size());
    CHECK(par.size() == brute.size());
    for (const auto& [tok, n] : brute) {
      CHECK(par.at(tok) == n);
      CHECK(ser.at(tok) == n);
    }
    CHECK(extract(corpus, 25, mode).entries == extract_serial(corpus, 25, mode).entries);
  }
}

TEST_CASE("distinct-per-tweet mode caps within-tweet multiplicity") {
  const std::vector<TokenList> corpus{{"a", "a", "a", "b"}, {"a", "c"}};
  const auto multi = count_tokens(corpus, CountMode::kMultiplicity);
  const auto distinct = count_tokens(corpus, CountMode::kDistinctPerTweet);
  CHECK(multi.at("a") == 4);
  CHECK(distinct.at("a") == 2);
  CHECK(distinct.at("b") == 1);
}

TEST_CASE("curate") {
  KeywordSet set;
  set.entries = {{"traffic", 9}, {"rt", 8}, {"lane", 5}};
  set.k = 3;
  SUBCASE("removes blocklisted tokens, keeps order") {
    StringSet block{"rt"};
    const auto out = curate(set, block);
    REQUIRE(out.entries.size() == 2);
    CHECK(out.entries[0].token == "traffic");
    CHECK(out.entries[1].token == "lane");
  }
  SUBCASE("empty blocklist is the identity") {
    const auto out = curate(set, StringSet{});
    CHECK(out.entries == set.entries);
  }
  SUBCASE("blocklist covering everything yields an empty set") {
    StringSet block{"traffic", "rt", "lane"};
    CHECK(curate(set, block).entries.empty());
  }
}

TEST_CASE("slice_band") {
  KeywordSet set;
  for (int i = 0; i < 40; ++i) {
    set.entries.push_back({"kw" + std::to_string(i), static_cast<std::uint64_t>(100 - i)});
  }
  SUBCASE("first band of ten") {
    const auto band = slice_band(set, 1, 10);
    REQUIRE(band.entries.size() == 10);
    CHECK(band.entries[0].token == "kw0");
    CHECK(band.entries[9].token == "kw9");
  }
  SUBCASE("fourth band of ten covers ranks 31-40") {
    const auto band = slice_band(set, 4, 10);
    REQUIRE(band.entries.size() == 10);
    CHECK(band.entries[0].token == "kw30");
    CHECK(band.entries[9].token == "kw39");
  }
  SUBCASE("narrow band") {
    KeywordSet small;
    small.entries = {{"a", 5}, {"b", 4}, {"c", 3}};
    const auto band = slice_band(small, 2, 1);
    REQUIRE(band.entries.size() == 1);
    CHECK(band.entries[0].token == "b");
  }
  SUBCASE("out-of-range band") {
    CHECK_THROWS_AS(static_cast<void>(slice_band(set, 5, 10)), std::out_of_range);
    CHECK_THROWS_AS(static_cast<void>(slice_band(set, 0, 10)), std::invalid_argument);
  }
}

TEST_CASE("keyword file round trip and validation") {
  TempDir dir;
  const auto path = dir.file("kw.tsv");
  KeywordSet set;
  set.entries = {{"highway", 120}, {"crash", 80}, {"lane", 80}};
  set.k = 3;
  write_keywords(set, path);
  CHECK(tsitest::read_file(path) == "highway\t120\ncrash\t80\nlane\t80\n");
  const auto back = read_keywords(path);
  CHECK(back.entries == set.entries);

  SUBCASE("bad count") {
    tsitest::write_file(path, "highway\tmany\n");
    CHECK_THROWS_AS(static_cast<void>(read_keywords(path)), std::runtime_error);
  }
  SUBCASE("missing tab") {
    tsitest::write_file(path, "highway 120\n");
    CHECK_THROWS_AS(static_cast<void>(read_keywords(path)), std::runtime_error);
  }
  SUBCASE("duplicate token") {
    tsitest::write_file(path, "a\t2\na\t1\n");
    CHECK_THROWS_AS(static_cast<void>(read_keywords(path)), std::runtime_error);
  }
  SUBCASE("unranked counts") {
    tsitest::write_file(path, "a\t2\nb\t5\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(read_keywords(path)), doctest::Contains("ranked"),
                         std::runtime_error);
  }
}
