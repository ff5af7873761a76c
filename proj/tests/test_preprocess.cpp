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
#include "tsi/preprocess.hpp"
#include "tsi/rng.hpp"

using namespace tsi;
using tsitest::TempDir;

namespace {

std::string join(const TokenList& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace

TEST_CASE("golden tweet normalization") {
  const Preprocessor pre;
  const auto got = pre.normalize_text(
      "Cleared: Disabled Vehicle: EB on I-66 at MM68 in Arlington Co.11:36 AM");
  const TokenList expected{"cleared", "disabled", "vehicle", "eb",
                           "highway", "mm68",     "arlington", "co", "am"};
  CHECK(got == expected);
}

TEST_CASE("empty input yields empty output") {
  const Preprocessor pre;
  CHECK(pre.normalize_text("").empty());
  CHECK(pre.normalize_text("   \t  ").empty());
}

TEST_CASE("url, highway, stopword, and number steps compose") {
  const Preprocessor pre;
  const auto got = pre.normalize_text("Crash on US 50 http://t.co/xyz at 11:36");
  CHECK(got == TokenList{"crash", "highway"});
}

TEST_CASE("retweet original text wins over the truncated text") {
  const Preprocessor pre;
  RawTweet t;
  t.id = "1";
  t.text = "RT truncated garbage...";
  t.retweet_original = "Crash on I-95";
  CHECK(pre.normalize(t) == TokenList{"crash", "highway"});
  t.retweet_original.reset();
  CHECK(pre.normalize(t) == TokenList{"rt", "truncated", "garbage"});
}

TEST_CASE("highway_rewrite") {
  const HighwayRewriter rw;
  CHECK(rw.rewrite("I-66 at MM68") == "highway at MM68");
  CHECK(rw.rewrite("no roads here") == "no roads here");
  // SR is not in the default pattern set.
  CHECK(rw.rewrite("US 50 meets I-495 and SR 7") == "highway meets highway and SR 7");
  CHECK(rw.rewrite("Interstate 95 closed") == "highway closed");
  CHECK(rw.rewrite("U.S. 1 and U.S.50") == "highway and highway");
  CHECK(rw.rewrite("i95 south") == "highway south");
  CHECK(rw.rewrite("US-29N") == "US-29N");  // no right boundary after the digits
  SUBCASE("whole-token context") {
    CHECK(rw.rewrite("VIRUS 50") == "VIRUS 50");
    CHECK(rw.rewrite("WI 95") == "WI 95");
    CHECK(rw.rewrite("xI95") == "xI95");
  }
  SUBCASE("adjacent matches") {
    CHECK(rw.rewrite("US 50 I-66") == "highway highway");
    CHECK(rw.rewrite("I-66/US 50") == "highway/highway");
  }
  SUBCASE("custom pattern table") {
    const HighwayRewriter custom(std::vector<std::string>{"SR[ -]?[0-9]+"});
    CHECK(custom.rewrite("SR 7 near I-66") == "highway near I-66");
    CHECK_THROWS_AS(HighwayRewriter(std::vector<std::string>{"(["}), std::runtime_error);
  }
}

TEST_CASE("strip_urls") {
  CHECK(strip_urls("Crash http://t.co/xyz ahead") == "Crash ahead");
  CHECK(strip_urls("see https://example.com/a?b=1") == "see ");
  CHECK(strip_urls("go to www.example.com now") == "go to now");
  CHECK(strip_urls("(http://t.co/x)") == "(");
  CHECK(strip_urls("HTTP://SHOUTY.COM rest") == "rest");
  CHECK(strip_urls("no urls here") == "no urls here");
}

TEST_CASE("is_numeric_token") {
  CHECK(is_numeric_token("511"));
  CHECK(!is_numeric_token("mm68"));
  CHECK(!is_numeric_token("i66"));
  CHECK(!is_numeric_token("abc"));
}

TEST_CASE("mentions and hashtags lose the sigil, keep the word") {
  const Preprocessor pre;
  CHECK(pre.normalize_text("@VaDOT reports #crash ahead") ==
        TokenList{"vadot", "reports", "crash", "ahead"});
}

TEST_CASE("non-ascii characters are removed as special characters") {
  const Preprocessor pre;
  CHECK(pre.normalize_text("caf\xc3\xa9 jam\xe2\x80\xa6 ahead") ==
        TokenList{"caf", "jam", "ahead"});
}

TEST_CASE("normalize is idempotent on its own output") {
  const Preprocessor pre;
  Rng rng(11);
  const std::vector<std::string> samples{
      "Cleared: Disabled Vehicle: EB on I-66 at MM68 in Arlington Co.11:36 AM",
      "Crash on US 50 http://t.co/xyz at 11:36",
      "Accident, I-285 North past Lavista Road, far right lane blocked. #511GA",
      "Closure on #ThrogsNeckBridge SB from Bronx side to Queens side",
      "Is there a street or sidewalk left in Cambridge that is not under construction?",
  };
  for (const auto& s : samples) {
    const auto once = pre.normalize_text(s);
    const auto twice = pre.normalize_text(join(once));
    CHECK(once == twice);
  }
  // Random alphanumeric soup with punctuation.
  for (int i = 0; i < 200; ++i) {
    std::string s;
    const char* alphabet = "abcXYZ019 .:!-/#@";
    for (int j = 0; j < 40; ++j) s.push_back(alphabet[rng.index(17)]);
    const auto once = pre.normalize_text(s);
    const auto twice = pre.normalize_text(join(once));
    CHECK(once == twice);
  }
}

TEST_CASE("output contains no uppercase, no http substring, no stopwords, and a letter per token") {
  const Preprocessor pre;
  Rng rng(23);
  const std::vector<std::string> urls{"http://t.co/abc", "https://ex.am/p?q=1", "www.site.org/x"};
  for (int i = 0; i < 300; ++i) {
    std::string s;
    const char* alphabet = "abcdefgh XYZ 0123 .,:;!?-()[]#@'\"";
    for (int j = 0; j < 60; ++j) s.push_back(alphabet[rng.index(33)]);
    if (i % 2 == 0) s += " " + urls[rng.index(urls.size())];
    const auto toks = pre.normalize_text(s);
    for (const auto& t : toks) {
      CHECK(!t.empty());
      bool has_letter = false;
      for (char c : t) {
        CHECK(!(c >= 'A' && c <= 'Z'));
        has_letter |= (c >= 'a' && c <= 'z');
      }
      CHECK(has_letter);
      CHECK(t.find("http") == std::string::npos);
      CHECK(pre.stopwords().find(t) == pre.stopwords().end());
    }
  }
}

TEST_CASE("url transparency: inserting a URL token never changes the output") {
  const Preprocessor pre;
  Rng rng(37);
  const std::vector<std::string> urls{"http://t.co/abc123", "https://news.example.com/x%20y",
                                      "www.w3.org/TR"};
  const std::vector<std::string> bases{
      "Crash on US 50 at exit 12",
      "heavy police presence in the area of Military Avenue",
      "Congestion: Dolphin Exwy EB - Between NW 107th Av and NW 87th Av",
  };
  for (int i = 0; i < 100; ++i) {
    const auto& base = bases[rng.index(bases.size())];
    // Insert a URL as a whitespace-delimited token at a random word boundary.
    std::vector<std::string> words;
    std::size_t at = 0;
    while (at < base.size()) {
      const auto sp = base.find(' ', at);
      words.push_back(base.substr(at, sp == std::string::npos ? sp : sp - at));
      if (sp == std::string::npos) break;
      at = sp + 1;
    }
    auto with_url = words;
    with_url.insert(with_url.begin() + static_cast<std::ptrdiff_t>(rng.index(words.size() + 1)),
                    urls[rng.index(urls.size())]);
    std::string inserted;
    for (std::size_t j = 0; j < with_url.size(); ++j) {
      if (j) inserted.push_back(' ');
      inserted += with_url[j];
    }
    CHECK(pre.normalize_text(inserted) == pre.normalize_text(base));
  }
}

TEST_CASE("stopword file loading and override") {
  TempDir dir;
  tsitest::write_file(dir.file("stop.txt"), "# comment line\nfoo\nbar\n\n");
  const auto set = load_token_set(dir.file("stop.txt"));
  CHECK(set.size() == 2);
  CHECK(set.count("foo") == 1);
  CHECK(set.count("# comment line") == 0);

  const Preprocessor pre(set, HighwayRewriter());
  CHECK(pre.normalize_text("foo crash bar") == TokenList{"crash"});
  // "on" is no longer a stopword under the override.
  CHECK(pre.normalize_text("crash on foo") == TokenList{"crash", "on"});

  CHECK_THROWS_AS(load_token_set(dir.file("missing.txt")), std::runtime_error);
}

TEST_CASE("pattern file loading") {
  TempDir dir;
  tsitest::write_file(dir.file("p.txt"), "# highways\nSR[ -]?[0-9]+\nRoute [0-9]+\n");
  const auto patterns = load_pattern_file(dir.file("p.txt"));
  REQUIRE(patterns.size() == 2);
  const HighwayRewriter rw(patterns);
  CHECK(rw.rewrite("SR 7 and Route 66") == "highway and highway");
  tsitest::write_file(dir.file("empty.txt"), "# nothing\n");
  CHECK_THROWS_AS(load_pattern_file(dir.file("empty.txt")), std::runtime_error);
}

TEST_CASE("default stopwords keep am and drop articles and prepositions") {
  const auto stop = default_stopwords();
  CHECK(stop.count("the") == 1);
  CHECK(stop.count("on") == 1);
  CHECK(stop.count("at") == 1);
  CHECK(stop.count("in") == 1);
  CHECK(stop.count("am") == 0);  // the morning marker survives normalization
  CHECK(stop.count("co") == 0);
  CHECK(stop.count("eb") == 0);
}
