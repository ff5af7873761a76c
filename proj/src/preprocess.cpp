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

#include "tsi/preprocess.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

namespace tsi {

namespace {

// Articles, prepositions, conjunctions, pronouns, and auxiliary verbs.
// "am" is deliberately absent: the morning marker in timestamps ("11:36 AM")
// is a content token in this corpus.
constexpr const char* kStopwords[] = {
    // articles
    "a", "an", "the",
    // conjunctions
    "and", "but", "or", "nor", "so", "yet", "if", "because", "as", "until", "while", "than",
    "whether",
    // prepositions
    "of", "in", "on", "at", "to", "from", "by", "with", "about", "against", "between", "into",
    "through", "during", "before", "after", "above", "below", "up", "down", "out", "off", "over",
    "under", "near", "onto", "upon", "for",
    // pronouns and determiners
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "my", "your",
    "his", "its", "our", "their", "mine", "yours", "ours", "theirs", "this", "that", "these",
    "those", "who", "whom", "whose", "which", "what",
    // auxiliary verbs
    "is", "are", "was", "were", "be", "been", "being", "have", "has", "had", "having", "do",
    "does", "did", "doing", "will", "would", "shall", "should", "can", "could", "may", "might",
    "must",
    // common function words
    "not", "no", "too", "very", "just", "only", "also", "there", "here", "then", "when", "where",
    "why", "how", "all", "any", "each", "few", "more", "most", "other", "some", "such", "own",
    "same", "both", "again", "further", "once",
};

bool match_icase_at(const std::string& text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(text[pos + i]) != prefix[i]) return false;
  }
  return true;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

StringSet default_stopwords() {
  StringSet set;
  for (const char* w : kStopwords) set.emplace(w);
  return set;
}

StringSet load_token_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  StringSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    set.insert(line);
  }
  return set;
}

std::vector<std::string> default_highway_patterns() {
  return {
      "US[ -]?[0-9]+",
      "I[ -]?[0-9]+",
      "Interstate [0-9]+",
      "U\\.S\\.[ -]?[0-9]+",
  };
}

std::vector<std::string> load_pattern_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::vector<std::string> patterns;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    patterns.push_back(line);
  }
  if (patterns.empty()) throw std::runtime_error(path.string() + ": no patterns");
  return patterns;
}

HighwayRewriter::HighwayRewriter(const std::vector<std::string>& patterns) {
  patterns_.reserve(patterns.size());
  for (const auto& p : patterns) {
    try {
      // Group 1 keeps the left boundary character; the lookahead leaves the
      // right boundary unconsumed so adjacent matches still fire.
      patterns_.emplace_back("(^|[^A-Za-z0-9])(" + p + ")(?=$|[^A-Za-z0-9])",
                             std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw std::runtime_error("bad highway pattern '" + p + "': " + e.what());
    }
  }
}

std::string HighwayRewriter::rewrite(const std::string& text) const {
  std::string s = text;
  for (const auto& re : patterns_) {
    s = std::regex_replace(s, re, "$1highway");
  }
  return s;
}

std::string strip_urls(const std::string& text) {
  static constexpr std::array<std::string_view, 3> kPrefixes{"http://", "https://", "www."};
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool url = false;
    for (const auto p : kPrefixes) {
      if (match_icase_at(text, i, p)) {
        url = true;
        break;
      }
    }
    if (url) {
      while (i < text.size() && !is_space(text[i])) ++i;
      // Collapse the surrounding delimiters so removing a URL token leaves
      // the rest of the text exactly as if the token had never been there.
      if (i < text.size() && is_space(text[i]) && (out.empty() || is_space(out.back()))) ++i;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

bool is_numeric_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (!is_ascii_digit(c)) return false;
  }
  return true;
}

TokenList Preprocessor::normalize(const RawTweet& tweet) const {
  return normalize_text(tweet.retweet_original ? *tweet.retweet_original : tweet.text);
}

TokenList Preprocessor::normalize_text(const std::string& text) const {
  std::string s = rewriter_.rewrite(strip_urls(text));
  for (char& c : s) {
    c = ascii_lower(c);
    if (!is_ascii_alnum(c)) c = ' ';
  }
  TokenList out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    if (i >= s.size()) break;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    std::string token = s.substr(start, i - start);
    if (stopwords_.find(token) != stopwords_.end()) continue;
    if (is_numeric_token(token)) continue;
    out.push_back(std::move(token));
  }
  return out;
}

}  // namespace tsi
