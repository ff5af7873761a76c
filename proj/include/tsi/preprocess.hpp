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

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "tsi/util.hpp"

namespace tsi {

struct RawTweet {
  std::string id;
  std::string text;
  // Full text of the native tweet when this one is a retweet; preferred over
  // `text` during normalization to avoid truncation.
  std::optional<std::string> retweet_original;
};

// Ordered normalized tokens: lowercase [a-z0-9]+ with at least one letter,
// no stopwords, no purely numeric tokens.
using TokenList = std::vector<std::string>;

StringSet default_stopwords();
// UTF-8, one token per line; '#'-prefixed comment lines and blanks ignored.
StringSet load_token_set(const std::filesystem::path& path);

std::vector<std::string> default_highway_patterns();
// One regular expression per line; same comment/blank handling as above.
std::vector<std::string> load_pattern_file(const std::filesystem::path& path);

// Rewrites U.S./Interstate highway designations ("US 50", "I-66", ...) to the
// literal token "highway". Patterns are matched case-insensitively in a
// whole-token context so e.g. "VIRUS 50" is left alone.
class HighwayRewriter {
 public:
  HighwayRewriter() : HighwayRewriter(default_highway_patterns()) {}
  explicit HighwayRewriter(const std::vector<std::string>& patterns);
  std::string rewrite(const std::string& text) const;

 private:
  std::vector<std::regex> patterns_;
};

// Deletes every URL (http://, https://, www. up to the next whitespace).
std::string strip_urls(const std::string& text);

// True iff every character is an ASCII digit.
bool is_numeric_token(std::string_view token);

// The fixed normalization pipeline, applied in order: retweet text selection,
// URL removal, highway rewriting, lowercasing, special-character removal,
// whitespace split, stopword drop, numeric-token drop.
class Preprocessor {
 public:
  Preprocessor() : Preprocessor(default_stopwords(), HighwayRewriter()) {}
  Preprocessor(StringSet stopwords, HighwayRewriter rewriter)
      : stopwords_(std::move(stopwords)), rewriter_(std::move(rewriter)) {}

  TokenList normalize(const RawTweet& tweet) const;
  TokenList normalize_text(const std::string& text) const;

  const StringSet& stopwords() const { return stopwords_; }

 private:
  StringSet stopwords_;
  HighwayRewriter rewriter_;
};

}  // namespace tsi
