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

#include "tsi/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tsi/rng.hpp"

namespace tsi {

namespace {

using nlohmann::json;

std::runtime_error line_error(const std::filesystem::path& path, std::size_t lineno,
                              const std::string& what) {
  return std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + what);
}

std::string require_string(const json& j, const char* field) {
  const auto it = j.find(field);
  if (it == j.end()) throw std::runtime_error(std::string("missing required field '") + field + "'");
  if (!it->is_string()) throw std::runtime_error(std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

LabeledTweet parse_labeled(const json& j) {
  if (!j.is_object()) throw std::runtime_error("expected a JSON object");
  LabeledTweet t;
  t.raw.id = require_string(j, "id");
  t.raw.text = require_string(j, "text");
  if (const auto it = j.find("retweet_original"); it != j.end()) {
    if (!it->is_string()) throw std::runtime_error("field 'retweet_original' must be a string");
    t.raw.retweet_original = it->get<std::string>();
  }
  t.label = parse_label3(require_string(j, "label"));
  return t;
}

// RFC-4180: quoted fields may contain commas, newlines, and doubled quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& content,
                                                const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < content.size()) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          quoted = false;
          ++i;
        }
      } else {
        field.push_back(c);
        ++i;
      }
    } else if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
      ++i;
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
      ++i;
    }
  }
  if (quoted) throw std::runtime_error(path.string() + ": unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string random_letters(Rng& rng, std::size_t min_len, std::size_t max_len) {
  const std::size_t len = min_len + rng.index(max_len - min_len + 1);
  std::string s(len, 'a');
  for (auto& c : s) c = static_cast<char>('a' + rng.index(26));
  return s;
}

std::vector<std::string> make_pool(Rng& rng, std::size_t size, StringSet& taken) {
  std::vector<std::string> pool;
  pool.reserve(size);
  while (pool.size() < size) {
    std::string tok = random_letters(rng, 5, 8);
    if (tok == "highway") continue;
    if (taken.find(tok) != taken.end()) continue;
    taken.insert(tok);
    pool.push_back(std::move(tok));
  }
  return pool;
}

}  // namespace

std::string_view to_string(Label3 label) {
  switch (label) {
    case Label3::kNT: return "NT";
    case Label3::kTI: return "TI";
    case Label3::kTCI: return "TCI";
  }
  return "NT";
}

std::string_view to_string(BinaryLabel label) {
  return label == BinaryLabel::kNT ? "NT" : "TR";
}

Label3 parse_label3(std::string_view s) {
  if (s == "NT") return Label3::kNT;
  if (s == "TI") return Label3::kTI;
  if (s == "TCI") return Label3::kTCI;
  throw std::runtime_error("unknown label '" + std::string(s) + "' (expected NT, TI, or TCI)");
}

BinaryLabel parse_binary_label(std::string_view s) {
  if (s == "NT") return BinaryLabel::kNT;
  if (s == "TR") return BinaryLabel::kTR;
  throw std::runtime_error("unknown label '" + std::string(s) + "' (expected NT or TR)");
}

BinaryLabel binarize(Label3 label) {
  return label == Label3::kNT ? BinaryLabel::kNT : BinaryLabel::kTR;
}

std::vector<LabeledTweet> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::vector<LabeledTweet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw line_error(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    try {
      out.push_back(parse_labeled(j));
    } catch (const std::exception& e) {
      throw line_error(path, lineno, e.what());
    }
  }
  return out;
}

void write_jsonl(std::span<const LabeledTweet> tweets, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  for (const auto& t : tweets) {
    json j;
    j["id"] = t.raw.id;
    j["label"] = std::string(to_string(t.label));
    if (t.raw.retweet_original) j["retweet_original"] = *t.raw.retweet_original;
    j["text"] = t.raw.text;
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

RawTweet parse_tweet_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("expected a JSON object");
  RawTweet t;
  t.id = require_string(j, "id");
  t.text = require_string(j, "text");
  if (const auto it = j.find("retweet_original"); it != j.end()) {
    if (!it->is_string()) throw std::runtime_error("field 'retweet_original' must be a string");
    t.retweet_original = it->get<std::string>();
  }
  return t;
}

std::vector<LabeledTweet> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto records = parse_csv(content, path);
  if (records.empty()) throw std::runtime_error(path.string() + ": empty file");

  const auto& header = records[0];
  const bool with_retweet = header.size() == 4 && header[3] == "retweet_original";
  if (!(header.size() == 3 || with_retweet) || header[0] != "id" || header[1] != "text" ||
      header[2] != "label") {
    throw std::runtime_error(path.string() +
                             ": expected header 'id,text,label[,retweet_original]'");
  }
  std::vector<LabeledTweet> out;
  out.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() == 1 && rec[0].empty()) continue;  // trailing blank record
    if (rec.size() != header.size()) {
      throw std::runtime_error(path.string() + ": record " + std::to_string(r) + " has " +
                               std::to_string(rec.size()) + " fields, expected " +
                               std::to_string(header.size()));
    }
    LabeledTweet t;
    t.raw.id = rec[0];
    t.raw.text = rec[1];
    try {
      t.label = parse_label3(rec[2]);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": record " + std::to_string(r) + ": " + e.what());
    }
    if (with_retweet && !rec[3].empty()) t.raw.retweet_original = rec[3];
    out.push_back(std::move(t));
  }
  return out;
}

SplitResult split(std::span<const LabeledTweet> data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw std::invalid_argument("split: train_fraction must be in (0, 1)");
  }
  // Group indices per stratum (binarized class, or everything when not
  // stratified), shuffle each group, then take the train quota per group.
  std::vector<std::vector<std::size_t>> groups;
  if (spec.stratified) {
    groups.resize(2);
    for (std::size_t i = 0; i < data.size(); ++i) {
      groups[binarize(data[i].label) == BinaryLabel::kNT ? 0 : 1].push_back(i);
    }
    if (groups[0].empty() || groups[1].empty()) {
      throw std::runtime_error("split: stratification requires at least one tweet per class");
    }
  } else {
    groups.resize(1);
    for (std::size_t i = 0; i < data.size(); ++i) groups[0].push_back(i);
    if (groups[0].empty()) throw std::runtime_error("split: empty input");
  }

  Rng rng(spec.seed);
  std::vector<bool> in_train(data.size(), false);
  for (auto& group : groups) {
    rng.shuffle(group);
    const double want = spec.train_fraction * static_cast<double>(group.size());
    // Floor with the fractional remainder assigned to train; the epsilon
    // keeps exact products like 0.8*20 from landing on either side of an ulp.
    auto train_n = static_cast<std::size_t>(std::floor(want + 1e-9));
    if (want - static_cast<double>(train_n) > 1e-9) ++train_n;
    train_n = std::min(train_n, group.size());
    for (std::size_t i = 0; i < train_n; ++i) in_train[group[i]] = true;
  }

  SplitResult result;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (in_train[i] ? result.train : result.test).push_back(data[i]);
  }
  return result;
}

std::vector<std::vector<LabeledTweet>> sample_disjoint(std::span<const LabeledTweet> pool,
                                                       std::span<const std::size_t> sizes,
                                                       std::uint64_t seed) {
  const std::vector<std::size_t> size_vec(sizes.begin(), sizes.end());
  auto index_sets = disjoint_index_samples(pool.size(), size_vec, seed);
  std::vector<std::vector<LabeledTweet>> out;
  out.reserve(index_sets.size());
  for (auto& indices : index_sets) {
    std::sort(indices.begin(), indices.end());
    std::vector<LabeledTweet> subset;
    subset.reserve(indices.size());
    for (std::size_t i : indices) subset.push_back(pool[i]);
    out.push_back(std::move(subset));
  }
  return out;
}

std::vector<LabeledTokens> tokenize_corpus(std::span<const LabeledTweet> tweets,
                                           const Preprocessor& pre) {
  std::vector<LabeledTokens> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) {
    out.push_back(LabeledTokens{pre.normalize(t.raw), binarize(t.label)});
  }
  return out;
}

SynthCorpus generate_corpus(const SynthSpec& spec) {
  if (spec.n_tweets == 0) throw std::invalid_argument("generate_corpus: n_tweets must be positive");
  if (spec.min_len == 0 || spec.min_len > spec.max_len) {
    throw std::invalid_argument("generate_corpus: bad tweet length range");
  }
  if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0) {
    throw std::invalid_argument("generate_corpus: noise_rate must be in [0, 1]");
  }

  Rng rng(spec.seed);
  SynthCorpus corpus;
  const StringSet stop = default_stopwords();
  StringSet taken;
  for (const auto& w : stop) taken.insert(w);

  if (!spec.traffic_pool.empty()) {
    corpus.traffic_pool = spec.traffic_pool;
    for (const auto& w : corpus.traffic_pool) taken.insert(w);
  } else {
    corpus.traffic_pool = make_pool(rng, spec.pool_size, taken);
  }
  if (!spec.background_pool.empty()) {
    corpus.background_pool = spec.background_pool;
    for (const auto& w : corpus.background_pool) taken.insert(w);
  } else {
    corpus.background_pool = make_pool(rng, spec.pool_size, taken);
  }
  corpus.shared_token = make_pool(rng, 1, taken)[0];

  // Exact class counts, positions shuffled.
  const auto n_tr = static_cast<std::size_t>(
      std::llround(spec.tr_fraction * static_cast<double>(spec.n_tweets)));
  const auto n_ti =
      static_cast<std::size_t>(std::llround(spec.ti_fraction * static_cast<double>(n_tr)));
  std::vector<Label3> labels;
  labels.reserve(spec.n_tweets);
  for (std::size_t i = 0; i < n_ti; ++i) labels.push_back(Label3::kTI);
  for (std::size_t i = n_ti; i < n_tr; ++i) labels.push_back(Label3::kTCI);
  for (std::size_t i = n_tr; i < spec.n_tweets; ++i) labels.push_back(Label3::kNT);
  rng.shuffle(labels);

  char idbuf[64];
  corpus.tweets.reserve(spec.n_tweets);
  for (std::size_t i = 0; i < spec.n_tweets; ++i) {
    const bool traffic = labels[i] != Label3::kNT;
    const auto& primary = traffic ? corpus.traffic_pool : corpus.background_pool;
    const auto& other = traffic ? corpus.background_pool : corpus.traffic_pool;
    const std::size_t len = spec.min_len + rng.index(spec.max_len - spec.min_len + 1);
    std::vector<std::string> toks;
    toks.reserve(len + 1);
    for (std::size_t j = 0; j < len; ++j) {
      const auto& pool = (rng.real() < spec.noise_rate) ? other : primary;
      toks.push_back(pool[rng.index(pool.size())]);
    }
    toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(rng.index(len + 1)),
                corpus.shared_token);

    LabeledTweet t;
    std::snprintf(idbuf, sizeof(idbuf), "%s%06zu", spec.id_prefix.c_str(), i);
    t.raw.id = idbuf;
    t.label = labels[i];
    std::string text;
    for (std::size_t j = 0; j < toks.size(); ++j) {
      if (j) text.push_back(' ');
      text += toks[j];
    }
    t.raw.text = std::move(text);
    corpus.tweets.push_back(std::move(t));
  }
  return corpus;
}

}  // namespace tsi
