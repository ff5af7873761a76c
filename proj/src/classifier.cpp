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

#include "tsi/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsi {

namespace {

double l2_norm(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

TsiScore score_with_norm(const EmbeddingTable& table, std::span<const double> mu, double mu_norm,
                         const TokenList& tokens) {
  TsiScore s;
  double sum = 0.0;
  for (const auto& tok : tokens) {
    const auto idx = table.find(tok);
    if (!idx || table.norm(*idx) == 0.0) {
      ++s.words_skipped;
      continue;
    }
    const auto r = table.row(*idx);
    double dot = 0.0;
    for (std::size_t d = 0; d < r.size(); ++d) dot += mu[d] * static_cast<double>(r[d]);
    sum += std::clamp(dot / (mu_norm * table.norm(*idx)), -1.0, 1.0);
    ++s.words_scored;
  }
  if (s.words_scored > 0) s.value = sum / static_cast<double>(s.words_scored);
  return s;
}

Prediction predict_with_norm(const TsiModel& model, const EmbeddingTable& table, double mu_norm,
                             const TokenList& tokens) {
  Prediction p;
  p.score = score_with_norm(table, model.mu, mu_norm, tokens);
  p.label = (p.score.defined() && p.score.value > model.threshold) ? BinaryLabel::kTR
                                                                   : BinaryLabel::kNT;
  return p;
}

std::vector<Prediction> predict_batch_impl(const TsiModel& model, const EmbeddingTable& table,
                                           std::span<const TokenList> tweets, bool parallel) {
  if (model.mu.size() != table.dimension()) {
    throw std::invalid_argument("predict: model dimension " + std::to_string(model.mu.size()) +
                                " does not match table dimension " +
                                std::to_string(table.dimension()));
  }
  const double mu_norm = l2_norm(model.mu);
  if (mu_norm == 0.0) throw std::invalid_argument("predict: model centroid has zero norm");
  std::vector<Prediction> out(tweets.size());
  const auto n = static_cast<std::int64_t>(tweets.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] = predict_with_norm(model, table, mu_norm, tweets[u]);
  }
  return out;
}

void put_double(std::ofstream& out, const char* key, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << key << ' ' << buf << '\n';
}

}  // namespace

TsiScore tsi_score(const EmbeddingTable& table, std::span<const double> mu, const TokenList& tokens) {
  if (mu.size() != table.dimension()) {
    throw std::invalid_argument("tsi: centroid dimension " + std::to_string(mu.size()) +
                                " does not match table dimension " +
                                std::to_string(table.dimension()));
  }
  const double mu_norm = l2_norm(mu);
  if (mu_norm == 0.0) throw std::invalid_argument("tsi: centroid has zero norm");
  return score_with_norm(table, mu, mu_norm, tokens);
}

TsiModel fit(const EmbeddingTable& table, const KeywordSet& keywords,
             std::span<const LabeledTokens> train, FitReport* report) {
  if (keywords.entries.empty()) throw std::invalid_argument("fit: empty keyword set");
  const auto keyword_tokens = keywords.tokens();
  MeanVector centroid;
  try {
    centroid = mean_vector(table, keyword_tokens);
  } catch (const std::exception&) {
    throw std::runtime_error("fit: all " + std::to_string(keyword_tokens.size()) +
                             " keywords are out of vocabulary for table '" + table.source() + "'");
  }
  if (l2_norm(centroid.values) == 0.0) {
    throw std::runtime_error("fit: keyword centroid has zero norm");
  }

  double nt_sum = 0.0, tr_sum = 0.0;
  std::size_t nt_n = 0, tr_n = 0, nt_undef = 0, tr_undef = 0;
  for (const auto& ex : train) {
    const TsiScore s = tsi_score(table, centroid.values, ex.tokens);
    if (!s.defined()) {
      (ex.label == BinaryLabel::kNT ? nt_undef : tr_undef)++;
      continue;
    }
    if (ex.label == BinaryLabel::kNT) {
      nt_sum += s.value;
      ++nt_n;
    } else {
      tr_sum += s.value;
      ++tr_n;
    }
  }
  if (nt_n == 0 || tr_n == 0) {
    throw std::runtime_error(std::string("fit: no ") + (nt_n == 0 ? "NT" : "TR") +
                             " training tweets with a defined TSI");
  }

  TsiModel model;
  model.keywords = keywords;
  model.mu = std::move(centroid.values);
  model.nt_tsi = nt_sum / static_cast<double>(nt_n);
  model.tr_tsi = tr_sum / static_cast<double>(tr_n);
  model.threshold = 0.5 * (model.nt_tsi + model.tr_tsi);
  model.embedding_source = table.source();
  model.embedding_hash = table.content_hash();
  model.skipped_keywords = centroid.skipped;

  if (report) {
    report->nt_tsi = model.nt_tsi;
    report->tr_tsi = model.tr_tsi;
    report->threshold = model.threshold;
    report->nt_scored = nt_n;
    report->tr_scored = tr_n;
    report->nt_undefined = nt_undef;
    report->tr_undefined = tr_undef;
    report->skipped_keywords = model.skipped_keywords;
  }
  return model;
}

Prediction predict(const TsiModel& model, const EmbeddingTable& table, const TokenList& tokens) {
  if (model.mu.size() != table.dimension()) {
    throw std::invalid_argument("predict: model dimension " + std::to_string(model.mu.size()) +
                                " does not match table dimension " +
                                std::to_string(table.dimension()));
  }
  const double mu_norm = l2_norm(model.mu);
  if (mu_norm == 0.0) throw std::invalid_argument("predict: model centroid has zero norm");
  return predict_with_norm(model, table, mu_norm, tokens);
}

std::vector<Prediction> predict_batch(const TsiModel& model, const EmbeddingTable& table,
                                      std::span<const TokenList> tweets) {
  return predict_batch_impl(model, table, tweets, true);
}

std::vector<Prediction> predict_batch_serial(const TsiModel& model, const EmbeddingTable& table,
                                             std::span<const TokenList> tweets) {
  return predict_batch_impl(model, table, tweets, false);
}

void write_model(const TsiModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  char buf[48];
  out << "tsi-model v1\n";
  out << "dimension " << model.mu.size() << '\n';
  out << "embedding_source " << model.embedding_source << '\n';
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(model.embedding_hash));
  out << "embedding_hash " << buf << '\n';
  out << "skipped_keywords " << model.skipped_keywords << '\n';
  put_double(out, "nt_tsi", model.nt_tsi);
  put_double(out, "tr_tsi", model.tr_tsi);
  put_double(out, "threshold", model.threshold);
  out << "keywords " << model.keywords.entries.size() << '\n';
  for (const auto& e : model.keywords.entries) {
    out << e.token << '\t' << e.count << '\n';
  }
  out << "mu " << model.mu.size() << '\n';
  for (double v : model.mu) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

namespace {

std::string next_line(std::ifstream& in, const std::filesystem::path& path, std::size_t& lineno) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path.string() + ": unexpected end of file at line " +
                             std::to_string(lineno + 1));
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::pair<std::string, std::string> split_field(const std::string& line,
                                                const std::filesystem::path& path,
                                                std::size_t lineno) {
  const auto sp = line.find(' ');
  if (sp == std::string::npos || sp == 0) {
    throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                             ": expected 'key value'");
  }
  return {line.substr(0, sp), line.substr(sp + 1)};
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t lineno) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + s +
                             "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::filesystem::path& path,
                         std::size_t lineno, int base = 10) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + s +
                             "'");
  }
  return v;
}

}  // namespace

TsiModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::size_t lineno = 0;
  if (next_line(in, path, lineno) != "tsi-model v1") {
    throw std::runtime_error(path.string() + ": not a tsi-model v1 file");
  }

  TsiModel model;
  std::size_t dimension = 0;
  bool have_dimension = false;
  std::size_t n_keywords = 0;
  bool have_keywords = false;

  while (true) {
    const std::string line = next_line(in, path, lineno);
    const auto [key, value] = split_field(line, path, lineno);
    if (key == "dimension") {
      dimension = static_cast<std::size_t>(parse_uint(value, path, lineno));
      have_dimension = true;
    } else if (key == "embedding_source") {
      model.embedding_source = value;
    } else if (key == "embedding_hash") {
      model.embedding_hash = parse_uint(value, path, lineno, 16);
    } else if (key == "skipped_keywords") {
      model.skipped_keywords = static_cast<std::size_t>(parse_uint(value, path, lineno));
    } else if (key == "nt_tsi") {
      model.nt_tsi = parse_double(value, path, lineno);
    } else if (key == "tr_tsi") {
      model.tr_tsi = parse_double(value, path, lineno);
    } else if (key == "threshold") {
      model.threshold = parse_double(value, path, lineno);
    } else if (key == "keywords") {
      n_keywords = static_cast<std::size_t>(parse_uint(value, path, lineno));
      have_keywords = true;
      break;
    } else {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": unknown field '" + key + "'");
    }
  }
  if (!have_dimension) throw std::runtime_error(path.string() + ": missing 'dimension' field");
  if (!have_keywords) throw std::runtime_error(path.string() + ": missing 'keywords' section");

  for (std::size_t i = 0; i < n_keywords; ++i) {
    const std::string line = next_line(in, path, lineno);
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected 'token<TAB>count'");
    }
    KeywordEntry e;
    e.token = line.substr(0, tab);
    e.count = parse_uint(line.substr(tab + 1), path, lineno);
    model.keywords.entries.push_back(std::move(e));
  }
  model.keywords.k = model.keywords.entries.size();

  {
    const std::string line = next_line(in, path, lineno);
    const auto [key, value] = split_field(line, path, lineno);
    if (key != "mu") {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected 'mu <count>'");
    }
    const auto n_mu = static_cast<std::size_t>(parse_uint(value, path, lineno));
    if (n_mu != dimension) {
      throw std::runtime_error(path.string() + ": mu has " + std::to_string(n_mu) +
                               " coordinates but dimension is " + std::to_string(dimension));
    }
    model.mu.reserve(n_mu);
    for (std::size_t i = 0; i < n_mu; ++i) {
      model.mu.push_back(parse_double(next_line(in, path, lineno), path, lineno));
    }
  }
  return model;
}

void verify_model_table(const TsiModel& model, const EmbeddingTable& table) {
  if (model.mu.size() != table.dimension()) {
    throw std::runtime_error("model/table mismatch: model dimension " +
                             std::to_string(model.mu.size()) + " vs table dimension " +
                             std::to_string(table.dimension()));
  }
  if (model.embedding_hash != table.content_hash()) {
    throw std::runtime_error(
        "model/table mismatch: the table content hash differs from the one the model was "
        "fitted against (model source: '" +
        model.embedding_source + "', table source: '" + table.source() + "')");
  }
}

}  // namespace tsi
