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

#include "tsi/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tsi {

namespace {

std::runtime_error file_error(const std::filesystem::path& path, const std::string& what) {
  return std::runtime_error(path.string() + ": " + what);
}

// Header line: two ASCII base-10 integers "vocab_size dimension".
void parse_header(const std::filesystem::path& path, const std::string& line,
                  std::size_t& vocab, std::size_t& dim) {
  const char* begin = line.data();
  const char* end = begin + line.size();
  auto r1 = std::from_chars(begin, end, vocab);
  if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ' ')
    throw file_error(path, "malformed header '" + line + "'");
  auto r2 = std::from_chars(r1.ptr + 1, end, dim);
  if (r2.ec != std::errc{} || r2.ptr != end)
    throw file_error(path, "malformed header '" + line + "'");
  if (dim == 0) throw file_error(path, "malformed header: dimension must be positive");
}

template <typename A, typename B>
double cosine_impl(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero-norm operand");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

constexpr double kExcluded = -4.0;  // sentinel below any valid cosine

NeighborList nearest_impl(const EmbeddingTable& table, std::string_view query, std::size_t n,
                          bool stem_filter, bool parallel) {
  const auto qi = table.find(query);
  if (!qi) throw std::invalid_argument("nearest: token not in vocabulary: " + std::string(query));
  const auto q = table.row(*qi);
  const double qnorm = table.norm(*qi);
  if (qnorm == 0.0) throw std::invalid_argument("nearest: query vector has zero norm");

  const std::int64_t vocab = static_cast<std::int64_t>(table.size());
  std::vector<double> scores(static_cast<std::size_t>(vocab), kExcluded);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < vocab; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (u == *qi) continue;
    if (stem_filter && shares_stem(query, table.token(u))) continue;
    const double rnorm = table.norm(u);
    if (rnorm == 0.0) continue;
    const auto r = table.row(u);
    double dot = 0.0;
    for (std::size_t d = 0; d < q.size(); ++d) {
      dot += static_cast<double>(q[d]) * static_cast<double>(r[d]);
    }
    scores[u] = std::clamp(dot / (qnorm * rnorm), -1.0, 1.0);
  }

  std::vector<std::size_t> candidates;
  candidates.reserve(static_cast<std::size_t>(vocab));
  for (std::size_t i = 0; i < static_cast<std::size_t>(vocab); ++i) {
    if (scores[i] != kExcluded) candidates.push_back(i);
  }
  const std::size_t take = std::min(n, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return table.token(a) < table.token(b);
                    });
  NeighborList out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back(Neighbor{table.token(candidates[i]), scores[candidates[i]]});
  }
  return out;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension, std::string source)
    : dim_(dimension), source_(std::move(source)) {
  if (dim_ == 0) throw std::invalid_argument("EmbeddingTable: dimension must be positive");
  const std::uint64_t d = dim_;
  hash_.update(&d, sizeof(d));
}

void EmbeddingTable::reserve(std::size_t vocab) {
  tokens_.reserve(vocab);
  data_.reserve(vocab * dim_);
  norms_.reserve(vocab);
  index_.reserve(vocab);
}

void EmbeddingTable::add(std::string token, std::span<const float> values) {
  if (values.size() != dim_) {
    throw std::invalid_argument("EmbeddingTable::add: vector for '" + token + "' has " +
                                std::to_string(values.size()) + " coordinates, expected " +
                                std::to_string(dim_));
  }
  if (token.empty()) throw std::invalid_argument("EmbeddingTable::add: empty token");
  if (contains(token)) {
    throw std::invalid_argument("EmbeddingTable::add: duplicate token '" + token + "'");
  }
  double sq = 0.0;
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("EmbeddingTable::add: non-finite coordinate for '" + token + "'");
    }
    sq += static_cast<double>(v) * static_cast<double>(v);
  }
  hash_.update(token);
  hash_.update("\0", 1);
  hash_.update(values.data(), values.size() * sizeof(float));
  index_.emplace(token, tokens_.size());
  data_.insert(data_.end(), values.begin(), values.end());
  norms_.push_back(std::sqrt(sq));
  tokens_.push_back(std::move(token));
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> EmbeddingTable::row(std::size_t index) const {
  return std::span<const float>(data_.data() + index * dim_, dim_);
}

std::optional<std::span<const float>> EmbeddingTable::vector(std::string_view token) const {
  const auto idx = find(token);
  if (!idx) return std::nullopt;
  return row(*idx);
}

EmbeddingTable load_binary_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw file_error(path, "cannot open file");
  std::string header;
  if (!std::getline(in, header)) throw file_error(path, "missing header line");
  std::size_t vocab = 0, dim = 0;
  parse_header(path, header, vocab, dim);

  EmbeddingTable table(dim, path.string());
  table.reserve(vocab);
  std::vector<float> buf(dim);
  for (std::size_t i = 0; i < vocab; ++i) {
    int c = in.get();
    while (c == '\n') c = in.get();  // optional record separator
    std::string word;
    while (c != std::ifstream::traits_type::eof() && c != ' ') {
      word.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == std::ifstream::traits_type::eof()) {
      throw file_error(path, "unexpected end of file: got " + std::to_string(i) + " of " +
                                 std::to_string(vocab) + " records (vocab_size mismatch)");
    }
    if (word.empty()) throw file_error(path, "empty token in record " + std::to_string(i + 1));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != dim * sizeof(float)) {
      throw file_error(path, "truncated record " + std::to_string(i + 1) + " ('" + word + "'): " +
                                 std::to_string(in.gcount() / sizeof(float)) + " of " +
                                 std::to_string(dim) + " floats");
    }
    if (table.contains(word)) {
      throw file_error(path, "duplicate token '" + word + "' at record " + std::to_string(i + 1));
    }
    table.add(std::move(word), buf);
  }
  int c = in.get();
  while (c == '\n') c = in.get();
  if (c != std::ifstream::traits_type::eof()) {
    throw file_error(path, "trailing data after " + std::to_string(vocab) +
                               " records (vocab_size mismatch)");
  }
  return table;
}

EmbeddingTable load_text_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw file_error(path, "cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw file_error(path, "missing header line");
  std::size_t vocab = 0, dim = 0;
  parse_header(path, line, vocab, dim);

  EmbeddingTable table(dim, path.string());
  table.reserve(vocab);
  std::vector<float> buf(dim);
  for (std::size_t i = 0; i < vocab; ++i) {
    if (!std::getline(in, line)) {
      throw file_error(path, "unexpected end of file: got " + std::to_string(i) + " of " +
                                 std::to_string(vocab) + " records (vocab_size mismatch)");
    }
    const std::string where = "line " + std::to_string(i + 2);
    std::size_t pos = 0;
    std::vector<std::string_view> fields;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t start = pos;
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
      fields.push_back(std::string_view(line).substr(start, pos - start));
    }
    if (fields.size() != dim + 1) {
      throw file_error(path, where + ": expected " + std::to_string(dim + 1) + " fields, got " +
                                 std::to_string(fields.size()));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      const auto f = fields[d + 1];
      auto r = std::from_chars(f.data(), f.data() + f.size(), buf[d]);
      if (r.ec != std::errc{} || r.ptr != f.data() + f.size()) {
        throw file_error(path, where + ": bad coordinate '" + std::string(f) + "'");
      }
    }
    std::string word(fields[0]);
    if (table.contains(word)) {
      throw file_error(path, where + ": duplicate token '" + word + "'");
    }
    table.add(std::move(word), buf);
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
      throw file_error(path, "trailing data after " + std::to_string(vocab) +
                                 " records (vocab_size mismatch)");
    }
  }
  return table;
}

void write_binary_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw file_error(path, "cannot open file for writing");
  out << table.size() << ' ' << table.dimension() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto r = table.row(i);
    out << table.token(i) << ' ';
    out.write(reinterpret_cast<const char*>(r.data()),
              static_cast<std::streamsize>(r.size() * sizeof(float)));
    out.put('\n');
  }
  if (!out) throw file_error(path, "write failed");
}

void write_text_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw file_error(path, "cannot open file for writing");
  out << table.size() << ' ' << table.dimension() << '\n';
  char num[48];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.token(i);
    for (float v : table.row(i)) {
      // 9 significant digits round-trip a float32 exactly.
      std::snprintf(num, sizeof(num), "%.9g", static_cast<double>(v));
      out << ' ' << num;
    }
    out << '\n';
  }
  if (!out) throw file_error(path, "write failed");
}

double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

MeanVector mean_vector(const EmbeddingTable& table, std::span<const std::string> tokens) {
  MeanVector result;
  result.values.assign(table.dimension(), 0.0);
  for (const auto& tok : tokens) {
    const auto idx = table.find(tok);
    if (!idx) {
      ++result.skipped;
      continue;
    }
    const auto r = table.row(*idx);
    for (std::size_t d = 0; d < r.size(); ++d) result.values[d] += static_cast<double>(r[d]);
    ++result.used;
  }
  if (result.used == 0) {
    throw std::runtime_error("mean_vector: all " + std::to_string(tokens.size()) +
                             " tokens are out of vocabulary");
  }
  for (double& v : result.values) v /= static_cast<double>(result.used);
  return result;
}

bool shares_stem(std::string_view a, std::string_view b) {
  if (a == b) return true;
  const std::string_view shorter = a.size() <= b.size() ? a : b;
  const std::string_view longer = a.size() <= b.size() ? b : a;
  if (longer.size() - shorter.size() <= 3 && longer.substr(0, shorter.size()) == shorter) {
    return true;
  }
  const std::size_t min_len = shorter.size();
  const std::size_t need = std::max<std::size_t>(4, min_len > 3 ? min_len - 3 : 1);
  return min_len >= need && a.substr(0, need) == b.substr(0, need);
}

NeighborList nearest(const EmbeddingTable& table, std::string_view query, std::size_t n,
                     bool stem_filter) {
  return nearest_impl(table, query, n, stem_filter, true);
}

NeighborList nearest_serial(const EmbeddingTable& table, std::string_view query, std::size_t n,
                            bool stem_filter) {
  return nearest_impl(table, query, n, stem_filter, false);
}

}  // namespace tsi
