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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsi/util.hpp"

namespace tsi {

using WordVector = std::vector<float>;

struct Neighbor {
  std::string token;
  double score;
};
using NeighborList = std::vector<Neighbor>;

// Immutable in-memory word-vector table. Rows are stored contiguously as
// float32 exactly as loaded (never pre-normalized, so file round-trips stay
// exact); L2 norms are cached on insert. Lookup of an absent token yields
// an empty optional, never a default vector. Safe to share across threads
// once loading is done.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dimension, std::string source);

  void reserve(std::size_t vocab);
  // Appends one row. Throws on dimension mismatch, duplicate or empty token,
  // and non-finite coordinates.
  void add(std::string token, std::span<const float> values);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  const std::string& source() const { return source_; }
  // Content fingerprint over dimension, tokens, and raw coordinate bytes.
  // Independent of the source path, so a binary table and its text conversion
  // hash identically as long as the coordinates survived exactly.
  std::uint64_t content_hash() const { return hash_.digest(); }

  std::optional<std::size_t> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  std::span<const float> row(std::size_t index) const;
  double norm(std::size_t index) const { return norms_[index]; }
  std::optional<std::span<const float>> vector(std::string_view token) const;

 private:
  std::size_t dim_;
  std::string source_;
  std::vector<std::string> tokens_;
  std::vector<float> data_;
  std::vector<double> norms_;
  StringMap<std::size_t> index_;
  Fnv1a hash_;
};

// word2vec file formats. Header line "vocab_size dimension\n"; binary records
// are "token 0x20 dim*float32_le [0x0a]", text records are one line per token
// with space-separated decimal coordinates.
EmbeddingTable load_binary_embeddings(const std::filesystem::path& path);
EmbeddingTable load_text_embeddings(const std::filesystem::path& path);
void write_binary_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
void write_text_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

// Cosine similarity, accumulated in double, clamped to [-1, 1]. Throws on
// dimension mismatch or a zero-norm operand.
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const double> b);

struct MeanVector {
  std::vector<double> values;
  std::size_t used = 0;     // in-vocabulary tokens averaged
  std::size_t skipped = 0;  // out-of-vocabulary tokens
};

// Arithmetic mean over the vectors of the in-vocabulary tokens. Skipped
// tokens are counted, not zero-filled. Throws when every token is missing.
MeanVector mean_vector(const EmbeddingTable& table, std::span<const std::string> tokens);

// True when one token is a prefix of the other with at most 3 extra
// characters, or both share their first max(4, min_len - 3) characters.
bool shares_stem(std::string_view a, std::string_view b);

// Top-n tokens by cosine similarity to the query's vector, score descending
// (ties by token). The query itself is excluded; with stem_filter, tokens
// sharing a stem with the query are excluded before ranking. The parallel
// version and the serial reference produce identical results.
NeighborList nearest(const EmbeddingTable& table, std::string_view query, std::size_t n,
                     bool stem_filter = false);
NeighborList nearest_serial(const EmbeddingTable& table, std::string_view query, std::size_t n,
                            bool stem_filter = false);

}  // namespace tsi
