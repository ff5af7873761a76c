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

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsi/cbow.hpp"
#include "tsi/classifier.hpp"
#include "tsi/corpus.hpp"
#include "tsi/embedding.hpp"
#include "tsi/eval.hpp"
#include "tsi/keywords.hpp"
#include "tsi/preprocess.hpp"

namespace {

using nlohmann::json;
using namespace tsi;

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct PreprocessOpts {
  std::string stopwords_path;
  std::string patterns_path;
};

void add_preprocess_opts(CLI::App* cmd, PreprocessOpts& opts) {
  cmd->add_option("--stopwords", opts.stopwords_path,
                  "Stopword list file (one token per line, '#' comments); built-in list when "
                  "omitted");
  cmd->add_option("--highway-patterns", opts.patterns_path,
                  "Highway pattern file (one regex per line); built-in patterns when omitted");
}

Preprocessor make_preprocessor(const PreprocessOpts& opts) {
  StringSet stopwords =
      opts.stopwords_path.empty() ? default_stopwords() : load_token_set(opts.stopwords_path);
  HighwayRewriter rewriter = opts.patterns_path.empty()
                                 ? HighwayRewriter()
                                 : HighwayRewriter(load_pattern_file(opts.patterns_path));
  return Preprocessor(std::move(stopwords), std::move(rewriter));
}

struct EmbeddingOpts {
  std::string path;
  std::string format = "text";
};

void add_embedding_opts(CLI::App* cmd, EmbeddingOpts& opts) {
  cmd->add_option("--embedding", opts.path, "Word-vector table file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--embedding-format", opts.format, "Table file format")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
}

EmbeddingTable load_table(const EmbeddingOpts& opts) {
  return opts.format == "binary" ? load_binary_embeddings(opts.path)
                                 : load_text_embeddings(opts.path);
}

std::vector<std::string> read_token_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

void write_token_lines(const std::vector<std::string>& tokens,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  for (const auto& t : tokens) out << t << '\n';
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOpts {
  SynthSpec spec;
  std::string output;
  std::string traffic_pool_in, background_pool_in;
  std::string traffic_pool_out, background_pool_out;
  bool json = false;
};

void run_generate(const GenerateOpts& opts) {
  SynthSpec spec = opts.spec;
  if (!opts.traffic_pool_in.empty()) spec.traffic_pool = read_token_lines(opts.traffic_pool_in);
  if (!opts.background_pool_in.empty()) {
    spec.background_pool = read_token_lines(opts.background_pool_in);
  }
  const SynthCorpus corpus = generate_corpus(spec);
  write_jsonl(corpus.tweets, opts.output);
  if (!opts.traffic_pool_out.empty()) {
    write_token_lines(corpus.traffic_pool, opts.traffic_pool_out);
  }
  if (!opts.background_pool_out.empty()) {
    write_token_lines(corpus.background_pool, opts.background_pool_out);
  }
  std::size_t nt = 0, ti = 0, tci = 0;
  for (const auto& t : corpus.tweets) {
    if (t.label == Label3::kNT) {
      ++nt;
    } else if (t.label == Label3::kTI) {
      ++ti;
    } else {
      ++tci;
    }
  }
  if (opts.json) {
    json j{{"tweets", corpus.tweets.size()}, {"nt", nt},
           {"ti", ti},                       {"tci", tci},
           {"shared_token", corpus.shared_token}, {"output", opts.output}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "wrote " << corpus.tweets.size() << " tweets to " << opts.output << " (NT " << nt
              << ", TI " << ti << ", TCI " << tci << "; shared token '" << corpus.shared_token
              << "')\n";
  }
}

// ---------------------------------------------------------------------------
// split

struct SplitOpts {
  std::string input, train_output, test_output;
  SplitSpec spec;
  bool json = false;
};

void run_split(const SplitOpts& opts) {
  const auto corpus = read_jsonl(opts.input);
  const auto result = split(corpus, opts.spec);
  write_jsonl(result.train, opts.train_output);
  write_jsonl(result.test, opts.test_output);
  if (opts.json) {
    json j{{"input", corpus.size()},
           {"train", result.train.size()},
           {"test", result.test.size()}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "split " << corpus.size() << " tweets into " << result.train.size()
              << " train / " << result.test.size() << " test\n";
  }
}

// ---------------------------------------------------------------------------
// keywords

struct KeywordsOpts {
  std::string input, output, blocklist;
  std::size_t k = 10;
  std::string count_mode = "multiplicity";
  PreprocessOpts pre;
  bool json = false;
};

void run_keywords(const KeywordsOpts& opts) {
  const auto corpus = read_jsonl(opts.input);
  const Preprocessor pre = make_preprocessor(opts.pre);
  std::vector<TokenList> tr_tweets;
  for (const auto& t : corpus) {
    if (binarize(t.label) == BinaryLabel::kTR) tr_tweets.push_back(pre.normalize(t.raw));
  }
  if (tr_tweets.empty()) {
    throw std::runtime_error(opts.input + ": no TR-labeled tweets to extract keywords from");
  }
  const CountMode mode = opts.count_mode == "per-tweet" ? CountMode::kDistinctPerTweet
                                                        : CountMode::kMultiplicity;
  KeywordSet set = extract(tr_tweets, opts.k, mode);
  if (!opts.blocklist.empty()) set = curate(set, load_token_set(opts.blocklist));
  write_keywords(set, opts.output);
  if (set.short_of_k) {
    std::cerr << "warning: only " << set.entries.size() << " distinct tokens for k=" << opts.k
              << "\n";
  }
  if (opts.json) {
    json j{{"tr_tweets", tr_tweets.size()},
           {"keywords", set.entries.size()},
           {"short_of_k", set.short_of_k},
           {"output", opts.output}};
    auto arr = json::array();
    for (const auto& e : set.entries) arr.push_back({{"token", e.token}, {"count", e.count}});
    j["entries"] = arr;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "extracted " << set.entries.size() << " keywords from " << tr_tweets.size()
              << " TR tweets into " << opts.output << "\n";
  }
}

// ---------------------------------------------------------------------------
// cbow-train

struct CbowOpts {
  std::string input, output;
  std::string output_format = "text";
  CbowConfig config;
  PreprocessOpts pre;
  bool json = false;
};

void run_cbow_train(const CbowOpts& opts) {
  const Preprocessor pre = make_preprocessor(opts.pre);
  std::ifstream in(opts.input);
  if (!in) throw std::runtime_error(opts.input + ": cannot open file");
  std::vector<TokenList> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      corpus.push_back(pre.normalize(parse_tweet_json(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(opts.input + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  TrainStats stats;
  const CbowModel model = train_cbow(corpus, opts.config, &stats);
  const EmbeddingTable table = model.to_embedding_table();
  if (opts.output_format == "binary") {
    write_binary_embeddings(table, opts.output);
  } else {
    write_text_embeddings(table, opts.output);
  }
  if (opts.json) {
    json j{{"tweets", corpus.size()},
           {"vocab", stats.vocab_size},
           {"pairs_per_epoch", stats.pairs_per_epoch},
           {"epoch_loss", stats.epoch_loss},
           {"output", opts.output}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "trained " << stats.vocab_size << "-word " << opts.config.dimension
              << "-dimensional table on " << corpus.size() << " tweets ("
              << stats.pairs_per_epoch << " pairs/epoch) into " << opts.output << "\n";
    for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e) {
      std::cout << "  epoch " << e + 1 << " mean loss " << stats.epoch_loss[e] << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// fit

struct FitOpts {
  EmbeddingOpts embedding;
  std::string keywords_path, train_path, output;
  PreprocessOpts pre;
  bool json = false;
};

void run_fit(const FitOpts& opts) {
  const EmbeddingTable table = load_table(opts.embedding);
  const KeywordSet keywords = read_keywords(opts.keywords_path);
  const Preprocessor pre = make_preprocessor(opts.pre);
  const auto train = tokenize_corpus(read_jsonl(opts.train_path), pre);
  FitReport report;
  const TsiModel model = fit(table, keywords, train, &report);
  write_model(model, opts.output);
  if (opts.json) {
    json j{{"nt_tsi", report.nt_tsi},
           {"tr_tsi", report.tr_tsi},
           {"threshold", report.threshold},
           {"nt_scored", report.nt_scored},
           {"tr_scored", report.tr_scored},
           {"nt_undefined", report.nt_undefined},
           {"tr_undefined", report.tr_undefined},
           {"skipped_keywords", report.skipped_keywords},
           {"output", opts.output}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "NT_TSI " << format_double(report.nt_tsi) << " over " << report.nt_scored
              << " tweets (" << report.nt_undefined << " undefined)\n";
    std::cout << "TR_TSI " << format_double(report.tr_tsi) << " over " << report.tr_scored
              << " tweets (" << report.tr_undefined << " undefined)\n";
    std::cout << "threshold " << format_double(report.threshold) << "\n";
    std::cout << "skipped keywords " << report.skipped_keywords << "\n";
    std::cout << "model written to " << opts.output << "\n";
  }
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyOpts {
  EmbeddingOpts embedding;
  std::string model_path;
  std::string input = "-";
  std::string output;
  std::size_t batch_size = 1024;
  int threads = 0;
  PreprocessOpts pre;
  bool json = false;
};

void emit_predictions(std::ostream& out, const std::vector<RawTweet>& tweets,
                      const std::vector<Prediction>& preds, bool as_json) {
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const auto& p = preds[i];
    if (as_json) {
      json j;
      j["id"] = tweets[i].id;
      j["label"] = std::string(to_string(p.label));
      if (p.score.defined()) {
        j["tsi"] = p.score.value;
      } else {
        j["tsi"] = nullptr;
      }
      j["words_scored"] = p.score.words_scored;
      j["words_skipped"] = p.score.words_skipped;
      out << j.dump() << '\n';
    } else {
      out << tweets[i].id << '\t' << to_string(p.label) << '\t'
          << (p.score.defined() ? format_double(p.score.value) : "undefined") << '\t'
          << p.score.words_scored << '\t' << p.score.words_skipped << '\n';
    }
  }
}

int run_classify(const ClassifyOpts& opts) {
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
  const EmbeddingTable table = load_table(opts.embedding);
  const TsiModel model = read_model(opts.model_path);
  verify_model_table(model, table);
  const Preprocessor pre = make_preprocessor(opts.pre);

  std::ifstream file;
  if (opts.input != "-") {
    file.open(opts.input);
    if (!file) throw std::runtime_error(opts.input + ": cannot open file");
  }
  std::istream& in = opts.input == "-" ? std::cin : file;
  std::ofstream out_file;
  if (!opts.output.empty()) {
    out_file.open(opts.output);
    if (!out_file) throw std::runtime_error(opts.output + ": cannot open file for writing");
  }
  std::ostream& out = opts.output.empty() ? std::cout : out_file;

  const auto started = std::chrono::steady_clock::now();
  std::vector<RawTweet> tweets;
  std::vector<TokenList> batch;
  std::size_t emitted = 0, malformed = 0, lineno = 0;
  auto flush = [&] {
    if (tweets.empty()) return;
    const auto preds = predict_batch(model, table, batch);
    emit_predictions(out, tweets, preds, opts.json);
    emitted += tweets.size();
    tweets.clear();
    batch.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      tweets.push_back(parse_tweet_json(line));
    } catch (const std::exception& e) {
      std::cerr << "warning: line " << lineno << " skipped: " << e.what() << "\n";
      ++malformed;
      continue;
    }
    batch.push_back(pre.normalize(tweets.back()));
    if (tweets.size() >= opts.batch_size) flush();
  }
  flush();
  out.flush();
  if (!out) throw std::runtime_error("write failed");

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::cerr << "classified " << emitted << " tweets in " << seconds << "s ("
            << (seconds > 0 ? static_cast<double>(emitted) / seconds : 0.0) << " tweets/s), "
            << malformed << " malformed lines skipped\n";
  return malformed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string predictions_path, truth_path;
  bool json = false;
};

StringMap<BinaryLabel> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  StringMap<BinaryLabel> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(lineno);
    try {
      std::string id, label;
      if (line[0] == '{') {
        const json j = json::parse(line);
        id = j.at("id").get<std::string>();
        label = j.at("label").get<std::string>();
      } else {
        const auto tab1 = line.find('\t');
        if (tab1 == std::string::npos) throw std::runtime_error("expected TSV or JSON record");
        auto tab2 = line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) tab2 = line.size();
        id = line.substr(0, tab1);
        label = line.substr(tab1 + 1, tab2 - tab1 - 1);
      }
      if (!out.emplace(id, parse_binary_label(label)).second) {
        throw std::runtime_error("duplicate id '" + id + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return out;
}

void run_eval(const EvalOpts& opts) {
  const auto predictions = read_predictions(opts.predictions_path);
  const auto truth = read_jsonl(opts.truth_path);
  if (predictions.size() != truth.size()) {
    throw std::runtime_error("prediction/truth size mismatch: " +
                             std::to_string(predictions.size()) + " vs " +
                             std::to_string(truth.size()));
  }
  std::vector<BinaryLabel> preds, truths;
  preds.reserve(truth.size());
  truths.reserve(truth.size());
  for (const auto& t : truth) {
    const auto it = predictions.find(t.raw.id);
    if (it == predictions.end()) {
      throw std::runtime_error("no prediction for id '" + t.raw.id + "'");
    }
    preds.push_back(it->second);
    truths.push_back(binarize(t.label));
  }
  const EvalReport report = score(preds, truths);
  std::cout << (opts.json ? report.to_json() + "\n" : report.to_text());
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts {
  EmbeddingOpts embedding;
  std::string keywords_path, train_path, test_path, csv_path;
  std::vector<std::size_t> ks;
  PreprocessOpts pre;
  bool json = false;
};

void run_sweep(const SweepOpts& opts) {
  const EmbeddingTable table = load_table(opts.embedding);
  const KeywordSet ranking = read_keywords(opts.keywords_path);
  const Preprocessor pre = make_preprocessor(opts.pre);
  const auto train = tokenize_corpus(read_jsonl(opts.train_path), pre);
  const auto test = tokenize_corpus(read_jsonl(opts.test_path), pre);
  const SweepReport report = sweep_keywords(table, ranking, train, test, opts.ks);
  if (!opts.csv_path.empty()) {
    std::ofstream csv(opts.csv_path);
    if (!csv) throw std::runtime_error(opts.csv_path + ": cannot open file for writing");
    csv << report.to_csv();
  }
  if (opts.json) {
    std::cout << report.to_json() << "\n";
  } else {
    for (const auto& p : report.points) {
      std::cout << "k=" << p.k << " accuracy=" << p.accuracy << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// robustness

struct RobustnessOpts {
  EmbeddingOpts embedding;
  std::string train_path, test_path;
  RobustnessConfig config;
  PreprocessOpts pre;
  bool json = false;
};

void run_robustness(const RobustnessOpts& opts) {
  const EmbeddingTable table = load_table(opts.embedding);
  const Preprocessor pre = make_preprocessor(opts.pre);
  const auto train = tokenize_corpus(read_jsonl(opts.train_path), pre);
  const auto test = tokenize_corpus(read_jsonl(opts.test_path), pre);
  const RobustnessReport report = robustness(table, train, test, opts.config);
  if (opts.json) {
    std::cout << report.to_json() << "\n";
  } else {
    for (const auto& r : report.runs) {
      std::cout << "run " << r.run << " accuracy " << r.accuracy << " threshold " << r.threshold
                << "\n";
    }
    std::cout << "accuracy range " << report.max_accuracy - report.min_accuracy << " (min "
              << report.min_accuracy << ", max " << report.max_accuracy << ")\n";
    if (report.sampled_with_replacement) {
      std::cout << "note: samples re-drawn per run (pool too small for disjoint runs)\n";
    }
  }
}

// ---------------------------------------------------------------------------
// neighbors

struct NeighborsOpts {
  EmbeddingOpts embedding;
  std::string token;
  std::size_t n = 10;
  bool stem_filter = false;
  bool json = false;
};

void run_neighbors(const NeighborsOpts& opts) {
  const EmbeddingTable table = load_table(opts.embedding);
  const NeighborList list = nearest(table, opts.token, opts.n, opts.stem_filter);
  if (opts.json) {
    auto arr = json::array();
    for (const auto& nb : list) arr.push_back({{"token", nb.token}, {"score", nb.score}});
    std::cout << json{{"query", opts.token}, {"neighbors", arr}}.dump() << "\n";
  } else {
    for (const auto& nb : list) std::cout << nb.token << '\t' << nb.score << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsi: traffic-tweet classification via word-vector similarity"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML-like config file; flags override it");

  std::uint64_t noop_seed = 0;  // deterministic commands accept --seed for uniformity

  auto gen = std::make_shared<GenerateOpts>();
  {
    auto* cmd = app.add_subcommand("generate", "Generate a synthetic labeled corpus");
    cmd->add_option("--output", gen->output, "Corpus JSONL path")->required();
    cmd->add_option("--n", gen->spec.n_tweets, "Number of tweets")->capture_default_str();
    cmd->add_option("--tr-fraction", gen->spec.tr_fraction, "Share of TR tweets")
        ->capture_default_str();
    cmd->add_option("--ti-fraction", gen->spec.ti_fraction, "Share of TR tweets labeled TI")
        ->capture_default_str();
    cmd->add_option("--pool-size", gen->spec.pool_size, "Tokens per pool")->capture_default_str();
    cmd->add_option("--noise", gen->spec.noise_rate, "Crossover noise rate")
        ->capture_default_str();
    cmd->add_option("--min-len", gen->spec.min_len, "Minimum tweet length")->capture_default_str();
    cmd->add_option("--max-len", gen->spec.max_len, "Maximum tweet length")->capture_default_str();
    cmd->add_option("--seed", gen->spec.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--id-prefix", gen->spec.id_prefix, "Tweet id prefix")->capture_default_str();
    cmd->add_option("--traffic-pool", gen->traffic_pool_in, "Traffic vocabulary file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--background-pool", gen->background_pool_in, "Background vocabulary file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--traffic-pool-output", gen->traffic_pool_out,
                    "Write the traffic pool here");
    cmd->add_option("--background-pool-output", gen->background_pool_out,
                    "Write the background pool here");
    cmd->add_flag("--json", gen->json, "Machine-readable summary");
    cmd->callback([gen] { run_generate(*gen); });
  }

  auto spl = std::make_shared<SplitOpts>();
  {
    auto* cmd = app.add_subcommand("split", "Stratified train/test split of a labeled corpus");
    cmd->add_option("--input", spl->input, "Corpus JSONL path")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--train-output", spl->train_output, "Train JSONL path")->required();
    cmd->add_option("--test-output", spl->test_output, "Test JSONL path")->required();
    cmd->add_option("--fraction", spl->spec.train_fraction, "Train fraction")
        ->capture_default_str();
    cmd->add_option("--seed", spl->spec.seed, "RNG seed")->capture_default_str();
    cmd->add_flag("!--no-stratify", spl->spec.stratified, "Disable per-class stratification");
    cmd->add_flag("--json", spl->json, "Machine-readable summary");
    cmd->callback([spl] { run_split(*spl); });
  }

  auto kw = std::make_shared<KeywordsOpts>();
  {
    auto* cmd =
        app.add_subcommand("keywords", "Extract the top-k keyword dictionary from TR tweets");
    cmd->add_option("--input", kw->input, "Labeled corpus JSONL path")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--output", kw->output, "Keyword file path (token<TAB>count)")->required();
    cmd->add_option("--k", kw->k, "Number of keywords")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--blocklist", kw->blocklist, "Tokens to drop after ranking")
        ->check(CLI::ExistingFile);
    cmd->add_option("--count-mode", kw->count_mode, "Occurrence counting mode")
        ->check(CLI::IsMember({"multiplicity", "per-tweet"}))
        ->capture_default_str();
    add_preprocess_opts(cmd, kw->pre);
    cmd->add_option("--seed", noop_seed, "Accepted for uniformity; command is deterministic");
    cmd->add_flag("--json", kw->json, "Machine-readable summary");
    cmd->callback([kw] { run_keywords(*kw); });
  }

  auto cb = std::make_shared<CbowOpts>();
  {
    auto* cmd = app.add_subcommand("cbow-train", "Train a toy CBOW embedding table");
    cmd->add_option("--input", cb->input, "Tweet JSONL path (labels optional)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--output", cb->output, "Embedding table output path")->required();
    cmd->add_option("--output-format", cb->output_format, "Table format")
        ->check(CLI::IsMember({"text", "binary"}))
        ->capture_default_str();
    cmd->add_option("--dim", cb->config.dimension, "Vector dimension")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--window", cb->config.window, "Context window")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--epochs", cb->config.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--lr", cb->config.learning_rate, "Learning rate")->capture_default_str();
    cmd->add_option("--min-count", cb->config.min_count, "Vocabulary frequency floor")
        ->capture_default_str();
    cmd->add_option("--seed", cb->config.seed, "RNG seed")->capture_default_str();
    add_preprocess_opts(cmd, cb->pre);
    cmd->add_flag("--json", cb->json, "Machine-readable summary");
    cmd->callback([cb] { run_cbow_train(*cb); });
  }

  auto ft = std::make_shared<FitOpts>();
  {
    auto* cmd = app.add_subcommand("fit", "Fit the centroid and threshold on labeled tweets");
    add_embedding_opts(cmd, ft->embedding);
    cmd->add_option("--keywords", ft->keywords_path, "Keyword file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--train", ft->train_path, "Training corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--output", ft->output, "Model file path")->required();
    add_preprocess_opts(cmd, ft->pre);
    cmd->add_option("--seed", noop_seed, "Accepted for uniformity; command is deterministic");
    cmd->add_flag("--json", ft->json, "Machine-readable fit report");
    cmd->callback([ft] { run_fit(*ft); });
  }

  auto cl = std::make_shared<ClassifyOpts>();
  auto classify_exit = std::make_shared<int>(0);
  {
    auto* cmd = app.add_subcommand("classify", "Label tweets from a file or standard input");
    cmd->add_option("--model", cl->model_path, "Model file")
        ->required()
        ->check(CLI::ExistingFile);
    add_embedding_opts(cmd, cl->embedding);
    cmd->add_option("--input", cl->input, "Tweet JSONL path, or '-' for standard input")
        ->capture_default_str();
    cmd->add_option("--output", cl->output, "Output path (standard output when omitted)");
    cmd->add_option("--batch-size", cl->batch_size, "Scoring batch size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--threads", cl->threads, "OpenMP threads (0 = library default)")
        ->capture_default_str();
    add_preprocess_opts(cmd, cl->pre);
    cmd->add_option("--seed", noop_seed, "Accepted for uniformity; command is deterministic");
    cmd->add_flag("--json", cl->json, "Emit JSONL records instead of TSV");
    cmd->callback([cl, classify_exit] { *classify_exit = run_classify(*cl); });
  }

  auto ev = std::make_shared<EvalOpts>();
  {
    auto* cmd = app.add_subcommand("eval", "Score predictions against a labeled corpus");
    cmd->add_option("--predictions", ev->predictions_path,
                    "classify output (TSV or JSONL records)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--truth", ev->truth_path, "Labeled corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", noop_seed, "Accepted for uniformity; command is deterministic");
    cmd->add_flag("--json", ev->json, "Machine-readable report");
    cmd->callback([ev] { run_eval(*ev); });
  }

  auto sw = std::make_shared<SweepOpts>();
  {
    auto* cmd = app.add_subcommand("sweep", "Test accuracy for a range of keyword counts");
    add_embedding_opts(cmd, sw->embedding);
    cmd->add_option("--keywords", sw->keywords_path, "Keyword ranking file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--train", sw->train_path, "Training corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--test", sw->test_path, "Test corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--ks", sw->ks, "Keyword counts (strictly increasing)")
        ->required()
        ->delimiter(',');
    cmd->add_option("--csv", sw->csv_path, "Write plot-ready CSV here");
    add_preprocess_opts(cmd, sw->pre);
    cmd->add_option("--seed", noop_seed, "Accepted for uniformity; command is deterministic");
    cmd->add_flag("--json", sw->json, "Machine-readable report");
    cmd->callback([sw] { run_sweep(*sw); });
  }

  auto rb = std::make_shared<RobustnessOpts>();
  {
    auto* cmd =
        app.add_subcommand("robustness", "Test accuracy across disjoint-sample training runs");
    add_embedding_opts(cmd, rb->embedding);
    cmd->add_option("--train", rb->train_path, "Training corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--test", rb->test_path, "Test corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--runs", rb->config.runs, "Training runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--sample-size", rb->config.sample_size,
                    "Tweets per keyword/threshold sample")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--k", rb->config.k, "Keywords per run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", rb->config.seed, "RNG seed")->capture_default_str();
    cmd->add_flag("--allow-replacement", rb->config.allow_replacement,
                  "Re-sample per run when the pool is too small for disjoint runs");
    add_preprocess_opts(cmd, rb->pre);
    cmd->add_flag("--json", rb->json, "Machine-readable report");
    cmd->callback([rb] { run_robustness(*rb); });
  }

  auto nb = std::make_shared<NeighborsOpts>();
  {
    auto* cmd = app.add_subcommand("neighbors", "Nearest tokens by cosine similarity");
    add_embedding_opts(cmd, nb->embedding);
    cmd->add_option("--token", nb->token, "Query token")->required();
    cmd->add_option("--n", nb->n, "Neighbors to return")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--stem-filter", nb->stem_filter,
                  "Drop candidates sharing a stem with the query");
    cmd->add_option("--seed", noop_seed, "Accepted for uniformity; command is deterministic");
    cmd->add_flag("--json", nb->json, "Machine-readable output");
    cmd->callback([nb] { run_neighbors(*nb); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return *classify_exit;
}
