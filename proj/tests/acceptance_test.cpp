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

// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion also carries a wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tsi/cbow.hpp"
#include "tsi/classifier.hpp"
#include "tsi/corpus.hpp"
#include "tsi/embedding.hpp"
#include "tsi/eval.hpp"
#include "tsi/keywords.hpp"
#include "tsi/preprocess.hpp"
#include "tsi/rng.hpp"

using namespace tsi;

namespace {

struct Checker {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void require_near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want << " +/- " << tol;
      failures.push_back(os.str());
    }
  }
};

// Shared desk-scale pipeline fixture for criteria 4-6: one synthetic corpus,
// a CBOW table trained on its first 20,000 tweets, and a 2000/1000
// train/test carve-out from the remaining 3,000.
struct Pipeline {
  SynthCorpus corpus;
  EmbeddingTable table;
  std::vector<LabeledTokens> cbow_pool;  // tokenized first 20,000 tweets
  std::vector<LabeledTokens> train, test;
  std::vector<TokenList> test_tokens;
  std::vector<BinaryLabel> test_truth;
  KeywordSet ranking50;

  static const Pipeline& get() {
    static const Pipeline p;
    return p;
  }

  double accuracy(const TsiModel& model, const EmbeddingTable& tbl) const {
    const auto preds = predict_batch(model, tbl, test_tokens);
    std::vector<BinaryLabel> labels;
    labels.reserve(preds.size());
    for (const auto& pr : preds) labels.push_back(pr.label);
    return score(labels, test_truth).accuracy;
  }

 private:
  Pipeline()
      : corpus(make_corpus()),
        table(make_table(corpus)),
        cbow_pool(),
        train(),
        test() {
    const Preprocessor pre;
    const auto tokenized = tokenize_corpus(corpus.tweets, pre);
    cbow_pool.assign(tokenized.begin(), tokenized.begin() + 20000);
    train.assign(tokenized.begin() + 20000, tokenized.begin() + 22000);
    test.assign(tokenized.begin() + 22000, tokenized.end());
    for (const auto& ex : test) {
      test_tokens.push_back(ex.tokens);
      test_truth.push_back(ex.label);
    }
    std::vector<TokenList> tr_tweets;
    for (const auto& ex : train) {
      if (ex.label == BinaryLabel::kTR) tr_tweets.push_back(ex.tokens);
    }
    ranking50 = extract(tr_tweets, 50);
  }

  static SynthCorpus make_corpus() {
    SynthSpec spec;
    spec.n_tweets = 23000;  // 20,000 for CBOW + 2,000 train + 1,000 test
    spec.pool_size = 50;
    spec.noise_rate = 0.1;
    spec.seed = 1301;
    return generate_corpus(spec);
  }

  static EmbeddingTable make_table(const SynthCorpus& corpus) {
    const Preprocessor pre;
    std::vector<TokenList> texts;
    texts.reserve(20000);
    for (std::size_t i = 0; i < 20000; ++i) texts.push_back(pre.normalize(corpus.tweets[i].raw));
    CbowConfig cfg;
    cfg.dimension = 24;
    cfg.window = 5;
    cfg.epochs = 3;
    cfg.learning_rate = 0.05;
    cfg.seed = 13;
    return train_cbow(texts, cfg).to_embedding_table();
  }
};

KeywordSet top_k(const KeywordSet& ranking, std::size_t k) {
  KeywordSet out;
  out.k = k;
  out.entries.assign(ranking.entries.begin(),
                     ranking.entries.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

// ---------------------------------------------------------------------------

void criterion_1_metric_oracle(Checker& c) {
  const auto r = report_from_confusion(4998, 212, 206, 4905);
  c.require(r.total() == 10321, "total is 10321");
  c.require_near(r.accuracy, 0.9595, 5e-4, "accuracy");
  c.require_near(r.recall_nt, 0.959, 5e-4, "NT recall");
  c.require_near(r.recall_tr, 0.960, 5e-4, "TR recall");
  c.require_near(r.precision_nt, 0.960, 5e-4, "NT precision");
  c.require_near(r.precision_tr, 0.959, 5e-4, "TR precision");
  c.require_near(r.f_score, 0.959, 5e-4, "average F-score");
}

void criterion_2_preprocess_golden(Checker& c) {
  const Preprocessor pre;
  const auto got = pre.normalize_text(
      "Cleared: Disabled Vehicle: EB on I-66 at MM68 in Arlington Co.11:36 AM");
  const TokenList full{"cleared", "disabled", "vehicle", "eb",
                       "highway", "mm68",     "arlington", "co", "am"};
  c.require(got == full, "worked example with 'co' as the one allowed extra");
  // Dropping the documented extra token reproduces the published list.
  TokenList without_co;
  for (const auto& t : got) {
    if (t != "co") without_co.push_back(t);
  }
  const TokenList published{"cleared", "disabled", "vehicle", "eb",
                            "highway", "mm68",     "arlington", "am"};
  c.require(without_co == published, "published token list modulo 'co'");
}

void criterion_3_unit_oracles(Checker& c) {
  const auto table = tsitest::make_table(2, {
                                                {"k", {1, 0}},
                                                {"c10", {2, 0}},
                                                {"c08", {4, 3}},
                                                {"c08b", {8, 6}},
                                                {"c00", {0, 1}},
                                                {"c00b", {0, 2}},
                                                {"cm06", {-3, 4}},
                                            });
  const auto mu = mean_vector(table, std::vector<std::string>{"k"});
  const auto self = tsi_score(table, mu.values, TokenList{"k"});
  c.require(self.defined(), "singleton TSI defined");
  c.require_near(self.value, 1.0, 1e-9, "singleton-keyword self-similarity TSI");

  const auto two = tsi_score(table, mu.values, TokenList{"k", "c00"});
  c.require_near(two.value, 0.5, 1e-9, "two-token TSI (1.0 + 0.0) / 2");

  // Class means 0.2 and 0.8 from exact-ratio cosines, threshold at 0.5.
  const std::vector<LabeledTokens> train{
      LabeledTokens{{"c08", "c08b", "cm06", "c00", "c00b"}, BinaryLabel::kNT},
      LabeledTokens{{"c08"}, BinaryLabel::kTR},
  };
  FitReport report;
  const auto model = fit(table, top_k([] {
                           KeywordSet k;
                           k.entries = {{"k", 1}};
                           k.k = 1;
                           return k;
                         }(), 1),
                         train, &report);
  c.require_near(report.nt_tsi, 0.2, 1e-9, "NT class mean");
  c.require_near(report.tr_tsi, 0.8, 1e-9, "TR class mean");
  c.require_near(model.threshold, 0.5, 1e-9, "threshold (NT_TSI + TR_TSI) / 2");
}

void criterion_4_end_to_end(Checker& c) {
  const auto& p = Pipeline::get();
  const auto model = fit(p.table, top_k(p.ranking50, 10), p.train);
  const double traffic_acc = p.accuracy(model, p.table);
  c.require(traffic_acc >= 0.90, "pipeline accuracy >= 0.90 (got " +
                                     std::to_string(traffic_acc) + ")");

  // Substitute ten background-pool tokens for the traffic keywords.
  KeywordSet background;
  background.k = 10;
  for (std::size_t i = 0; i < 10; ++i) {
    background.entries.push_back(KeywordEntry{p.corpus.background_pool[i], 10 - i});
  }
  const auto bg_model = fit(p.table, background, p.train);
  const double bg_acc = p.accuracy(bg_model, p.table);
  c.require(traffic_acc - bg_acc >= 0.20,
            "background keywords drop accuracy by >= 20 points (traffic " +
                std::to_string(traffic_acc) + ", background " + std::to_string(bg_acc) + ")");
}

void criterion_5_keyword_sweep(Checker& c) {
  const auto& p = Pipeline::get();
  const std::vector<std::size_t> ks{1, 10, 50};
  const auto report = sweep_keywords(p.table, p.ranking50, p.train, p.test, ks);
  const double acc1 = report.points[0].accuracy;
  const double acc10 = report.points[1].accuracy;
  const double acc50 = report.points[2].accuracy;
  c.require(std::abs(acc10 - acc50) <= 0.02,
            "plateau |acc(10) - acc(50)| <= 2 points (acc10 " + std::to_string(acc10) +
                ", acc50 " + std::to_string(acc50) + ")");
  c.require(acc10 - acc1 >= 0.05, "rise acc(10) - acc(1) >= 5 points (acc1 " +
                                      std::to_string(acc1) + ", acc10 " + std::to_string(acc10) +
                                      ")");
}

void criterion_6_robustness(Checker& c) {
  const auto& p = Pipeline::get();
  RobustnessConfig cfg;
  cfg.runs = 10;
  cfg.sample_size = 1000;
  cfg.k = 10;
  cfg.seed = 99;
  const auto report = robustness(p.table, p.cbow_pool, p.test, cfg);
  c.require(!report.sampled_with_replacement, "10 disjoint sample pairs fit in the pool");
  const double range = report.max_accuracy - report.min_accuracy;
  c.require(range <= 0.03,
            "accuracy range <= 3 points across runs (got " + std::to_string(range) + ")");
}

void criterion_7_cbow(Checker& c) {
  // 1000 random forward passes over randomly perturbed models.
  Rng rng(7001);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<TokenList> corpus;
    const std::size_t vocab = 4 + rng.index(12);
    for (std::size_t i = 0; i < 30; ++i) {
      TokenList t;
      for (int j = 0; j < 6; ++j) t.push_back("w" + std::to_string(rng.index(vocab)));
      corpus.push_back(std::move(t));
    }
    CbowConfig cfg;
    cfg.dimension = 4 + rng.index(8);
    cfg.epochs = 1;
    cfg.learning_rate = 0.3;
    cfg.seed = rng.next();
    const auto model = train_cbow(corpus, cfg);
    for (int pass = 0; pass < 100; ++pass) {
      std::vector<std::size_t> ctx;
      const std::size_t len = 1 + rng.index(5);
      for (std::size_t j = 0; j < len; ++j) ctx.push_back(rng.index(model.vocab_size()));
      const auto probs = model.forward(ctx);
      double sum = 0.0;
      bool nonneg = true;
      for (double x : probs) {
        sum += x;
        nonneg &= x >= 0.0;
      }
      if (!nonneg || std::abs(sum - 1.0) > 1e-6) {
        c.require(false, "softmax distribution sums to 1 +/- 1e-6");
        return;
      }
    }
  }

  // Exact analytic gradients vs central finite differences, every weight of
  // a V=5, D=3 model.
  std::vector<TokenList> gc_corpus;
  {
    TokenList all;
    for (std::size_t v = 0; v < 5; ++v) {
      for (std::size_t r = 0; r < 5 - v; ++r) all.push_back("w" + std::to_string(v));
    }
    gc_corpus.push_back(all);
  }
  CbowModel model(build_vocab(gc_corpus, 1), 3, 414);
  Rng grng(515);
  for (int step = 0; step < 30; ++step) {
    std::vector<std::size_t> ctx{grng.index(5), grng.index(5)};
    model.train_pair(ctx, grng.index(5), 0.4);
  }
  const std::vector<std::size_t> ctx{0, 2, 4};
  const std::size_t target = 1;
  const auto [loss, grads] = model.loss_and_grad(ctx, target);
  c.require(std::isfinite(loss), "gradcheck loss finite");
  const double eps = 1e-4;
  double worst = 0.0;
  for (int matrix = 0; matrix < 2; ++matrix) {
    for (std::size_t v = 0; v < 5; ++v) {
      for (std::size_t d = 0; d < 3; ++d) {
        auto probe = [&](double delta) {
          CbowModel copy = model;
          auto row = matrix == 0 ? copy.mutable_input_row(v) : copy.mutable_output_row(v);
          row[d] += delta;
          return copy.loss_and_grad(ctx, target).first;
        };
        const double numeric = (probe(eps) - probe(-eps)) / (2.0 * eps);
        const double analytic =
            matrix == 0 ? grads.input[v * 3 + d] : grads.output[v * 3 + d];
        const double rel =
            std::abs(analytic - numeric) / std::max(1e-6, std::abs(analytic) + std::abs(numeric));
        worst = std::max(worst, rel);
      }
    }
  }
  c.require(worst <= 1e-4,
            "every analytic gradient within 1e-4 relative of central differences (worst " +
                std::to_string(worst) + ")");

  // Epoch-average loss trend over the first 3 epochs.
  Rng crng(7077);
  std::vector<TokenList> topic_corpus;
  for (std::size_t i = 0; i < 400; ++i) {
    TokenList t;
    const bool a = i % 2 == 0;
    const std::size_t len = 5 + crng.index(5);
    for (std::size_t j = 0; j < len; ++j) {
      t.push_back((a ? "aa" : "bb") + std::to_string(crng.index(12)));
    }
    topic_corpus.push_back(std::move(t));
  }
  CbowConfig cfg;
  cfg.dimension = 12;
  cfg.epochs = 3;
  cfg.learning_rate = 0.03;
  cfg.seed = 5;
  TrainStats stats;
  train_cbow(topic_corpus, cfg, &stats);
  int violations = 0;
  for (std::size_t e = 1; e < stats.epoch_loss.size(); ++e) {
    if (stats.epoch_loss[e] > stats.epoch_loss[e - 1]) ++violations;
  }
  c.require(violations <= 1, "epoch loss non-increasing over the first 3 epochs (violations " +
                                 std::to_string(violations) + ")");
}

void criterion_8_invariances(Checker& c) {
  const auto& p = Pipeline::get();
  const auto model = fit(p.table, top_k(p.ranking50, 10), p.train);

  // TSI token-permutation invariance.
  Rng rng(8001);
  for (int trial = 0; trial < 50; ++trial) {
    const auto& toks = p.test_tokens[rng.index(p.test_tokens.size())];
    auto shuffled = toks;
    rng.shuffle(shuffled);
    const auto a = tsi_score(p.table, model.mu, toks);
    const auto b = tsi_score(p.table, model.mu, shuffled);
    if (std::abs(a.value - b.value) > 1e-12 || a.words_scored != b.words_scored) {
      c.require(false, "TSI token-permutation invariance");
      break;
    }
  }

  // Positive-scale invariance of all predicted labels at c = 7.3.
  EmbeddingTable scaled(p.table.dimension(), "scaled");
  for (std::size_t i = 0; i < p.table.size(); ++i) {
    std::vector<float> v(p.table.row(i).begin(), p.table.row(i).end());
    for (auto& x : v) x *= 7.3f;
    scaled.add(p.table.token(i), v);
  }
  const auto scaled_model = fit(scaled, top_k(p.ranking50, 10), p.train);
  const auto preds = predict_batch(model, p.table, p.test_tokens);
  const auto scaled_preds = predict_batch(scaled_model, scaled, p.test_tokens);
  bool labels_equal = true;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    labels_equal &= preds[i].label == scaled_preds[i].label;
  }
  c.require(labels_equal, "all predicted labels unchanged under global scaling by 7.3");

  // Cosine symmetry and bounds over 1000 random pairs.
  for (int i = 0; i < 1000; ++i) {
    const std::size_t dim = 1 + rng.index(12);
    std::vector<double> a(dim), b(dim);
    for (auto& x : a) x = rng.real() * 10.0 - 5.0;
    for (auto& x : b) x = rng.real() * 10.0 - 5.0;
    bool za = true, zb = true;
    for (double x : a) za &= x == 0.0;
    for (double x : b) zb &= x == 0.0;
    if (za || zb) continue;
    const double c1 = cosine(std::span<const double>(a), std::span<const double>(b));
    const double c2 = cosine(std::span<const double>(b), std::span<const double>(a));
    if (c1 != c2 || std::abs(c1) > 1.0 + 1e-9) {
      c.require(false, "cosine symmetry and bounds on random pairs");
      break;
    }
  }

  // Split partition and stratification invariants.
  {
    SynthSpec spec;
    spec.n_tweets = 801;
    spec.seed = 88;
    const auto corpus = generate_corpus(spec);
    SplitSpec split_spec;
    split_spec.train_fraction = 0.8;
    split_spec.seed = 5;
    const auto result = split(corpus.tweets, split_spec);
    std::multiset<std::string> ids, original;
    for (const auto& t : result.train) ids.insert(t.raw.id);
    for (const auto& t : result.test) ids.insert(t.raw.id);
    for (const auto& t : corpus.tweets) original.insert(t.raw.id);
    c.require(ids == original, "split partitions the corpus exactly");
    std::size_t total_nt = 0, train_nt = 0, total_tr = 0, train_tr = 0;
    for (const auto& t : corpus.tweets) {
      (binarize(t.label) == BinaryLabel::kNT ? total_nt : total_tr)++;
    }
    for (const auto& t : result.train) {
      (binarize(t.label) == BinaryLabel::kNT ? train_nt : train_tr)++;
    }
    c.require(std::abs(static_cast<double>(train_nt) - 0.8 * static_cast<double>(total_nt)) < 1.0,
              "NT train share within one tweet of the fraction");
    c.require(std::abs(static_cast<double>(train_tr) - 0.8 * static_cast<double>(total_tr)) < 1.0,
              "TR train share within one tweet of the fraction");
  }

  // Keyword counts are invariant under corpus permutation.
  {
    std::vector<TokenList> tr_tweets;
    for (const auto& ex : p.train) {
      if (ex.label == BinaryLabel::kTR) tr_tweets.push_back(ex.tokens);
    }
    auto shuffled = tr_tweets;
    rng.shuffle(shuffled);
    c.require(extract(tr_tweets, 25).entries == extract(shuffled, 25).entries,
              "keyword extraction is corpus-permutation invariant");
  }
}

void criterion_9_round_trips(Checker& c) {
  tsitest::TempDir dir;
  const auto& p = Pipeline::get();

  // Embedding binary <-> text within 1e-6 per coordinate.
  write_binary_embeddings(p.table, dir.file("t.bin"));
  const auto from_bin = load_binary_embeddings(dir.file("t.bin"));
  write_text_embeddings(from_bin, dir.file("t.txt"));
  const auto from_text = load_text_embeddings(dir.file("t.txt"));
  bool coords_ok = from_text.size() == p.table.size();
  for (std::size_t i = 0; coords_ok && i < p.table.size(); ++i) {
    coords_ok &= from_text.token(i) == p.table.token(i);
    for (std::size_t d = 0; d < p.table.dimension(); ++d) {
      coords_ok &= std::abs(from_text.row(i)[d] - p.table.row(i)[d]) < 1e-6f;
    }
  }
  c.require(coords_ok, "binary->text->load embedding round trip within 1e-6 per coordinate");

  // Model round trip within 1e-9.
  const auto model = fit(p.table, top_k(p.ranking50, 10), p.train);
  write_model(model, dir.file("m.tsi"));
  const auto back = read_model(dir.file("m.tsi"));
  bool model_ok = back.mu.size() == model.mu.size();
  for (std::size_t d = 0; model_ok && d < model.mu.size(); ++d) {
    model_ok &= std::abs(back.mu[d] - model.mu[d]) <= 1e-9;
  }
  model_ok &= std::abs(back.threshold - model.threshold) <= 1e-9;
  model_ok &= back.embedding_hash == model.embedding_hash;
  model_ok &= back.keywords.entries == model.keywords.entries;
  c.require(model_ok, "model file round trip within 1e-9");

  // JSONL corpus round trip byte-identical.
  const std::vector<LabeledTweet> slice(p.corpus.tweets.begin(), p.corpus.tweets.begin() + 500);
  write_jsonl(slice, dir.file("a.jsonl"));
  const auto reread = read_jsonl(dir.file("a.jsonl"));
  write_jsonl(reread, dir.file("b.jsonl"));
  c.require(tsitest::read_file(dir.file("a.jsonl")) == tsitest::read_file(dir.file("b.jsonl")),
            "JSONL corpus round trip byte-identical");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Checker&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "metric oracle (published confusion counts)", 1.0, criterion_1_metric_oracle},
      {2, "preprocessing golden example", 1.0, criterion_2_preprocess_golden},
      {3, "TSI and threshold unit oracles", 1.0, criterion_3_unit_oracles},
      {4, "end-to-end synthetic pipeline + keyword ablation", 300.0, criterion_4_end_to_end},
      {5, "keyword-count sweep plateau", 600.0, criterion_5_keyword_sweep},
      {6, "multi-training-set robustness", 600.0, criterion_6_robustness},
      {7, "CBOW softmax, gradients, loss trend", 120.0, criterion_7_cbow},
      {8, "invariance suite", 60.0, criterion_8_invariances},
      {9, "format round trips", 60.0, criterion_9_round_trips},
  };

  // The shared pipeline fixture is charged to criterion 4's budget.
  int failures = 0;
  for (const auto& criterion : criteria) {
    Checker checker;
    const auto started = std::chrono::steady_clock::now();
    try {
      criterion.run(checker);
    } catch (const std::exception& e) {
      checker.failures.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (elapsed >= criterion.budget_seconds) {
      checker.failures.push_back("runtime " + std::to_string(elapsed) + "s exceeds budget " +
                                 std::to_string(criterion.budget_seconds) + "s");
    }
    if (checker.failures.empty()) {
      std::printf("[PASS] criterion %d: %s (%.2fs)\n", criterion.id, criterion.name, elapsed);
    } else {
      ++failures;
      std::printf("[FAIL] criterion %d: %s (%.2fs)\n", criterion.id, criterion.name, elapsed);
      for (const auto& f : checker.failures) std::printf("       - %s\n", f.c_str());
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
