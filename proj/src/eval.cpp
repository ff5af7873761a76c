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

#include "tsi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tsi/rng.hpp"

namespace tsi {

namespace {

using nlohmann::json;

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

double accuracy_of(const EmbeddingTable& table, const TsiModel& model,
                   std::span<const LabeledTokens> test) {
  std::vector<TokenList> tweets;
  tweets.reserve(test.size());
  std::vector<BinaryLabel> truths;
  truths.reserve(test.size());
  for (const auto& ex : test) {
    tweets.push_back(ex.tokens);
    truths.push_back(ex.label);
  }
  const auto preds = predict_batch(model, table, tweets);
  std::vector<BinaryLabel> labels;
  labels.reserve(preds.size());
  for (const auto& p : preds) labels.push_back(p.label);
  return score(labels, truths).accuracy;
}

}  // namespace

EvalReport report_from_confusion(std::uint64_t nt_nt, std::uint64_t nt_tr, std::uint64_t tr_nt,
                                 std::uint64_t tr_tr) {
  EvalReport r;
  r.confusion[0][0] = nt_nt;
  r.confusion[0][1] = nt_tr;
  r.confusion[1][0] = tr_nt;
  r.confusion[1][1] = tr_tr;
  const std::uint64_t total = r.total();
  if (total == 0) throw std::invalid_argument("score: no evaluated tweets");
  r.accuracy = ratio(nt_nt + tr_tr, total);
  r.recall_nt = ratio(nt_nt, nt_nt + nt_tr);
  r.recall_tr = ratio(tr_tr, tr_nt + tr_tr);
  r.precision_nt = ratio(nt_nt, nt_nt + tr_nt);
  r.precision_tr = ratio(tr_tr, nt_tr + tr_tr);
  const double macro_p = 0.5 * (r.precision_nt + r.precision_tr);
  const double macro_r = 0.5 * (r.recall_nt + r.recall_tr);
  r.f_score = (macro_p + macro_r) > 0.0 ? 2.0 * macro_p * macro_r / (macro_p + macro_r) : 0.0;
  return r;
}

EvalReport score(std::span<const BinaryLabel> preds, std::span<const BinaryLabel> truths) {
  if (preds.size() != truths.size()) {
    throw std::invalid_argument("score: " + std::to_string(preds.size()) + " predictions vs " +
                                std::to_string(truths.size()) + " truths");
  }
  if (preds.empty()) throw std::invalid_argument("score: no evaluated tweets");
  std::uint64_t c[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int a = truths[i] == BinaryLabel::kNT ? 0 : 1;
    const int p = preds[i] == BinaryLabel::kNT ? 0 : 1;
    ++c[a][p];
  }
  return report_from_confusion(c[0][0], c[0][1], c[1][0], c[1][1]);
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << "confusion (actual x predicted):\n";
  out << "            NT      TR    recall%\n";
  out << "  NT  " << confusion[0][0] << "  " << confusion[0][1] << "  " << format_pct(recall_nt)
      << "\n";
  out << "  TR  " << confusion[1][0] << "  " << confusion[1][1] << "  " << format_pct(recall_tr)
      << "\n";
  out << "precision%  " << format_pct(precision_nt) << "  " << format_pct(precision_tr) << "\n";
  out << "accuracy: " << format_pct(accuracy) << "%  (" << (confusion[0][0] + confusion[1][1])
      << "/" << total() << ")\n";
  out << "average F-score: " << format_pct(f_score) << "%\n";
  return out.str();
}

std::string EvalReport::to_json() const {
  json j;
  j["version"] = 1;
  j["confusion"] = {{"nt_nt", confusion[0][0]},
                    {"nt_tr", confusion[0][1]},
                    {"tr_nt", confusion[1][0]},
                    {"tr_tr", confusion[1][1]}};
  j["total"] = total();
  j["accuracy"] = accuracy;
  j["precision_nt"] = precision_nt;
  j["precision_tr"] = precision_tr;
  j["recall_nt"] = recall_nt;
  j["recall_tr"] = recall_tr;
  j["f_score"] = f_score;
  return j.dump();
}

HistogramReport histogram(std::span<const double> scores_nt, std::span<const double> scores_tr,
                          std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram: bins must be positive");
  if (scores_nt.empty() || scores_tr.empty()) {
    throw std::invalid_argument("histogram: both classes must be non-empty");
  }
  double lo = scores_nt[0], hi = scores_nt[0];
  auto widen = [&](std::span<const double> v) {
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  };
  widen(scores_nt);
  widen(scores_tr);
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }

  HistogramReport r;
  r.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) r.edges[i] = lo + width * static_cast<double>(i);
  r.counts_nt.assign(bins, 0);
  r.counts_tr.assign(bins, 0);

  auto fill = [&](std::span<const double> v, std::vector<std::uint64_t>& counts, double& mean,
                  double& variance) {
    for (double x : v) {
      auto b = static_cast<std::size_t>((x - lo) / width);
      if (b >= bins) b = bins - 1;  // right edge lands in the last bin
      ++counts[b];
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    mean = sum / static_cast<double>(v.size());
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    variance = sq / static_cast<double>(v.size());
  };
  fill(scores_nt, r.counts_nt, r.nt_mean, r.nt_variance);
  fill(scores_tr, r.counts_tr, r.tr_mean, r.tr_variance);
  r.threshold = 0.5 * (r.nt_mean + r.tr_mean);
  return r;
}

std::string HistogramReport::to_csv() const {
  std::ostringstream out;
  out << "x,value_nt,value_tr\n";
  char buf[48];
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", 0.5 * (edges[i] + edges[i + 1]));
    out << buf << ',' << counts_nt[i] << ',' << counts_tr[i] << '\n';
  }
  return out.str();
}

std::string HistogramReport::to_json() const {
  json j;
  j["version"] = 1;
  j["edges"] = edges;
  j["counts_nt"] = counts_nt;
  j["counts_tr"] = counts_tr;
  j["nt_mean"] = nt_mean;
  j["tr_mean"] = tr_mean;
  j["nt_variance"] = nt_variance;
  j["tr_variance"] = tr_variance;
  j["threshold"] = threshold;
  return j.dump();
}

SweepReport sweep_keywords(const EmbeddingTable& table, const KeywordSet& ranking,
                           std::span<const LabeledTokens> train,
                           std::span<const LabeledTokens> test,
                           std::span<const std::size_t> ks) {
  if (ks.empty()) throw std::invalid_argument("sweep: no keyword counts requested");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == 0) throw std::invalid_argument("sweep: keyword counts must be positive");
    if (i > 0 && ks[i] <= ks[i - 1]) {
      throw std::invalid_argument("sweep: keyword counts must be strictly increasing");
    }
    if (ks[i] > ranking.entries.size()) {
      throw std::out_of_range("sweep: k=" + std::to_string(ks[i]) + " exceeds the " +
                              std::to_string(ranking.entries.size()) + "-entry ranking");
    }
  }
  SweepReport report;
  report.points.reserve(ks.size());
  for (std::size_t k : ks) {
    KeywordSet top;
    top.k = k;
    top.entries.assign(ranking.entries.begin(),
                       ranking.entries.begin() + static_cast<std::ptrdiff_t>(k));
    const TsiModel model = fit(table, top, train);
    report.points.push_back(SweepPoint{k, accuracy_of(table, model, test)});
  }
  return report;
}

std::string SweepReport::to_csv() const {
  std::ostringstream out;
  out << "k,accuracy\n";
  char buf[48];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.accuracy);
    out << p.k << ',' << buf << '\n';
  }
  return out.str();
}

std::string SweepReport::to_json() const {
  json j;
  j["version"] = 1;
  auto arr = json::array();
  for (const auto& p : points) arr.push_back({{"k", p.k}, {"accuracy", p.accuracy}});
  j["points"] = arr;
  return j.dump();
}

RobustnessReport robustness(const EmbeddingTable& table,
                            std::span<const LabeledTokens> main_train,
                            std::span<const LabeledTokens> test, const RobustnessConfig& config) {
  if (config.runs == 0) throw std::invalid_argument("robustness: runs must be positive");
  if (config.sample_size == 0) {
    throw std::invalid_argument("robustness: sample_size must be positive");
  }
  const std::size_t per_run = 2 * config.sample_size;
  RobustnessReport report;

  std::vector<std::vector<std::size_t>> samples;
  if (config.runs * per_run <= main_train.size()) {
    const std::vector<std::size_t> sizes(2 * config.runs, config.sample_size);
    samples = disjoint_index_samples(main_train.size(), sizes, config.seed);
  } else if (config.allow_replacement && per_run <= main_train.size()) {
    report.sampled_with_replacement = true;
    const std::vector<std::size_t> sizes(2, config.sample_size);
    for (std::size_t run = 0; run < config.runs; ++run) {
      auto pair = disjoint_index_samples(main_train.size(), sizes, config.seed + 1 + run);
      samples.push_back(std::move(pair[0]));
      samples.push_back(std::move(pair[1]));
    }
  } else {
    throw std::runtime_error(
        "robustness: training pool of " + std::to_string(main_train.size()) +
        " cannot serve " + std::to_string(config.runs) + " disjoint sample pairs of 2x" +
        std::to_string(config.sample_size) + " (pass allow_replacement to re-sample per run)");
  }

  for (std::size_t run = 0; run < config.runs; ++run) {
    const auto& kw_idx = samples[2 * run];
    const auto& th_idx = samples[2 * run + 1];
    std::vector<TokenList> tr_tweets;
    for (std::size_t i : kw_idx) {
      if (main_train[i].label == BinaryLabel::kTR) tr_tweets.push_back(main_train[i].tokens);
    }
    if (tr_tweets.empty()) {
      throw std::runtime_error("robustness: keyword sample for run " + std::to_string(run + 1) +
                               " contains no TR tweets");
    }
    const KeywordSet keywords = extract(tr_tweets, config.k);
    std::vector<LabeledTokens> th_sample;
    th_sample.reserve(th_idx.size());
    for (std::size_t i : th_idx) th_sample.push_back(main_train[i]);
    const TsiModel model = fit(table, keywords, th_sample);
    report.runs.push_back(RobustnessRun{run + 1, accuracy_of(table, model, test), model.threshold});
  }

  report.min_accuracy = report.runs[0].accuracy;
  report.max_accuracy = report.runs[0].accuracy;
  for (const auto& r : report.runs) {
    report.min_accuracy = std::min(report.min_accuracy, r.accuracy);
    report.max_accuracy = std::max(report.max_accuracy, r.accuracy);
  }
  return report;
}

std::string RobustnessReport::to_json() const {
  json j;
  j["version"] = 1;
  auto arr = json::array();
  for (const auto& r : runs) {
    arr.push_back({{"run", r.run}, {"accuracy", r.accuracy}, {"threshold", r.threshold}});
  }
  j["runs"] = arr;
  j["sampled_with_replacement"] = sampled_with_replacement;
  j["min_accuracy"] = min_accuracy;
  j["max_accuracy"] = max_accuracy;
  j["range"] = max_accuracy - min_accuracy;
  return j.dump();
}

}  // namespace tsi
