#include "seqparse/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace seqparse {

namespace {

// Returns the number of (kept) words under `t` starting at `pos`.
std::size_t collect_spans(const ParseTree& t, std::size_t pos, const EvalOptions& opts,
                          std::vector<BracketSpan>& out) {
  if (t.is_preterminal()) {
    return opts.delete_punctuation && opts.punctuation_labels.count(t.label) ? 0 : 1;
  }
  std::size_t width = 0;
  for (const auto& c : t.children) width += collect_spans(c, pos + width, opts, out);
  if (width > 0) out.push_back({t.label, pos, pos + width});
  return width;
}

double percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<BracketSpan> extract_brackets(const ParseTree& t, const EvalOptions& opts) {
  std::vector<BracketSpan> spans;
  collect_spans(t, 0, opts, spans);
  return spans;
}

std::size_t match_count(std::vector<BracketSpan> gold, std::vector<BracketSpan> pred) {
  std::sort(gold.begin(), gold.end());
  std::sort(pred.begin(), pred.end());
  std::size_t matched = 0;
  auto g = gold.begin();
  auto p = pred.begin();
  while (g != gold.end() && p != pred.end()) {
    if (*g < *p) {
      ++g;
    } else if (*p < *g) {
      ++p;
    } else {
      ++matched;
      ++g;
      ++p;
    }
  }
  return matched;
}

void finalize_scores(F1Report& r) {
  r.precision = percent(r.matched, r.pred_total);
  r.recall = percent(r.matched, r.gold_total);
  r.f1 = (r.precision + r.recall) > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0;
}

F1Report bracket_f1(const std::vector<ParseTree>& gold, const std::vector<ParseTree>& pred,
                    const EvalOptions& opts) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("bracket_f1: " + std::to_string(gold.size()) + " gold trees vs " +
                                std::to_string(pred.size()) + " predicted");
  }
  F1Report r;
  r.delete_punctuation = opts.delete_punctuation;
  r.sentences = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (words(gold[i]) != words(pred[i])) {
      throw std::invalid_argument("bracket_f1: sentence " + std::to_string(i) +
                                  " has different words in gold and prediction");
    }
    auto g = extract_brackets(gold[i], opts);
    auto p = extract_brackets(pred[i], opts);
    r.gold_total += g.size();
    r.pred_total += p.size();
    r.matched += match_count(std::move(g), std::move(p));
  }
  finalize_scores(r);
  return r;
}

std::vector<BucketScore> length_report(const std::vector<ParseTree>& gold,
                                       const std::vector<ParseTree>& pred,
                                       const std::vector<std::size_t>& buckets,
                                       const EvalOptions& opts) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("length_report: corpus sizes differ");
  }
  std::vector<BucketScore> out;
  for (std::size_t bound : buckets) {
    std::vector<ParseTree> g, p;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (word_count(gold[i]) <= bound) {
        g.push_back(gold[i]);
        p.push_back(pred[i]);
      }
    }
    if (g.empty()) continue;
    const F1Report r = bracket_f1(g, p, opts);
    out.push_back({bound, g.size(), r.f1});
  }
  return out;
}

nlohmann::json to_json(const F1Report& r) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : r.per_bucket) {
    buckets.push_back({{"max_length", b.max_length}, {"sentences", b.sentences}, {"f1", b.f1}});
  }
  return {{"sentences", r.sentences},   {"matched", r.matched},
          {"gold_total", r.gold_total}, {"pred_total", r.pred_total},
          {"precision", r.precision},   {"recall", r.recall},
          {"f1", r.f1},                 {"per_bucket", buckets},
          {"malformed_rate", r.malformed_rate},
          {"delete_punctuation", r.delete_punctuation}};
}

void write_text_report(std::ostream& out, const F1Report& r) {
  char line[128];
  out << "Sentences            = " << r.sentences << "\n";
  out << "Matched brackets     = " << r.matched << "\n";
  out << "Gold brackets        = " << r.gold_total << "\n";
  out << "Predicted brackets   = " << r.pred_total << "\n";
  std::snprintf(line, sizeof line, "Bracketing Recall    = %.2f\n", r.recall);
  out << line;
  std::snprintf(line, sizeof line, "Bracketing Precision = %.2f\n", r.precision);
  out << line;
  std::snprintf(line, sizeof line, "Bracketing FMeasure  = %.2f\n", r.f1);
  out << line;
  std::snprintf(line, sizeof line, "Malformed rate       = %.4f\n", r.malformed_rate);
  out << line;
  out << "Punctuation deleted  = " << (r.delete_punctuation ? "yes" : "no") << "\n";
  for (const auto& b : r.per_bucket) {
    std::snprintf(line, sizeof line, "  length <= %-4zu F1 = %6.2f  (%zu sentences)\n",
                  b.max_length, b.f1, b.sentences);
    out << line;
  }
}

void write_bucket_tsv(std::ostream& out, const std::vector<BucketScore>& buckets) {
  out << "max_length\tf1\n";
  char line[64];
  for (const auto& b : buckets) {
    std::snprintf(line, sizeof line, "%zu\t%.4f\n", b.max_length, b.f1);
    out << line;
  }
}

}  // namespace seqparse
