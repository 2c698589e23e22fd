#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "seqparse/tree.hpp"

namespace seqparse {

struct BracketSpan {
  std::string label;
  std::size_t start = 0;  // inclusive word index
  std::size_t end = 0;    // exclusive

  auto operator<=>(const BracketSpan&) const = default;
};

struct EvalOptions {
  // Drop constituents whose label is one of `punctuation_labels` before
  // scoring and remove punctuation words from span positions.
  bool delete_punctuation = false;
  std::set<std::string> punctuation_labels = {".", ",", ":", "``", "''", "-NONE-"};
};

struct BucketScore {
  std::size_t max_length = 0;
  std::size_t sentences = 0;
  double f1 = 0;
};

struct F1Report {
  std::size_t sentences = 0;
  std::size_t matched = 0;
  std::size_t gold_total = 0;
  std::size_t pred_total = 0;
  double precision = 0;  // percentages
  double recall = 0;
  double f1 = 0;
  std::vector<BucketScore> per_bucket;  // only non-empty buckets
  double malformed_rate = 0;            // fraction of repaired predictions
  bool delete_punctuation = false;
};

// One span per internal node including the root; preterminals excluded. With
// punctuation deletion, preterminals tagged as punctuation do not occupy
// word positions and spans that become empty are dropped.
std::vector<BracketSpan> extract_brackets(const ParseTree& t, const EvalOptions& opts = {});

// Size of the multiset intersection.
std::size_t match_count(std::vector<BracketSpan> gold, std::vector<BracketSpan> pred);

void finalize_scores(F1Report& r);

// Micro-averaged over the corpus. Throws std::invalid_argument naming the
// first misaligned sentence.
F1Report bracket_f1(const std::vector<ParseTree>& gold, const std::vector<ParseTree>& pred,
                    const EvalOptions& opts = {});

inline const std::vector<std::size_t> kDefaultBuckets = {10, 20, 30, 40, 50, 60, 70};

// Cumulative buckets: bucket b scores the sentences with at most b words.
std::vector<BucketScore> length_report(const std::vector<ParseTree>& gold,
                                       const std::vector<ParseTree>& pred,
                                       const std::vector<std::size_t>& buckets = kDefaultBuckets,
                                       const EvalOptions& opts = {});

nlohmann::json to_json(const F1Report& r);
void write_text_report(std::ostream& out, const F1Report& r);
// "max_length<TAB>f1" rows with a header line.
void write_bucket_tsv(std::ostream& out, const std::vector<BucketScore>& buckets);

}  // namespace seqparse
