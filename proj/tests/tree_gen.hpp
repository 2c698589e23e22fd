#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "seqparse/tree.hpp"

namespace testing_support {

// A random bracketing of `words`: each internal node splits its span into
// 1..3 contiguous parts, so unary chains occur.
inline seqparse::ParseTree random_tree_over(const std::vector<std::string>& words, std::size_t lo,
                                            std::size_t hi, std::mt19937_64& rng, int depth = 0) {
  using seqparse::ParseTree;
  static const char* labels[] = {"S", "NP", "VP", "PP", "SBAR"};
  std::uniform_int_distribution<int> pick_label(0, 4);
  const std::size_t n = hi - lo;
  if (n == 1 && (depth > 0 && rng() % 3 != 0)) return ParseTree::preterminal("XX", words[lo]);
  if (depth >= 6) {
    std::vector<ParseTree> flat;
    for (std::size_t i = lo; i < hi; ++i) flat.push_back(ParseTree::preterminal("XX", words[i]));
    return ParseTree::internal(labels[pick_label(rng)], std::move(flat));
  }
  std::vector<std::size_t> cuts = {lo};
  const std::size_t parts = std::min<std::size_t>(n, 1 + rng() % 3);
  std::vector<std::size_t> inner;
  for (std::size_t i = lo + 1; i < hi; ++i) inner.push_back(i);
  std::shuffle(inner.begin(), inner.end(), rng);
  inner.resize(parts - 1);
  std::sort(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(hi);
  std::vector<ParseTree> kids;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    kids.push_back(random_tree_over(words, cuts[k], cuts[k + 1], rng, depth + 1));
  }
  return ParseTree::internal(labels[pick_label(rng)], std::move(kids));
}

inline seqparse::ParseTree random_tree_over(const std::vector<std::string>& words, std::mt19937_64& rng) {
  return random_tree_over(words, 0, words.size(), rng);
}

}  // namespace testing_support
