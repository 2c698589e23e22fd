#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "seqparse/numerics.hpp"
#include "seqparse/tree.hpp"

namespace seqparse {

// Weighted CFG over POS tags. Text format, one directive per line, '#'
// starts a comment:
//
//   start S
//   max_depth 10
//   S -> NP VP . : 2.0        # weight after ':' (default 1)
//   tag NN : dog cat park     # lexicon for a POS tag
//
// A right-hand-side symbol is a nonterminal if it has productions and a tag
// if it has a lexicon. A nonterminal written NAME_suffix is printed as NAME,
// so S_EMB -> NP VP yields S constituents.
class ToyGrammar {
 public:
  struct Production {
    std::string lhs;
    std::vector<std::string> rhs;
    double weight = 1;
  };

  static ToyGrammar parse(std::string_view text);
  static ToyGrammar default_grammar();
  static std::string_view default_grammar_text();

  const std::string& start() const { return start_; }
  int max_depth() const { return max_depth_; }
  const std::vector<Production>& productions() const { return productions_; }
  const std::map<std::string, std::vector<std::string>>& lexicon() const { return lexicon_; }
  // Distinct printed labels of the nonterminals.
  std::vector<std::string> labels() const;
  std::string display_label(const std::string& nonterminal) const;

  // Draws one tree. At each node only productions that can still finish
  // within max_depth are eligible, so at the cap only lexical ones remain.
  ParseTree sample(Rng& rng) const;

 private:
  void finish();
  int min_height(const std::string& symbol) const;
  int production_height(const Production& p) const;
  ParseTree expand(const std::string& symbol, int depth, Rng& rng) const;

  std::string start_;
  int max_depth_ = 10;
  std::vector<Production> productions_;
  std::map<std::string, std::vector<std::string>> lexicon_;
  std::map<std::string, std::vector<std::size_t>> by_lhs_;
  std::map<std::string, int> height_;
};

ParseTree sample_tree(const ToyGrammar& g, std::uint64_t seed);

struct ToyCorpus {
  std::vector<ParseTree> train;
  std::vector<ParseTree> dev;
  std::vector<ParseTree> test;
};

// No tree appears twice across or within the three splits.
ToyCorpus make_corpus(const ToyGrammar& g, std::size_t n_train, std::size_t n_dev,
                      std::size_t n_test, std::uint64_t seed);

std::string trees_to_text(const std::vector<ParseTree>& trees);

// Writes train.trees, dev.trees and test.trees into `dir`.
void write_corpus(const ToyCorpus& c, const std::filesystem::path& dir);

}  // namespace seqparse
