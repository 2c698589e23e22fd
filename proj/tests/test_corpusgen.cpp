#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <functional>
#include <fstream>
#include <set>
#include <sstream>

#include "seqparse/corpusgen.hpp"

using namespace seqparse;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("seqparse_corpusgen_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("single production grammar") {
  const ToyGrammar g = ToyGrammar::parse("start S\nS -> XX\ntag XX : a\n");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(write_bracketed(sample_tree(g, seed)) == "(S (XX a))");
  }
}

TEST_CASE("same seed, same tree") {
  const ToyGrammar g = ToyGrammar::default_grammar();
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(sample_tree(g, seed) == sample_tree(g, seed));
  CHECK(sample_tree(g, 1) != sample_tree(g, 2));
}

TEST_CASE("production weights 3:1") {
  const ToyGrammar g = ToyGrammar::parse(R"(
start S
S -> A : 3
S -> B : 1
tag A : a
tag B : b
)");
  Rng rng(123);
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) first += g.sample(rng).children.at(0).label == "A";
  CHECK(std::abs(static_cast<double>(first) / n - 0.75) <= 0.02);
}

TEST_CASE("grammar errors") {
  CHECK_THROWS(ToyGrammar::parse("start S\nS -> S NN\ntag NN : x\n"));
  CHECK_THROWS(ToyGrammar::parse("start S\nmax_depth 2\nS -> A\nA -> B\nB -> C\ntag C : c\n"));
  CHECK_THROWS(ToyGrammar::parse("start S\nS -> NP\ntag NN : x\n"));
  CHECK_THROWS(ToyGrammar::parse("start S\nS -> NN : -1\ntag NN : x\n"));
  CHECK_THROWS(ToyGrammar::parse("S -> NN\ntag NN : x\n"));
  CHECK_THROWS(ToyGrammar::parse("start S\nS -> NN\ntag NN :\n"));
  CHECK_THROWS(ToyGrammar::parse("start S\nthis is not a directive\n"));
}

TEST_CASE("depth cap is respected") {
  const ToyGrammar g = ToyGrammar::parse(R"(
start S
max_depth 4
S -> S X : 10
S -> X
tag X : x
)");
  Rng rng(5);
  std::function<int(const ParseTree&)> depth = [&](const ParseTree& t) {
    int d = 0;
    for (const auto& c : t.children) d = std::max(d, depth(c));
    return d + 1;
  };
  for (int i = 0; i < 200; ++i) CHECK(depth(g.sample(rng)) <= 4);
}

TEST_CASE("default grammar") {
  const ToyGrammar g = ToyGrammar::default_grammar();
  CHECK(g.labels().size() == 6);
  std::size_t words_total = 0;
  for (const auto& [tag, ws] : g.lexicon()) words_total += ws.size();
  CHECK(words_total >= 30);
  CHECK(g.display_label("S_EMB") == "S");

  Rng rng(17);
  double len = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const ParseTree t = g.sample(rng);
    CHECK_NOTHROW(validate(t));
    const auto lin = linearize(normalize_pos(t));
    CHECK(delinearize(lin, words(t)) == normalize_pos(t));
    len += static_cast<double>(word_count(t));
  }
  len /= n;
  CHECK(len >= 6);
  CHECK(len <= 10);
}

TEST_CASE("make_corpus") {
  const ToyGrammar g = ToyGrammar::default_grammar();
  const ToyCorpus c = make_corpus(g, 30, 10, 5, 9);
  CHECK(c.train.size() == 30);
  CHECK(c.dev.size() == 10);
  CHECK(c.test.size() == 5);
  std::set<std::string> all;
  for (const auto* split : {&c.train, &c.dev, &c.test})
    for (const auto& t : *split) all.insert(write_bracketed(t));
  CHECK(all.size() == 45);

  const ToyCorpus none = make_corpus(g, 0, 2, 0, 9);
  CHECK(none.train.empty());
  const fs::path d = scratch_dir("empty");
  write_corpus(none, d);
  CHECK(slurp(d / "train.trees").empty());
  CHECK(read_bracketed(slurp(d / "dev.trees")).size() == 2);
  fs::remove_all(d);

  const ToyGrammar tiny = ToyGrammar::parse("start S\nS -> XX\ntag XX : a b\n");
  CHECK_THROWS(make_corpus(tiny, 3, 0, 0, 1));
}

TEST_CASE("regeneration is byte identical") {
  const ToyGrammar g = ToyGrammar::default_grammar();
  const fs::path a = scratch_dir("a"), b = scratch_dir("b");
  write_corpus(make_corpus(g, 50, 10, 10, 2024), a);
  write_corpus(make_corpus(g, 50, 10, 10, 2024), b);
  for (const char* f : {"train.trees", "dev.trees", "test.trees"}) {
    CHECK(!slurp(a / f).empty());
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(read_bracketed(slurp(a / "train.trees")) == make_corpus(g, 50, 10, 10, 2024).train);
  fs::remove_all(a);
  fs::remove_all(b);
}
