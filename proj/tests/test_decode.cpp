#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "grad_helpers.hpp"
#include "oracles.hpp"
#include "seqparse/decode.hpp"

using namespace seqparse;
using testing_support::random_model;

namespace {

ModelShape shape_of(int layers, int hidden, int in_vocab, int out_vocab,
                    FeedbackRouting routing = FeedbackRouting::kProjectedTopRecurrent) {
  ModelShape s;
  s.layers = layers;
  s.hidden = hidden;
  s.embed = 3;
  s.input_vocab = in_vocab;
  s.output_vocab = out_vocab;
  s.dropout_rate = 0;
  s.routing = routing;
  return s;
}

// One layer, one unit, all weights zero, encoder m0 = 8. On a one-word input
// the decoder's [d; d'] is [1, 2] at the first step and [0.5, 2] at the
// second, so output_proj column 0 sets the first-step logits directly.
ModelParams constant_model(int out_vocab) {
  Rng rng(0);
  ModelParams p = make_params(shape_of(1, 1, 2, out_vocab, FeedbackRouting::kNone), rng);
  for_each_array(p, [](std::string_view, auto& a) { a.setZero(); });
  p.encoder[0].m0(0) = 8;
  return p;
}

// Best sequence by enumerating every END-terminated sequence up to max_len
// and every unterminated sequence of exactly max_len, scored by the oracle.
std::pair<std::vector<int>, Real> exhaustive_best(const ModelParams& p, const std::vector<int>& input,
                                                  int max_len) {
  const int v = p.shape.output_vocab;
  std::vector<int> best;
  Real best_lp = -INFINITY;
  std::vector<int> cur;
  std::function<void()> walk = [&] {
    const bool done = !cur.empty() && cur.back() == 0;
    if (done || static_cast<int>(cur.size()) == max_len) {
      const Real lp = oracle::sequence_log_prob(input, cur, p);
      if (lp > best_lp) {
        best_lp = lp;
        best = cur;
      }
      return;
    }
    for (int s = 0; s < v; ++s) {
      cur.push_back(s);
      walk();
      cur.pop_back();
    }
  };
  walk();
  return {best, best_lp};
}

std::vector<LinearSymbol> syms(std::string_view s) { return split_symbols(s); }

}  // namespace

TEST_CASE("beam 1 equals greedy") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int layers = 1 + trial % 3;
    const int out_vocab = 3 + trial % 6;
    const auto routing = trial % 4 == 3 ? FeedbackRouting::kNone : FeedbackRouting::kProjectedTopRecurrent;
    const ModelParams p = random_model(shape_of(layers, 2 + trial % 5, 7, out_vocab, routing), 500 + trial,
                                       0.5 + 0.1 * (trial % 10));
    std::uniform_int_distribution<int> len(1, 6), id(0, 6);
    std::vector<int> input(static_cast<std::size_t>(len(rng)));
    for (int& x : input) x = id(rng);
    const int max_len = 1 + trial % 12;
    const BeamResult b = beam_search(p, input, 1, max_len);
    CHECK(b.best.symbols == greedy_decode(p, input, max_len));
  }
}

TEST_CASE("beam search log_prob matches the oracle score of its sequence") {
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = random_model(shape_of(2, 3, 5, 4), 900 + trial, 1.0);
    const std::vector<int> input = {1, 4, 2};
    for (int beam : {1, 2, 5}) {
      const BeamResult b = beam_search(p, input, beam, 6);
      CHECK(b.best.log_prob == doctest::Approx(oracle::sequence_log_prob(input, b.best.symbols, p)).epsilon(1e-10));
      CHECK(b.best.finished == (!b.best.symbols.empty() && b.best.symbols.back() == 0));
    }
  }
}

TEST_CASE("wide beam equals exhaustive enumeration") {
  for (int trial = 0; trial < 30; ++trial) {
    const ModelParams p = random_model(shape_of(2, 3, 4, 3), 100 + trial, 1.5);
    const std::vector<int> input = {static_cast<int>(trial % 4), 2};
    const auto [best, best_lp] = exhaustive_best(p, input, 4);
    for (int beam : {81, 100}) {
      const BeamResult b = beam_search(p, input, beam, 4);
      CHECK(b.best.symbols == best);
      CHECK(b.best.log_prob == doctest::Approx(best_lp).epsilon(1e-10));
    }
    for (int beam : {1, 2, 3, 9}) {
      CHECK(beam_search(p, input, beam, 4).best.log_prob <= best_lp + 1e-12);
    }
  }
}

TEST_CASE("a model that always ends emits only END") {
  ModelParams p = constant_model(4);
  p.output_proj(0, 0) = 60;
  for (int beam : {1, 3}) {
    const BeamResult b = beam_search(p, {1}, beam, 10);
    CHECK(b.best.symbols == std::vector<TokenId>{0});
    CHECK(b.best.finished);
    CHECK(b.trace.weights.rows() == 1);
  }
}

TEST_CASE("ensembles") {
  const ModelParams p = random_model(shape_of(2, 4, 6, 5), 77, 1.0);
  const std::vector<int> input = {3, 1, 5};
  const BeamResult single = beam_search(p, input, 3, 8);

  const ModelParams* one[] = {&p};
  const BeamResult e1 = ensemble_decode(one, input, 3, 8);
  CHECK(e1.best.symbols == single.best.symbols);
  CHECK(e1.best.log_prob == single.best.log_prob);

  const ModelParams* two[] = {&p, &p};
  const BeamResult e2 = ensemble_decode(two, input, 3, 8);
  CHECK(e2.best.symbols == single.best.symbols);
  CHECK(e2.best.log_prob == doctest::Approx(single.best.log_prob).epsilon(1e-12));

  const ModelParams other = random_model(shape_of(2, 4, 6, 6), 78, 1.0);
  const ModelParams* mixed[] = {&p, &other};
  CHECK_THROWS(ensemble_decode(mixed, input, 3, 8));
}

TEST_CASE("ensemble step distribution is the mean of the members") {
  // member A: (0.1, 0.6, 0.3); member B: (0.1, 0.1, 0.8); mean (0.1, 0.35, 0.55)
  ModelParams a = constant_model(3), b = constant_model(3);
  const Real pa[] = {0.1, 0.6, 0.3}, pb[] = {0.1, 0.1, 0.8};
  for (int k = 0; k < 3; ++k) {
    a.output_proj(k, 0) = std::log(pa[k]);
    b.output_proj(k, 0) = std::log(pb[k]);
  }
  CHECK(beam_search(a, {1}, 1, 1).best.symbols == std::vector<TokenId>{1});
  CHECK(beam_search(b, {1}, 1, 1).best.symbols == std::vector<TokenId>{2});
  const ModelParams* both[] = {&a, &b};
  const BeamResult e = ensemble_decode(both, {1}, 1, 1);
  CHECK(e.best.symbols == std::vector<TokenId>{2});
  CHECK(e.best.log_prob == doctest::Approx(std::log(0.55)).epsilon(1e-12));
  const BeamResult e3 = ensemble_decode(both, {1}, 3, 1);
  CHECK(e3.best.log_prob == doctest::Approx(std::log(0.55)).epsilon(1e-12));
}

TEST_CASE("fit_to_words") {
  bool changed = true;
  CHECK(join_symbols(fit_to_words(syms("(S XX XX )S END"), 2, "S", &changed)) == "(S XX XX )S");
  CHECK_FALSE(changed);
  CHECK(join_symbols(fit_to_words(syms("(S XX XX XX )S"), 2, "S", &changed)) == "(S XX XX )S");
  CHECK(changed);
  CHECK(join_symbols(fit_to_words(syms("(S (NP XX )NP )S"), 3, "S", &changed)) == "(S (NP XX )NP XX XX )S");
  CHECK(changed);
  CHECK(join_symbols(fit_to_words({}, 2, "S", &changed)) == "(S XX XX )S");
  CHECK(join_symbols(fit_to_words(syms("(NP )NP"), 1, "ROOT")) == "(ROOT XX )ROOT");
}

TEST_CASE("tree_from_symbols repairs") {
  bool repaired = false;
  CHECK(tree_from_symbols(syms("(S XX"), {"w"}, "S", &repaired) == read_one_bracketed("(S (XX w))"));
  CHECK(repaired);
  CHECK(tree_from_symbols(syms("(S XX )S"), {"w"}, "S", &repaired) == read_one_bracketed("(S (XX w))"));
  CHECK_FALSE(repaired);
  CHECK(tree_from_symbols(syms(")NP (S (NP XX )NP XX )S"), {"a", "b"}, "S", &repaired) ==
        read_one_bracketed("(S (NP (XX a)) (XX b))"));
  CHECK(repaired);
}

TEST_CASE("parse_sentence with a rigged model emitting (S XX") {
  // first step: (S scores 10, XX 8; second step: (S 5, XX 8
  ModelParams p = constant_model(4);
  const Vocab in(VocabKind::kInput, {"UNK", "w"});
  const Vocab out(VocabKind::kOutput, {"END", "(S", ")S", "XX"});
  p.output_proj(1, 0) = 10;
  p.output_proj(3, 1) = 4;
  Parser parser{{&p}, &in, &out, 1, 2, "S"};
  const ParseResult r = parse_sentence({"w"}, parser);
  CHECK(join_symbols(r.raw_symbols) == "(S XX");
  CHECK(r.tree == read_one_bracketed("(S (XX w))"));
  CHECK(r.was_repaired);
}

TEST_CASE("parse_sentence is total on random models") {
  const Vocab in(VocabKind::kInput, {"UNK", "a", "b", "c"});
  const Vocab out(VocabKind::kOutput, {"END", "(S", ")S", "(NP", ")NP", "XX"});
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(1, 7), word(0, 4);
  const char* vocab_words[] = {"a", "b", "c", "d", "e"};
  int repaired = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams p = random_model(shape_of(1 + trial % 2, 3, 4, 6), 3000 + trial, 2.0);
    std::vector<std::string> sentence;
    for (int k = len(rng); k > 0; --k) sentence.push_back(vocab_words[word(rng)]);
    Parser parser{{&p}, &in, &out, 1 + trial % 3, std::nullopt, "S"};
    const ParseResult r = parse_sentence(sentence, parser);
    CHECK_NOTHROW(validate(r.tree));
    CHECK(words(r.tree) == sentence);
    CHECK(read_one_bracketed(write_bracketed(r.tree)) == r.tree);
    CHECK(r.trace.weights.cols() == static_cast<Eigen::Index>(sentence.size()));
    for (Eigen::Index row = 0; row < r.trace.weights.rows(); ++row) {
      CHECK(std::abs(r.trace.weights.row(row).sum() - 1.0) < 1e-6);
    }
    repaired += r.was_repaired;
  }
  CHECK(repaired > 0);
}

TEST_CASE("attention tsv") {
  AttentionTrace t;
  t.weights.resize(2, 3);
  t.weights << 0.2, 0.3, 0.5, 1, 0, 0;
  std::ostringstream out;
  write_attention_tsv(out, t, {".", "dog", "a"}, {"(S", "XX"});
  CHECK(out.str() == "\t.\tdog\ta\n(S\t0.2\t0.3\t0.5\nXX\t1\t0\t0\n");
  CHECK_THROWS(write_attention_tsv(out, t, {".", "dog"}, {"(S", "XX"}));
}

TEST_CASE("default_max_len") {
  CHECK(default_max_len(1) == 12);
  CHECK(default_max_len(5) == 20);
}
