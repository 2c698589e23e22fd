#include "seqparse/corpusgen.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace seqparse {

namespace {

constexpr std::string_view kDefaultGrammar = R"(# Default toy grammar: six constituent labels, 40 words.
start S
max_depth 10

S      -> NP VP .      : 1
S_EMB  -> NP VP        : 1
NP     -> DT NN        : 5
NP     -> DT ADJP NN   : 2
NP     -> NNP          : 2
NP     -> DT NN PP     : 1.5
ADJP   -> JJ           : 3
ADJP   -> RB JJ        : 1
PP     -> IN NP        : 1
VP     -> VBD NP       : 3
VP     -> VBI          : 1.5
VP     -> VBI PP       : 1.5
VP     -> VBC ADJP     : 1
VP     -> VBS SBAR     : 0.7
SBAR   -> C S_EMB      : 1

tag DT  : the a every
tag NN  : dog cat man woman park telescope house idea
tag NNP : John Mary Alice Bob
tag JJ  : big small happy old red
tag RB  : very quite
tag IN  : in with near on
tag VBD : saw liked chased found
tag VBI : slept ran walked
tag VBC : was seemed
tag VBS : said thought believed
tag C   : that
tag .   : .
)";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string_view ToyGrammar::default_grammar_text() { return kDefaultGrammar; }

ToyGrammar ToyGrammar::default_grammar() { return parse(kDefaultGrammar); }

ToyGrammar ToyGrammar::parse(std::string_view text) {
  ToyGrammar g;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("grammar line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    auto words = split_ws(line);
    if (words[0] == "start") {
      if (words.size() != 2) fail("expected 'start SYMBOL'");
      g.start_ = words[1];
    } else if (words[0] == "max_depth") {
      if (words.size() != 2) fail("expected 'max_depth N'");
      g.max_depth_ = std::stoi(words[1]);
    } else if (words[0] == "tag") {
      const auto colon = line.find(':');
      if (colon == std::string::npos) fail("expected 'tag NAME : words...'");
      auto name = split_ws(line.substr(3, colon - 3));
      auto lex = split_ws(line.substr(colon + 1));
      if (name.size() != 1 || lex.empty()) fail("expected 'tag NAME : words...'");
      auto& entry = g.lexicon_[name[0]];
      entry.insert(entry.end(), lex.begin(), lex.end());
    } else {
      const auto arrow = line.find("->");
      if (arrow == std::string::npos) fail("unrecognised directive");
      Production p;
      auto lhs = split_ws(line.substr(0, arrow));
      if (lhs.size() != 1) fail("production needs exactly one left-hand symbol");
      p.lhs = lhs[0];
      std::string rhs = line.substr(arrow + 2);
      const auto colon = rhs.rfind(" : ");
      if (colon != std::string::npos) {
        p.weight = std::stod(rhs.substr(colon + 3));
        rhs = rhs.substr(0, colon);
      }
      p.rhs = split_ws(rhs);
      if (p.rhs.empty()) fail("empty right-hand side");
      if (!(p.weight > 0)) fail("weights must be positive");
      g.productions_.push_back(std::move(p));
    }
  }
  g.finish();
  return g;
}

void ToyGrammar::finish() {
  if (start_.empty()) throw std::invalid_argument("grammar: no start symbol");
  if (max_depth_ < 2) throw std::invalid_argument("grammar: max_depth must be >= 2");
  for (std::size_t i = 0; i < productions_.size(); ++i) {
    by_lhs_[productions_[i].lhs].push_back(i);
  }
  for (const auto& [tag, words] : lexicon_) {
    if (by_lhs_.count(tag)) throw std::invalid_argument("grammar: '" + tag + "' is both tag and nonterminal");
  }
  for (const auto& p : productions_) {
    for (const auto& s : p.rhs) {
      if (!by_lhs_.count(s) && !lexicon_.count(s)) {
        throw std::invalid_argument("grammar: symbol '" + s + "' has no productions or lexicon");
      }
    }
  }
  if (!by_lhs_.count(start_)) throw std::invalid_argument("grammar: start symbol has no productions");
  // Least fixed point of subtree heights; tags are height 1.
  constexpr int kInf = 1 << 20;
  for (const auto& [nt, idx] : by_lhs_) height_[nt] = kInf;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [nt, idx] : by_lhs_) {
      for (std::size_t i : idx) {
        const int h = production_height(productions_[i]);
        if (h < height_[nt]) {
          height_[nt] = h;
          changed = true;
        }
      }
    }
  }
  for (const auto& [nt, h] : height_) {
    if (h >= kInf) throw std::invalid_argument("grammar: '" + nt + "' can never reach words");
  }
  if (height_[start_] > max_depth_) {
    throw std::invalid_argument("grammar: start symbol needs depth " + std::to_string(height_[start_]) +
                                " but max_depth is " + std::to_string(max_depth_));
  }
}

int ToyGrammar::min_height(const std::string& symbol) const {
  if (lexicon_.count(symbol)) return 1;
  return height_.at(symbol);
}

int ToyGrammar::production_height(const Production& p) const {
  int h = 0;
  for (const auto& s : p.rhs) h = std::max(h, min_height(s));
  return h + 1;
}

std::string ToyGrammar::display_label(const std::string& nonterminal) const {
  const auto us = nonterminal.find('_');
  return us == std::string::npos || us == 0 ? nonterminal : nonterminal.substr(0, us);
}

std::vector<std::string> ToyGrammar::labels() const {
  std::set<std::string> out;
  for (const auto& [nt, idx] : by_lhs_) out.insert(display_label(nt));
  return {out.begin(), out.end()};
}

ParseTree ToyGrammar::expand(const std::string& symbol, int depth, Rng& rng) const {
  if (auto lex = lexicon_.find(symbol); lex != lexicon_.end()) {
    std::uniform_int_distribution<std::size_t> pick(0, lex->second.size() - 1);
    return ParseTree::preterminal(symbol, lex->second[pick(rng)]);
  }
  const int budget = max_depth_ - depth + 1;
  std::vector<std::size_t> eligible;
  std::vector<double> weights;
  for (std::size_t i : by_lhs_.at(symbol)) {
    if (production_height(productions_[i]) <= budget) {
      eligible.push_back(i);
      weights.push_back(productions_[i].weight);
    }
  }
  std::discrete_distribution<std::size_t> choose(weights.begin(), weights.end());
  const Production& p = productions_[eligible[choose(rng)]];
  std::vector<ParseTree> children;
  children.reserve(p.rhs.size());
  for (const auto& s : p.rhs) children.push_back(expand(s, depth + 1, rng));
  return ParseTree::internal(display_label(symbol), std::move(children));
}

ParseTree ToyGrammar::sample(Rng& rng) const { return expand(start_, 1, rng); }

ParseTree sample_tree(const ToyGrammar& g, std::uint64_t seed) {
  Rng rng(seed);
  return g.sample(rng);
}

ToyCorpus make_corpus(const ToyGrammar& g, std::size_t n_train, std::size_t n_dev,
                      std::size_t n_test, std::uint64_t seed) {
  Rng rng(seed);
  std::set<std::string> seen;
  const std::size_t total = n_train + n_dev + n_test;
  const std::size_t max_attempts = 1000 * (total + 1);
  std::size_t attempts = 0;
  auto fill = [&](std::vector<ParseTree>& split, std::size_t n) {
    while (split.size() < n) {
      if (++attempts > max_attempts) {
        throw std::runtime_error("make_corpus: grammar cannot supply " + std::to_string(total) +
                                 " distinct trees");
      }
      ParseTree t = g.sample(rng);
      if (seen.insert(write_bracketed(t)).second) split.push_back(std::move(t));
    }
  };
  ToyCorpus c;
  fill(c.train, n_train);
  fill(c.dev, n_dev);
  fill(c.test, n_test);
  return c;
}

std::string trees_to_text(const std::vector<ParseTree>& trees) {
  std::string out;
  for (const auto& t : trees) {
    out += write_bracketed(t);
    out += '\n';
  }
  return out;
}

void write_corpus(const ToyCorpus& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::pair<const char*, const std::vector<ParseTree>*> splits[] = {
      {"train.trees", &c.train}, {"dev.trees", &c.dev}, {"test.trees", &c.test}};
  for (const auto& [name, trees] : splits) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << trees_to_text(*trees);
  }
}

}  // namespace seqparse
