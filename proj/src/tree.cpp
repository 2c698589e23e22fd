#include "seqparse/tree.hpp"

#include <cctype>
#include <sstream>

namespace seqparse {

ParseTree ParseTree::preterminal(std::string tag, std::string word) {
  return ParseTree{std::move(tag), std::move(word), {}};
}

ParseTree ParseTree::internal(std::string label, std::vector<ParseTree> children) {
  if (children.empty()) {
    throw std::invalid_argument("internal node '" + label + "' needs children");
  }
  return ParseTree{std::move(label), {}, std::move(children)};
}

void validate(const ParseTree& t) {
  if (t.label.empty()) throw std::invalid_argument("tree node with empty label");
  if (t.is_preterminal()) {
    if (t.word.empty()) {
      throw std::invalid_argument("preterminal '" + t.label + "' has no word");
    }
    return;
  }
  if (!t.word.empty()) {
    throw std::invalid_argument("internal node '" + t.label + "' carries a word");
  }
  for (const auto& c : t.children) validate(c);
}

namespace {

void collect_words(const ParseTree& t, std::vector<std::string>& out) {
  if (t.is_preterminal()) {
    out.push_back(t.word);
    return;
  }
  for (const auto& c : t.children) collect_words(c, out);
}

}  // namespace

std::vector<std::string> words(const ParseTree& t) {
  std::vector<std::string> out;
  collect_words(t, out);
  return out;
}

std::size_t word_count(const ParseTree& t) {
  if (t.is_preterminal()) return 1;
  std::size_t n = 0;
  for (const auto& c : t.children) n += word_count(c);
  return n;
}

ParseTree normalize_pos(const ParseTree& t) {
  if (t.is_preterminal()) return ParseTree::preterminal(std::string(kNormalizedTag), t.word);
  ParseTree out{t.label, {}, {}};
  out.children.reserve(t.children.size());
  for (const auto& c : t.children) out.children.push_back(normalize_pos(c));
  return out;
}

// --- bracketed text ---------------------------------------------------------

TreeParseError::TreeParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)),
      offset_(offset) {}

namespace {

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  std::vector<ParseTree> read_all() {
    std::vector<ParseTree> trees;
    skip_space();
    while (pos_ < text_.size()) {
      if (text_[pos_] != '(') throw TreeParseError("expected '('", pos_);
      trees.push_back(unwrap(read_node()));
      skip_space();
    }
    return trees;
  }

 private:
  static bool is_delim(char c) {
    return c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_token() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect_more() const {
    if (pos_ >= text_.size()) throw TreeParseError("unexpected end of input", pos_);
  }

  // Precondition: text_[pos_] == '('. Internal nodes may have an empty label
  // here; only outer wrappers are allowed to keep it.
  ParseTree read_node() {
    const std::size_t open_at = pos_;
    ++pos_;
    skip_space();
    expect_more();
    std::string label;
    if (text_[pos_] != '(' && text_[pos_] != ')') label = read_token();
    skip_space();
    expect_more();
    if (text_[pos_] == ')') throw TreeParseError("empty constituent", open_at);
    if (text_[pos_] != '(') {
      std::string word = read_token();
      skip_space();
      expect_more();
      if (text_[pos_] != ')') throw TreeParseError("expected ')' after word", pos_);
      ++pos_;
      if (label.empty()) throw TreeParseError("preterminal without tag", open_at);
      return ParseTree::preterminal(std::move(label), std::move(word));
    }
    std::vector<ParseTree> children;
    while (true) {
      skip_space();
      expect_more();
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (text_[pos_] != '(') throw TreeParseError("expected '(' or ')'", pos_);
      const std::size_t child_at = pos_;
      children.push_back(read_node());
      if (children.back().label.empty()) {
        throw TreeParseError("unlabelled nested constituent", child_at);
      }
    }
    return ParseTree{std::move(label), {}, std::move(children)};
  }

  ParseTree unwrap(ParseTree t) const {
    while (t.label.empty()) {
      if (t.children.size() != 1) {
        throw TreeParseError("unlabelled wrapper with several children", pos_);
      }
      ParseTree inner = std::move(t.children.front());
      t = std::move(inner);
    }
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void write_to(const ParseTree& t, std::string& out) {
  out += '(';
  out += t.label;
  if (t.is_preterminal()) {
    out += ' ';
    out += t.word;
  } else {
    for (const auto& c : t.children) {
      out += ' ';
      write_to(c, out);
    }
  }
  out += ')';
}

}  // namespace

std::vector<ParseTree> read_bracketed(std::string_view text) {
  return BracketReader(text).read_all();
}

ParseTree read_one_bracketed(std::string_view text) {
  auto trees = read_bracketed(text);
  if (trees.size() != 1) {
    throw TreeParseError("expected exactly one tree, found " + std::to_string(trees.size()),
                         text.size());
  }
  return std::move(trees.front());
}

std::string write_bracketed(const ParseTree& t) {
  std::string out;
  write_to(t, out);
  return out;
}

// --- linearization ----------------------------------------------------------

std::string to_string(const LinearSymbol& s) {
  switch (s.kind) {
    case LinearSymbol::Kind::kOpen:
      return "(" + s.label;
    case LinearSymbol::Kind::kClose:
      return ")" + s.label;
    case LinearSymbol::Kind::kPreterm:
      return s.label;
    case LinearSymbol::Kind::kEnd:
      break;
  }
  return std::string(kEndToken);
}

LinearSymbol symbol_from_string(std::string_view token) {
  if (token.empty()) throw std::invalid_argument("empty symbol token");
  if (token == kEndToken) return LinearSymbol::end();
  if (token.size() > 1 && token.front() == '(') {
    return LinearSymbol::open(std::string(token.substr(1)));
  }
  if (token.size() > 1 && token.front() == ')') {
    return LinearSymbol::close(std::string(token.substr(1)));
  }
  return LinearSymbol::preterm(std::string(token));
}

std::string join_symbols(const std::vector<LinearSymbol>& symbols) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += ' ';
    out += to_string(symbols[i]);
  }
  return out;
}

std::vector<LinearSymbol> split_symbols(std::string_view line) {
  std::vector<LinearSymbol> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(symbol_from_string(tok));
  return out;
}

namespace {

void linearize_into(const ParseTree& t, std::vector<LinearSymbol>& out) {
  if (t.is_preterminal()) {
    out.push_back(LinearSymbol::preterm(t.label));
    return;
  }
  out.push_back(LinearSymbol::open(t.label));
  for (const auto& c : t.children) linearize_into(c, out);
  out.push_back(LinearSymbol::close(t.label));
}

}  // namespace

std::vector<LinearSymbol> linearize(const ParseTree& t) {
  std::vector<LinearSymbol> out;
  linearize_into(t, out);
  out.push_back(LinearSymbol::end());
  return out;
}

std::size_t preterm_count(const std::vector<LinearSymbol>& symbols) {
  std::size_t n = 0;
  for (const auto& s : symbols) {
    if (s.kind == LinearSymbol::Kind::kEnd) break;
    if (s.kind == LinearSymbol::Kind::kPreterm) ++n;
  }
  return n;
}

ParseTree delinearize(const std::vector<LinearSymbol>& symbols,
                      const std::vector<std::string>& words) {
  const std::size_t n_pre = preterm_count(symbols);
  if (n_pre != words.size()) {
    throw ArityMismatch(std::to_string(n_pre) + " preterminal symbols for " +
                        std::to_string(words.size()) + " words");
  }
  std::vector<ParseTree> stack;
  std::vector<ParseTree> roots;
  std::size_t next_word = 0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const auto& s = symbols[i];
    const std::string where = " at symbol " + std::to_string(i);
    switch (s.kind) {
      case LinearSymbol::Kind::kEnd:
        i = symbols.size();
        break;
      case LinearSymbol::Kind::kOpen:
        if (!roots.empty()) throw MalformedSequence("second root" + where);
        stack.push_back(ParseTree{s.label, {}, {}});
        break;
      case LinearSymbol::Kind::kPreterm:
        if (stack.empty()) throw MalformedSequence("preterminal outside constituent" + where);
        stack.back().children.push_back(ParseTree::preterminal(s.label, words[next_word++]));
        break;
      case LinearSymbol::Kind::kClose: {
        if (stack.empty()) throw MalformedSequence("unmatched " + to_string(s) + where);
        if (stack.back().label != s.label) {
          throw MalformedSequence(to_string(s) + " closes (" + stack.back().label + where);
        }
        if (stack.back().children.empty()) throw MalformedSequence("empty constituent" + where);
        ParseTree done = std::move(stack.back());
        stack.pop_back();
        if (stack.empty()) {
          roots.push_back(std::move(done));
        } else {
          stack.back().children.push_back(std::move(done));
        }
        break;
      }
    }
  }
  if (!stack.empty()) throw MalformedSequence("(" + stack.back().label + " never closed");
  if (roots.empty()) throw MalformedSequence("no constituent");
  return std::move(roots.front());
}

bool is_well_formed(const std::vector<LinearSymbol>& symbols) {
  try {
    std::vector<std::string> placeholder(preterm_count(symbols), "w");
    delinearize(symbols, placeholder);
    return true;
  } catch (const MalformedSequence&) {
    return false;
  }
}

std::vector<LinearSymbol> repair(const std::vector<LinearSymbol>& symbols) {
  std::vector<LinearSymbol> out;
  std::vector<std::string> open;
  for (const auto& s : symbols) {
    if (s.kind == LinearSymbol::Kind::kEnd) break;
    switch (s.kind) {
      case LinearSymbol::Kind::kEnd:
        break;
      case LinearSymbol::Kind::kOpen:
        open.push_back(s.label);
        out.push_back(s);
        break;
      case LinearSymbol::Kind::kPreterm:
        out.push_back(s);
        break;
      case LinearSymbol::Kind::kClose:
        if (!open.empty() && open.back() == s.label) {
          open.pop_back();
          out.push_back(s);
        }
        break;
    }
  }
  for (auto it = open.rbegin(); it != open.rend(); ++it) out.push_back(LinearSymbol::close(*it));
  return out;
}

std::vector<LinearSymbol> single_root(const std::vector<LinearSymbol>& balanced,
                                      std::string_view fallback_root) {
  std::vector<LinearSymbol> out;
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // (position, children)
  for (const auto& s : balanced) {
    switch (s.kind) {
      case LinearSymbol::Kind::kEnd:
        break;
      case LinearSymbol::Kind::kOpen:
        stack.emplace_back(out.size(), 0);
        out.push_back(s);
        break;
      case LinearSymbol::Kind::kPreterm:
        out.push_back(s);
        if (!stack.empty()) ++stack.back().second;
        break;
      case LinearSymbol::Kind::kClose: {
        if (stack.empty()) throw MalformedSequence("single_root: input is not balanced");
        const auto [at, children] = stack.back();
        stack.pop_back();
        if (children == 0) {
          out.erase(out.begin() + static_cast<std::ptrdiff_t>(at));
        } else {
          out.push_back(s);
          if (!stack.empty()) ++stack.back().second;
        }
        break;
      }
    }
  }
  if (!stack.empty()) throw MalformedSequence("single_root: input is not balanced");

  std::size_t top_level = 0;
  bool bare_preterm = false;
  std::string first_label;
  int depth = 0;
  for (const auto& s : out) {
    if (s.kind == LinearSymbol::Kind::kOpen) {
      if (depth == 0) {
        ++top_level;
        if (first_label.empty()) first_label = s.label;
      }
      ++depth;
    } else if (s.kind == LinearSymbol::Kind::kClose) {
      --depth;
    } else if (depth == 0) {
      ++top_level;
      bare_preterm = true;
    }
  }
  if (top_level > 1 || bare_preterm) {
    const std::string root = first_label.empty() ? std::string(fallback_root) : first_label;
    out.insert(out.begin(), LinearSymbol::open(root));
    out.push_back(LinearSymbol::close(root));
  }
  return out;
}

}  // namespace seqparse
