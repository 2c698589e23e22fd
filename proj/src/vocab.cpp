#include "seqparse/vocab.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "seqparse/tree.hpp"

namespace seqparse {

namespace {

std::string_view reserved_token(VocabKind kind) {
  return kind == VocabKind::kInput ? kUnkToken : kEndToken;
}

std::string_view kind_name(VocabKind kind) {
  return kind == VocabKind::kInput ? "input" : "output";
}

}  // namespace

Vocab::Vocab(VocabKind kind, std::vector<std::string> tokens)
    : kind_(kind), tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.front() != reserved_token(kind_)) {
    throw std::invalid_argument("vocab: id 0 must be " + std::string(reserved_token(kind_)));
  }
  const std::string_view forbidden = reserved_token(
      kind_ == VocabKind::kInput ? VocabKind::kOutput : VocabKind::kInput);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] == forbidden) {
      throw std::invalid_argument("vocab: " + std::string(forbidden) + " not allowed in " +
                                  std::string(kind_name(kind_)) + " vocab");
    }
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw std::invalid_argument("vocab: duplicate token '" + tokens_[i] + "'");
    }
  }
}

bool Vocab::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

TokenId Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it != index_.end()) return it->second;
  if (kind_ == VocabKind::kInput) return 0;
  throw std::out_of_range("output vocab has no symbol '" + std::string(token) + "'");
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("vocab id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

TokenId Vocab::unk_id() const {
  if (kind_ != VocabKind::kInput) throw std::logic_error("output vocab has no UNK");
  return 0;
}

TokenId Vocab::end_id() const {
  if (kind_ != VocabKind::kOutput) throw std::logic_error("input vocab has no END");
  return 0;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t cap,
                  VocabKind kind) {
  if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  if (cap < 1) throw std::invalid_argument("build_vocab: cap below reserved entries");
  const std::string_view reserved = reserved_token(kind);
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpus)
    for (const auto& tok : seq)
      if (tok != reserved) ++counts[tok];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // std::map order is lexicographic, so a stable sort on count keeps ties sorted.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens{std::string(reserved)};
  for (const auto& [tok, n] : ranked) {
    if (tokens.size() >= cap) break;
    tokens.push_back(tok);
  }
  return Vocab(kind, std::move(tokens));
}

std::vector<TokenId> encode_input(const std::vector<std::string>& words, const Vocab& v) {
  if (v.kind() != VocabKind::kInput) throw std::invalid_argument("encode_input: output vocab");
  if (words.empty()) throw std::invalid_argument("encode_input: empty sentence");
  std::vector<TokenId> ids;
  ids.reserve(words.size());
  for (auto it = words.rbegin(); it != words.rend(); ++it) ids.push_back(v.id(*it));
  return ids;
}

void write_vocab(std::ostream& out, const Vocab& v) {
  out << "seqparse-vocab " << kind_name(v.kind()) << " reserved=" << v.tokens().front()
      << "@0 size=" << v.size() << "\n";
  for (const auto& t : v.tokens()) out << t << "\n";
}

Vocab read_vocab(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("vocab file: missing header");
  std::istringstream hs(header);
  std::string magic, kind, reserved, size_field;
  hs >> magic >> kind >> reserved >> size_field;
  if (magic != "seqparse-vocab" || (kind != "input" && kind != "output")) {
    throw std::runtime_error("vocab file: bad header '" + header + "'");
  }
  std::size_t expected = 0;
  if (size_field.rfind("size=", 0) == 0) expected = std::stoul(size_field.substr(5));
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    tokens.push_back(line);
  }
  if (expected != 0 && tokens.size() != expected) {
    throw std::runtime_error("vocab file: header says " + std::to_string(expected) +
                             " tokens, found " + std::to_string(tokens.size()));
  }
  return Vocab(kind == "input" ? VocabKind::kInput : VocabKind::kOutput, std::move(tokens));
}

Mat load_pretrained(std::istream& in, const Vocab& v, std::size_t embed_size, Rng& rng,
                    PretrainedLoadStats* stats) {
  const auto dim = static_cast<Eigen::Index>(embed_size);
  Mat emb(static_cast<Eigen::Index>(v.size()), dim);
  init_uniform(emb, 0.08, rng);
  std::vector<bool> seen(v.size(), false);
  PretrainedLoadStats local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    std::vector<Real> values;
    Real x;
    while (ls >> x) values.push_back(x);
    if (!ls.eof()) {
      throw std::runtime_error("embedding file line " + std::to_string(line_no) +
                               ": non-numeric value");
    }
    // word2vec text output starts with "<count> <dim>".
    if (line_no == 1 && values.size() == 1 && word.find_first_not_of("0123456789") == std::string::npos) {
      continue;
    }
    if (values.size() != embed_size) {
      throw std::runtime_error("embedding file line " + std::to_string(line_no) + ": " +
                               std::to_string(values.size()) + " values, expected " +
                               std::to_string(embed_size));
    }
    if (!v.contains(word)) continue;
    const auto row = static_cast<std::size_t>(v.id(word));
    if (seen[row]) {
      local.warnings.push_back("embedding file line " + std::to_string(line_no) +
                               ": duplicate word '" + word + "', last occurrence wins");
    }
    seen[row] = true;
    for (Eigen::Index j = 0; j < dim; ++j) emb(static_cast<Eigen::Index>(row), j) = values[static_cast<std::size_t>(j)];
  }
  local.copied = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
  local.random = v.size() - local.copied;
  if (stats) *stats = std::move(local);
  return emb;
}

}  // namespace seqparse
