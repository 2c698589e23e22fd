#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqparse/numerics.hpp"

namespace seqparse {

using TokenId = int;

enum class VocabKind { kInput, kOutput };

inline constexpr std::string_view kUnkToken = "UNK";

// Dense bijection between tokens and ids. Input vocabularies reserve id 0 for
// UNK; output vocabularies reserve id 0 for END.
class Vocab {
 public:
  Vocab() = default;
  // Builds from an explicit id-ordered token list; entry 0 must be the
  // reserved token of `kind`.
  Vocab(VocabKind kind, std::vector<std::string> tokens);

  VocabKind kind() const { return kind_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool contains(std::string_view token) const;
  // Unknown tokens map to UNK in an input vocabulary and throw otherwise.
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;

  TokenId unk_id() const;
  TokenId end_id() const;

  bool operator==(const Vocab& o) const { return kind_ == o.kind_ && tokens_ == o.tokens_; }

 private:
  VocabKind kind_ = VocabKind::kInput;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Most frequent first, ties broken lexicographically; at most `cap` entries
// including the reserved one.
Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus, std::size_t cap,
                  VocabKind kind);

// Maps words to ids (OOV -> UNK) and reverses the order.
std::vector<TokenId> encode_input(const std::vector<std::string>& words, const Vocab& v);

// Header line "seqparse-vocab <kind> reserved=<token>@0 size=<n>", then one
// token per line in id order.
void write_vocab(std::ostream& out, const Vocab& v);
Vocab read_vocab(std::istream& in);

struct PretrainedLoadStats {
  std::size_t copied = 0;
  std::size_t random = 0;
  std::vector<std::string> warnings;
};

// Reads word2vec text vectors ("word v1 ... vE" per line; an optional
// "<count> <dim>" first line is skipped). Vocab rows missing from the file
// are drawn from U[-0.08, 0.08].
Mat load_pretrained(std::istream& in, const Vocab& v, std::size_t embed_size, Rng& rng,
                    PretrainedLoadStats* stats = nullptr);

}  // namespace seqparse
