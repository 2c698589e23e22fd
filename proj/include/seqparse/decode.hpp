#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqparse/model.hpp"
#include "seqparse/tree.hpp"
#include "seqparse/vocab.hpp"

namespace seqparse {

struct Hypothesis {
  std::vector<TokenId> symbols;  // includes the final END once finished
  Real log_prob = 0;
  std::vector<DecoderState> states;  // one per ensemble member
  std::vector<Vec> attention;        // one row per emitted symbol
  bool finished = false;
};

// One row per output step, one column per (reversed) input position.
struct AttentionTrace {
  Mat weights;
};

struct BeamResult {
  Hypothesis best;
  AttentionTrace trace;
};

// Beam search without length normalisation. Finished hypotheses stay in the
// beam and compete on total log probability; search stops once the best
// hypothesis is finished or after `max_len` symbols.
BeamResult beam_search(const ModelParams& p, const std::vector<TokenId>& input_ids,
                       int beam_size, int max_len);

// Members' per-step distributions are averaged arithmetically.
BeamResult ensemble_decode(std::span<const ModelParams* const> models,
                           const std::vector<TokenId>& input_ids, int beam_size, int max_len);

// Stepwise argmax; the reference beam_size == 1 must reproduce.
std::vector<TokenId> greedy_decode(const ModelParams& p, const std::vector<TokenId>& input_ids,
                                   int max_len);

int default_max_len(std::size_t n_words);

struct Parser {
  std::vector<const ModelParams*> models;
  const Vocab* input_vocab = nullptr;
  const Vocab* output_vocab = nullptr;
  int beam_size = 10;
  std::optional<int> max_len;  // default_max_len when unset
  std::string fallback_root = "S";
};

struct ParseResult {
  ParseTree tree;
  bool was_repaired = false;
  std::vector<LinearSymbol> raw_symbols;  // as decoded, END stripped
  AttentionTrace trace;
};

// Too many preterminals: trailing surplus ones are dropped. Too few: the
// leftover words are attached under XX at the end of the root.
std::vector<LinearSymbol> fit_to_words(std::vector<LinearSymbol> symbols, std::size_t n_words,
                                       std::string_view fallback_root, bool* changed = nullptr);

// Total: always yields a valid tree over exactly `words`.
ParseTree tree_from_symbols(const std::vector<LinearSymbol>& symbols,
                            const std::vector<std::string>& words,
                            std::string_view fallback_root, bool* was_repaired = nullptr);

ParseResult parse_sentence(const std::vector<std::string>& words, const Parser& parser);

// Header: a leading empty cell then the encoder-order input tokens. Each row:
// the emitted output symbol then its attention weights.
void write_attention_tsv(std::ostream& out, const AttentionTrace& trace,
                         const std::vector<std::string>& encoder_tokens,
                         const std::vector<std::string>& output_tokens);

}  // namespace seqparse
