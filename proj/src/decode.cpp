#include "seqparse/decode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace seqparse {

namespace {

struct Candidate {
  std::size_t parent;
  TokenId symbol;  // -1 carries a finished hypothesis over unchanged
  Real score;
};

struct MemberStep {
  std::vector<DecodeStep> steps;
  Vec dist;
  Vec attention;
};

MemberStep step_members(std::span<const ModelParams* const> models,
                        const std::vector<Encoding>& encodings, const Hypothesis& h) {
  const TokenId prev = h.symbols.empty() ? 0 : h.symbols.back();
  MemberStep out;
  out.steps.reserve(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    out.steps.push_back(decode_step(prev, h.states[k], encodings[k], *models[k]));
    if (k == 0) {
      out.dist = out.steps.back().dist;
      out.attention = out.steps.back().attention;
    } else {
      out.dist += out.steps.back().dist;
      out.attention += out.steps.back().attention;
    }
  }
  if (models.size() > 1) {
    out.dist /= out.dist.sum();
    out.attention /= static_cast<Real>(models.size());
  }
  return out;
}

void check_members(std::span<const ModelParams* const> models) {
  if (models.empty()) throw std::invalid_argument("decode: no models");
  const ModelShape& first = models.front()->shape;
  for (const ModelParams* m : models) {
    if (m->shape.input_vocab != first.input_vocab || m->shape.output_vocab != first.output_vocab) {
      throw std::invalid_argument("ensemble: members disagree on vocabulary sizes");
    }
  }
}

AttentionTrace make_trace(const Hypothesis& h, Eigen::Index in_len) {
  AttentionTrace trace;
  trace.weights.resize(static_cast<Eigen::Index>(h.attention.size()), in_len);
  for (std::size_t r = 0; r < h.attention.size(); ++r) {
    trace.weights.row(static_cast<Eigen::Index>(r)) = h.attention[r].transpose();
  }
  return trace;
}

}  // namespace

BeamResult ensemble_decode(std::span<const ModelParams* const> models,
                           const std::vector<TokenId>& input_ids, int beam_size, int max_len) {
  if (beam_size < 1) throw std::invalid_argument("beam_search: beam_size must be >= 1");
  if (max_len < 1) throw std::invalid_argument("beam_search: max_len must be >= 1");
  check_members(models);
  std::vector<Encoding> encodings;
  encodings.reserve(models.size());
  for (const ModelParams* m : models) encodings.push_back(encode(input_ids, *m));

  std::vector<Hypothesis> beam(1);
  for (const auto& e : encodings) beam[0].states.push_back(initial_decoder_state(e));

  for (int len = 0; len < max_len && !beam.front().finished; ++len) {
    std::vector<Candidate> cands;
    std::vector<MemberStep> expansions(beam.size());
    for (std::size_t b = 0; b < beam.size(); ++b) {
      if (beam[b].finished) {
        cands.push_back({b, -1, beam[b].log_prob});
        continue;
      }
      expansions[b] = step_members(models, encodings, beam[b]);
      const Vec& dist = expansions[b].dist;
      for (Eigen::Index s = 0; s < dist.size(); ++s) {
        cands.push_back({b, static_cast<TokenId>(s), beam[b].log_prob + std::log(dist(s))});
      }
    }
    // Stable: equal scores keep generation order, which is what stepwise
    // argmax does at beam 1.
    const std::size_t keep = std::min<std::size_t>(cands.size(), static_cast<std::size_t>(beam_size));
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    std::vector<Hypothesis> next;
    next.reserve(keep);
    for (std::size_t c = 0; c < keep; ++c) {
      const Candidate& cand = cands[c];
      if (cand.symbol < 0) {
        next.push_back(beam[cand.parent]);
        continue;
      }
      const Hypothesis& parent = beam[cand.parent];
      const MemberStep& ex = expansions[cand.parent];
      Hypothesis h;
      h.symbols = parent.symbols;
      h.symbols.push_back(cand.symbol);
      h.log_prob = cand.score;
      h.states.reserve(ex.steps.size());
      for (const auto& s : ex.steps) h.states.push_back(s.next);
      h.attention = parent.attention;
      h.attention.push_back(ex.attention);
      h.finished = cand.symbol == 0;
      next.push_back(std::move(h));
    }
    beam = std::move(next);
  }
  BeamResult result;
  result.best = std::move(beam.front());
  result.trace = make_trace(result.best, static_cast<Eigen::Index>(input_ids.size()));
  return result;
}

BeamResult beam_search(const ModelParams& p, const std::vector<TokenId>& input_ids,
                       int beam_size, int max_len) {
  const ModelParams* one[] = {&p};
  return ensemble_decode(one, input_ids, beam_size, max_len);
}

std::vector<TokenId> greedy_decode(const ModelParams& p, const std::vector<TokenId>& input_ids,
                                   int max_len) {
  const Encoding enc = encode(input_ids, p);
  DecoderState state = initial_decoder_state(enc);
  std::vector<TokenId> out;
  TokenId prev = 0;
  for (int t = 0; t < max_len; ++t) {
    DecodeStep step = decode_step(prev, state, enc, p);
    Eigen::Index best = 0;
    step.dist.maxCoeff(&best);
    prev = static_cast<TokenId>(best);
    out.push_back(prev);
    state = std::move(step.next);
    if (prev == 0) break;
  }
  return out;
}

int default_max_len(std::size_t n_words) { return static_cast<int>(2 * n_words + 10); }

std::vector<LinearSymbol> fit_to_words(std::vector<LinearSymbol> symbols, std::size_t n_words,
                                       std::string_view fallback_root, bool* changed) {
  bool touched = false;
  auto end_it = std::find_if(symbols.begin(), symbols.end(),
                             [](const LinearSymbol& s) { return s.kind == LinearSymbol::Kind::kEnd; });
  if (end_it != symbols.end()) symbols.erase(end_it, symbols.end());

  std::size_t have = preterm_count(symbols);
  for (std::size_t i = symbols.size(); have > n_words && i-- > 0;) {
    if (symbols[i].kind == LinearSymbol::Kind::kPreterm) {
      symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(i));
      --have;
      touched = true;
    }
  }
  std::vector<LinearSymbol> fixed = single_root(repair(symbols), fallback_root);
  if (fixed != symbols) touched = true;
  if (have < n_words) {
    touched = true;
    if (fixed.empty()) {
      fixed = {LinearSymbol::open(std::string(fallback_root)),
               LinearSymbol::close(std::string(fallback_root))};
    }
    fixed.insert(fixed.end() - 1, n_words - have,
                 LinearSymbol::preterm(std::string(kNormalizedTag)));
  }
  if (changed) *changed = touched;
  return fixed;
}

ParseTree tree_from_symbols(const std::vector<LinearSymbol>& symbols,
                            const std::vector<std::string>& words,
                            std::string_view fallback_root, bool* was_repaired) {
  if (words.empty()) throw std::invalid_argument("parse: empty sentence");
  bool changed = false;
  const auto fitted = fit_to_words(symbols, words.size(), fallback_root, &changed);
  if (was_repaired) *was_repaired = changed;
  return delinearize(fitted, words);
}

ParseResult parse_sentence(const std::vector<std::string>& words, const Parser& parser) {
  if (!parser.input_vocab || !parser.output_vocab) {
    throw std::invalid_argument("parse_sentence: parser lacks vocabularies");
  }
  const std::vector<TokenId> ids = encode_input(words, *parser.input_vocab);
  const int max_len = parser.max_len.value_or(default_max_len(words.size()));
  BeamResult beam = ensemble_decode(parser.models, ids, parser.beam_size, max_len);
  ParseResult result;
  for (TokenId id : beam.best.symbols) {
    if (id == 0) break;
    result.raw_symbols.push_back(symbol_from_string(parser.output_vocab->token(id)));
  }
  result.tree = tree_from_symbols(result.raw_symbols, words, parser.fallback_root,
                                  &result.was_repaired);
  result.trace = std::move(beam.trace);
  return result;
}

void write_attention_tsv(std::ostream& out, const AttentionTrace& trace,
                         const std::vector<std::string>& encoder_tokens,
                         const std::vector<std::string>& output_tokens) {
  if (static_cast<Eigen::Index>(encoder_tokens.size()) != trace.weights.cols() ||
      static_cast<Eigen::Index>(output_tokens.size()) != trace.weights.rows()) {
    throw DimensionError("attention tsv: labels do not match trace " + shape_str(trace.weights));
  }
  for (const auto& tok : encoder_tokens) out << '\t' << tok;
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < trace.weights.rows(); ++r) {
    out << output_tokens[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < trace.weights.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.9g", trace.weights(r, c));
      out << '\t' << buf;
    }
    out << '\n';
  }
}

}  // namespace seqparse
