#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "seqparse/numerics.hpp"
#include "seqparse/vocab.hpp"

namespace seqparse {

// How [d_t ; d'_t] reaches decode step t+1.
enum class FeedbackRouting {
  // A learned hidden x 2*hidden matrix maps it to the top decoder layer's
  // recurrent input; lower layers are unaffected.
  kProjectedTopRecurrent,
  // Not fed back; the top layer recurs on d_t like any other layer.
  kNone,
};

std::string_view routing_name(FeedbackRouting r);
FeedbackRouting routing_from_name(std::string_view name);

struct ModelShape {
  int layers = 3;
  int hidden = 256;
  int embed = 256;
  int input_vocab = 0;
  int output_vocab = 0;
  Real dropout_rate = 0.3;
  FeedbackRouting routing = FeedbackRouting::kProjectedTopRecurrent;

  bool operator==(const ModelShape&) const = default;
};

void validate(const ModelShape& s);

// Gate order in the stacked matrices is i, i', f, o; so the input-side
// matrix holds W1, W3, W5, W7 and the recurrent-side one W2, W4, W6, W8.
struct LstmLayerParams {
  Mat w_input;      // 4H x input size
  Mat w_recurrent;  // 4H x H
  Vec h0;           // read by encoder layers only
  Vec m0;

  int hidden() const { return static_cast<int>(w_recurrent.cols()); }
  int input_size() const { return static_cast<int>(w_input.cols()); }
  // Gate matrix W1..W8 by number.
  auto gate_matrix(int k) {
    Mat& m = (k % 2 == 1) ? w_input : w_recurrent;
    return m.middleRows(static_cast<Eigen::Index>((k - 1) / 2) * hidden(), hidden());
  }
};

struct AttentionParams {
  Vec v;      // H
  Mat w_enc;  // H x H, applied to encoder states
  Mat w_dec;  // H x H, applied to the decoder state
};

struct ModelParams {
  ModelShape shape;
  Mat input_embedding;   // input vocab x embed
  Mat symbol_embedding;  // output vocab x embed
  std::vector<LstmLayerParams> encoder;
  std::vector<LstmLayerParams> decoder;
  AttentionParams attention;
  Mat feedback;     // H x 2H; 0 x 0 under FeedbackRouting::kNone
  Mat output_proj;  // output vocab x 2H
};

ModelParams make_params(const ModelShape& shape, Rng& rng, Real init_scale = 0.08);
ModelParams zeros_like(const ModelParams& p);

// Visits every parameter array in a fixed order with (name, array&); arrays
// are Mat or Vec.
template <class Params, class F>
void for_each_array(Params& p, F&& f) {
  f(std::string_view("input_embedding"), p.input_embedding);
  f(std::string_view("symbol_embedding"), p.symbol_embedding);
  auto visit_stack = [&](auto& layers, std::string_view side) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string base = std::string(side) + "." + std::to_string(l) + ".";
      f(std::string_view(base + "w_input"), layers[l].w_input);
      f(std::string_view(base + "w_recurrent"), layers[l].w_recurrent);
      f(std::string_view(base + "h0"), layers[l].h0);
      f(std::string_view(base + "m0"), layers[l].m0);
    }
  };
  visit_stack(p.encoder, "encoder");
  visit_stack(p.decoder, "decoder");
  f(std::string_view("attention.v"), p.attention.v);
  f(std::string_view("attention.w_enc"), p.attention.w_enc);
  f(std::string_view("attention.w_dec"), p.attention.w_dec);
  f(std::string_view("feedback"), p.feedback);
  f(std::string_view("output_proj"), p.output_proj);
}

std::size_t parameter_count(const ModelParams& p);
std::vector<Real> flatten(const ModelParams& p);
void unflatten(std::span<const Real> flat, ModelParams& p);
// Throws DimensionError naming the first array whose shape differs.
void check_same_shapes(const ModelParams& a, const ModelParams& b);

// --- forward pieces ---------------------------------------------------------

struct LstmState {
  Vec h;
  Vec m;
};

LstmState lstm_step(const Vec& x, const LstmState& prev, const LstmLayerParams& p);

// Dropout masks are drawn from `rng` when training with a positive rate;
// `rng` may be null otherwise.
struct DropoutContext {
  bool train_mode = false;
  Rng* rng = nullptr;
};

struct Encoding {
  Mat memory;  // H x T_A top-layer h-sequence
  Mat keys;    // attention.w_enc * memory
  std::vector<LstmState> final_states;  // one per layer
};

// `input_ids` are already reversed.
Encoding encode(const std::vector<TokenId>& input_ids, const ModelParams& p,
                DropoutContext dropout = {});

struct Attention {
  Vec weights;  // T_A, sums to 1
  Vec context;  // H
};

Attention attend(const Encoding& enc, const Vec& d, const ModelParams& p);
Attention attend(const Mat& memory, const Vec& d, const ModelParams& p);

// Per-layer states. Under kProjectedTopRecurrent the top entry's h is the
// projected feedback vector rather than d_t.
using DecoderState = std::vector<LstmState>;

DecoderState initial_decoder_state(const Encoding& enc);

struct DecodeStep {
  Vec dist;  // over the output vocabulary
  Vec attention;
  DecoderState next;
};

DecodeStep decode_step(TokenId prev_symbol, const DecoderState& state, const Encoding& enc,
                       const ModelParams& p, DropoutContext dropout = {});

// Teacher-forced log P(target | input). `target` must end with END (id 0)
// and decoding starts from END. If `grad` is non-null, d(log P)/d(theta) is
// added into it.
Real sequence_log_prob(const std::vector<TokenId>& input_ids,
                       const std::vector<TokenId>& target, const ModelParams& p,
                       DropoutContext dropout = {}, ModelParams* grad = nullptr);

}  // namespace seqparse
