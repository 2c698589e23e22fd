#include "seqparse/model.hpp"

#include <cmath>
#include <sstream>

namespace seqparse {

std::string_view routing_name(FeedbackRouting r) {
  return r == FeedbackRouting::kProjectedTopRecurrent ? "projected_top_recurrent" : "none";
}

FeedbackRouting routing_from_name(std::string_view name) {
  if (name == "projected_top_recurrent") return FeedbackRouting::kProjectedTopRecurrent;
  if (name == "none") return FeedbackRouting::kNone;
  throw std::invalid_argument("unknown feedback routing '" + std::string(name) + "'");
}

void validate(const ModelShape& s) {
  if (s.layers < 1 || s.hidden < 1 || s.embed < 1) {
    throw std::invalid_argument("model shape: layers, hidden and embed must be positive");
  }
  if (s.input_vocab < 1 || s.output_vocab < 1) {
    throw std::invalid_argument("model shape: vocabularies must be nonempty");
  }
  if (!(s.dropout_rate >= 0 && s.dropout_rate < 1)) {
    throw std::invalid_argument("model shape: dropout rate must lie in [0, 1)");
  }
}

ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  for_each_array(z, [](std::string_view, auto& a) { a.setZero(); });
  return z;
}

ModelParams make_params(const ModelShape& shape, Rng& rng, Real init_scale) {
  validate(shape);
  const Eigen::Index h = shape.hidden;
  const Eigen::Index e = shape.embed;
  ModelParams p;
  p.shape = shape;
  p.input_embedding = Mat(shape.input_vocab, e);
  p.symbol_embedding = Mat(shape.output_vocab, e);
  auto make_stack = [&](std::vector<LstmLayerParams>& layers) {
    layers.resize(static_cast<std::size_t>(shape.layers));
    for (std::size_t l = 0; l < layers.size(); ++l) {
      layers[l].w_input = Mat(4 * h, l == 0 ? e : h);
      layers[l].w_recurrent = Mat(4 * h, h);
      layers[l].h0 = Vec::Zero(h);
      layers[l].m0 = Vec::Zero(h);
    }
  };
  make_stack(p.encoder);
  make_stack(p.decoder);
  p.attention.v = Vec(h);
  p.attention.w_enc = Mat(h, h);
  p.attention.w_dec = Mat(h, h);
  p.feedback = shape.routing == FeedbackRouting::kProjectedTopRecurrent ? Mat(h, 2 * h) : Mat();
  p.output_proj = Mat(shape.output_vocab, 2 * h);
  for_each_array(p, [&](std::string_view name, auto& a) {
    if (name.ends_with(".h0") || name.ends_with(".m0")) return;
    init_uniform(a, init_scale, rng);
  });
  return p;
}

std::size_t parameter_count(const ModelParams& p) {
  std::size_t n = 0;
  for_each_array(p, [&](std::string_view, const auto& a) { n += static_cast<std::size_t>(a.size()); });
  return n;
}

std::vector<Real> flatten(const ModelParams& p) {
  std::vector<Real> out;
  out.reserve(parameter_count(p));
  for_each_array(p, [&](std::string_view, const auto& a) {
    out.insert(out.end(), a.data(), a.data() + a.size());
  });
  return out;
}

void unflatten(std::span<const Real> flat, ModelParams& p) {
  if (flat.size() != parameter_count(p)) {
    throw DimensionError("unflatten: " + std::to_string(flat.size()) + " values for " +
                         std::to_string(parameter_count(p)) + " parameters");
  }
  std::size_t at = 0;
  for_each_array(p, [&](std::string_view, auto& a) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), a.size(), a.data());
    at += static_cast<std::size_t>(a.size());
  });
}

void check_same_shapes(const ModelParams& a, const ModelParams& b) {
  std::vector<std::pair<std::string, std::pair<Eigen::Index, Eigen::Index>>> sa, sb;
  for_each_array(a, [&](std::string_view n, const auto& x) { sa.push_back({std::string(n), {x.rows(), x.cols()}}); });
  for_each_array(b, [&](std::string_view n, const auto& x) { sb.push_back({std::string(n), {x.rows(), x.cols()}}); });
  if (sa.size() != sb.size()) {
    throw DimensionError("parameter sets differ in layer count");
  }
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (sa[i] != sb[i]) {
      std::ostringstream os;
      os << sa[i].first << ": " << sa[i].second.first << "x" << sa[i].second.second << " vs "
         << sb[i].second.first << "x" << sb[i].second.second;
      throw DimensionError(os.str());
    }
  }
}

namespace {

struct StepCache {
  Vec x;
  Vec h_prev;
  Vec m_prev;
  Vec gates;  // activated i, i', f, o
  Vec m;
  Vec h;
};

StepCache lstm_forward(const Vec& x, const Vec& h_prev, const Vec& m_prev,
                       const LstmLayerParams& p) {
  const Eigen::Index h = p.hidden();
  if (x.size() != p.w_input.cols() || h_prev.size() != h || m_prev.size() != h ||
      p.w_input.rows() != 4 * h) {
    std::ostringstream os;
    os << "lstm_step: x[" << x.size() << "], h[" << h_prev.size() << "], m[" << m_prev.size()
       << "] against W_input " << shape_str(p.w_input) << ", W_recurrent "
       << shape_str(p.w_recurrent);
    throw DimensionError(os.str());
  }
  StepCache c;
  c.x = x;
  c.h_prev = h_prev;
  c.m_prev = m_prev;
  Vec z = affine(p.w_input, x, p.w_recurrent, h_prev);
  c.gates.resize(4 * h);
  c.gates.segment(0, h) = sigm(Vec(z.segment(0, h)));
  c.gates.segment(h, h) = z.segment(h, h).array().tanh();
  c.gates.segment(2 * h, h) = sigm(Vec(z.segment(2 * h, h)));
  c.gates.segment(3 * h, h) = sigm(Vec(z.segment(3 * h, h)));
  c.m = m_prev.cwiseProduct(c.gates.segment(2 * h, h)) +
        c.gates.segment(0, h).cwiseProduct(c.gates.segment(h, h));
  c.h = c.m.cwiseProduct(c.gates.segment(3 * h, h));
  return c;
}

// `dm` carries dL/dm_t in and dL/dm_{t-1} out.
void lstm_backward(const StepCache& c, const LstmLayerParams& p, const Vec& dh, Vec& dm,
                   LstmLayerParams& g, Vec* dx, Vec& dh_prev) {
  const Eigen::Index h = p.hidden();
  const auto i = c.gates.segment(0, h).array();
  const auto ic = c.gates.segment(h, h).array();
  const auto f = c.gates.segment(2 * h, h).array();
  const auto o = c.gates.segment(3 * h, h).array();
  const Vec dm_total = dm + dh.cwiseProduct(c.gates.segment(3 * h, h));
  Vec dz(4 * h);
  dz.segment(0, h) = dm_total.array() * ic * i * (1 - i);
  dz.segment(h, h) = dm_total.array() * i * (1 - ic.square());
  dz.segment(2 * h, h) = dm_total.array() * c.m_prev.array() * f * (1 - f);
  dz.segment(3 * h, h) = dh.array() * c.m.array() * o * (1 - o);
  g.w_input.noalias() += dz * c.x.transpose();
  g.w_recurrent.noalias() += dz * c.h_prev.transpose();
  if (dx) dx->noalias() = p.w_input.transpose() * dz;
  dh_prev.noalias() = p.w_recurrent.transpose() * dz;
  dm = dm_total.cwiseProduct(c.gates.segment(2 * h, h));
}

bool dropout_active(const ModelParams& p, DropoutContext dc) {
  if (!dc.train_mode || p.shape.dropout_rate <= 0) return false;
  if (!dc.rng) throw std::invalid_argument("dropout in train mode needs an rng");
  return true;
}

// Inverted dropout: kept entries are scaled by 1/(1-rate).
Vec draw_mask(Eigen::Index n, Real rate, Rng& rng) {
  std::uniform_real_distribution<Real> u(0.0, 1.0);
  Vec mask(n);
  const Real keep = 1.0 / (1.0 - rate);
  for (Eigen::Index k = 0; k < n; ++k) mask(k) = u(rng) < rate ? 0.0 : keep;
  return mask;
}

struct EncoderTape {
  std::vector<std::vector<StepCache>> steps;  // [layer][t]
  std::vector<std::vector<Vec>> masks;        // [layer][t], layers below the top
};

Encoding run_encoder(const std::vector<TokenId>& ids, const ModelParams& p, DropoutContext dc,
                     EncoderTape* tape) {
  if (ids.empty()) throw std::invalid_argument("encode: empty input");
  for (TokenId id : ids) {
    if (id < 0 || id >= p.input_embedding.rows()) {
      throw std::out_of_range("encode: input id " + std::to_string(id) + " outside vocab of " +
                              std::to_string(p.input_embedding.rows()));
    }
  }
  const bool drop = dropout_active(p, dc);
  const std::size_t layers = p.encoder.size();
  const std::size_t steps = ids.size();
  std::vector<Vec> inputs(steps);
  for (std::size_t t = 0; t < steps; ++t) inputs[t] = p.input_embedding.row(ids[t]).transpose();
  if (tape) {
    tape->steps.assign(layers, {});
    tape->masks.assign(layers, {});
  }
  Encoding enc;
  enc.final_states.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& layer = p.encoder[l];
    LstmState s{layer.h0, layer.m0};
    std::vector<Vec> outs(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      StepCache c = lstm_forward(inputs[t], s.h, s.m, layer);
      s = {c.h, c.m};
      outs[t] = c.h;
      if (tape) tape->steps[l].push_back(std::move(c));
    }
    enc.final_states[l] = s;
    if (drop && l + 1 < layers) {
      for (std::size_t t = 0; t < steps; ++t) {
        Vec mask = draw_mask(outs[t].size(), p.shape.dropout_rate, *dc.rng);
        outs[t] = outs[t].cwiseProduct(mask);
        if (tape) tape->masks[l].push_back(std::move(mask));
      }
    }
    inputs = std::move(outs);
  }
  const Eigen::Index h = p.shape.hidden;
  enc.memory.resize(h, static_cast<Eigen::Index>(steps));
  for (std::size_t t = 0; t < steps; ++t) enc.memory.col(static_cast<Eigen::Index>(t)) = inputs[t];
  enc.keys = p.attention.w_enc * enc.memory;
  return enc;
}

struct DecoderStepTape {
  std::vector<StepCache> layers;
  std::vector<Vec> masks;  // empty entries when dropout is off
  Mat squashed;            // tanh(keys + w_dec d), H x T_A
  Vec weights;
  Vec concat;  // [d ; context]
  Vec dist;
};

struct StepOutput {
  DecodeStep step;
  Vec logits;
};

Attention attend_keys(const Mat& memory, const Mat& keys, const Vec& d, const ModelParams& p,
                      Mat* squashed_out) {
  if (d.size() != p.attention.w_dec.cols() || memory.rows() != d.size() || memory.cols() == 0) {
    throw DimensionError("attend: decoder state [" + std::to_string(d.size()) +
                         "] against memory " + shape_str(memory));
  }
  Mat squashed = (keys.colwise() + p.attention.w_dec * d).array().tanh().matrix();
  Attention a;
  a.weights = softmax(squashed.transpose() * p.attention.v);
  a.context = memory * a.weights;
  if (squashed_out) *squashed_out = std::move(squashed);
  return a;
}

StepOutput run_decoder_step(TokenId prev, const DecoderState& state, const Encoding& enc,
                            const ModelParams& p, DropoutContext dc, DecoderStepTape* tape) {
  if (prev < 0 || prev >= p.symbol_embedding.rows()) {
    throw std::out_of_range("decode_step: symbol id " + std::to_string(prev) +
                            " outside vocab of " + std::to_string(p.symbol_embedding.rows()));
  }
  const std::size_t layers = p.decoder.size();
  if (state.size() != layers) {
    throw DimensionError("decode_step: state has " + std::to_string(state.size()) +
                         " layers, model has " + std::to_string(layers));
  }
  const bool drop = dropout_active(p, dc);
  StepOutput out;
  DecodeStep& step = out.step;
  step.next.resize(layers);
  if (tape) {
    tape->layers.clear();
    tape->masks.assign(layers, Vec());
  }
  Vec x = p.symbol_embedding.row(prev).transpose();
  for (std::size_t l = 0; l < layers; ++l) {
    StepCache c = lstm_forward(x, state[l].h, state[l].m, p.decoder[l]);
    step.next[l] = {c.h, c.m};
    x = c.h;
    if (drop && l + 1 < layers) {
      Vec mask = draw_mask(x.size(), p.shape.dropout_rate, *dc.rng);
      x = x.cwiseProduct(mask);
      if (tape) tape->masks[l] = std::move(mask);
    }
    if (tape) tape->layers.push_back(std::move(c));
  }
  const Vec& d = x;
  Mat squashed;
  Attention att = attend_keys(enc.memory, enc.keys, d, p, tape ? &squashed : nullptr);
  Vec concat(2 * d.size());
  concat << d, att.context;
  out.logits = p.output_proj * concat;
  step.dist = softmax(out.logits);
  if (p.shape.routing == FeedbackRouting::kProjectedTopRecurrent) {
    step.next.back().h = p.feedback * concat;
  }
  step.attention = std::move(att.weights);
  if (tape) {
    tape->squashed = std::move(squashed);
    tape->weights = step.attention;
    tape->concat = std::move(concat);
    tape->dist = step.dist;
  }
  return out;
}

}  // namespace

LstmState lstm_step(const Vec& x, const LstmState& prev, const LstmLayerParams& p) {
  StepCache c = lstm_forward(x, prev.h, prev.m, p);
  return {std::move(c.h), std::move(c.m)};
}

Encoding encode(const std::vector<TokenId>& input_ids, const ModelParams& p,
                DropoutContext dropout) {
  return run_encoder(input_ids, p, dropout, nullptr);
}

Attention attend(const Encoding& enc, const Vec& d, const ModelParams& p) {
  return attend_keys(enc.memory, enc.keys, d, p, nullptr);
}

Attention attend(const Mat& memory, const Vec& d, const ModelParams& p) {
  if (memory.rows() != p.attention.w_enc.cols()) {
    throw DimensionError("attend: memory " + shape_str(memory) + " against W_enc " +
                         shape_str(p.attention.w_enc));
  }
  return attend_keys(memory, p.attention.w_enc * memory, d, p, nullptr);
}

DecoderState initial_decoder_state(const Encoding& enc) { return enc.final_states; }

DecodeStep decode_step(TokenId prev_symbol, const DecoderState& state, const Encoding& enc,
                       const ModelParams& p, DropoutContext dropout) {
  return run_decoder_step(prev_symbol, state, enc, p, dropout, nullptr).step;
}

Real sequence_log_prob(const std::vector<TokenId>& input_ids,
                       const std::vector<TokenId>& target, const ModelParams& p,
                       DropoutContext dropout, ModelParams* grad) {
  if (target.empty() || target.back() != 0) {
    throw std::invalid_argument("sequence_log_prob: target must end with END");
  }
  for (TokenId id : target) {
    if (id < 0 || id >= p.output_proj.rows()) {
      throw std::out_of_range("sequence_log_prob: target id " + std::to_string(id) +
                              " outside vocab of " + std::to_string(p.output_proj.rows()));
    }
  }
  EncoderTape etape;
  const Encoding enc = run_encoder(input_ids, p, dropout, grad ? &etape : nullptr);
  const std::size_t out_steps = target.size();
  std::vector<DecoderStepTape> dtape(grad ? out_steps : 0);
  DecoderState state = initial_decoder_state(enc);
  TokenId prev = 0;
  Real log_prob = 0;
  for (std::size_t t = 0; t < out_steps; ++t) {
    StepOutput so = run_decoder_step(prev, state, enc, p, dropout, grad ? &dtape[t] : nullptr);
    if (!so.logits.allFinite()) {
      throw NonFiniteError("sequence_log_prob: non-finite logits at output step " +
                           std::to_string(t));
    }
    log_prob += log_softmax_at(so.logits, target[t]);
    state = std::move(so.step.next);
    prev = target[t];
  }
  if (!std::isfinite(log_prob)) throw NonFiniteError("sequence_log_prob: non-finite log prob");
  if (!grad) return log_prob;

  ModelParams& g = *grad;
  const Eigen::Index h = p.shape.hidden;
  const Eigen::Index in_steps = enc.memory.cols();
  const std::size_t layers = p.decoder.size();
  const bool projected = p.shape.routing == FeedbackRouting::kProjectedTopRecurrent;

  Mat d_memory = Mat::Zero(h, in_steps);
  Mat d_keys = Mat::Zero(h, in_steps);
  // Gradients w.r.t. the decoder state entering the step being processed.
  std::vector<Vec> dh_carry(layers, Vec::Zero(h));
  std::vector<Vec> dm_carry(layers, Vec::Zero(h));
  Vec dx, dh_prev;

  for (std::size_t t = out_steps; t-- > 0;) {
    const DecoderStepTape& s = dtape[t];
    Vec dlogits = -s.dist;
    dlogits(target[t]) += 1.0;
    g.output_proj.noalias() += dlogits * s.concat.transpose();
    Vec dconcat = p.output_proj.transpose() * dlogits;
    Vec& top_carry = dh_carry.back();
    if (projected) {
      g.feedback.noalias() += top_carry * s.concat.transpose();
      dconcat.noalias() += p.feedback.transpose() * top_carry;
    }
    Vec dd = dconcat.head(h);
    if (!projected) dd += top_carry;
    const Vec dcontext = dconcat.tail(h);

    // context = memory * weights
    d_memory.noalias() += dcontext * s.weights.transpose();
    const Vec dweights = enc.memory.transpose() * dcontext;
    const Vec du = s.weights.cwiseProduct(dweights.array().matrix() -
                                          Vec::Constant(in_steps, s.weights.dot(dweights)));
    g.attention.v.noalias() += s.squashed * du;
    const Mat dpre = ((p.attention.v * du.transpose()).array() *
                      (1 - s.squashed.array().square())).matrix();
    d_keys += dpre;
    const Vec dpre_sum = dpre.rowwise().sum();
    const Vec& d = s.concat.head(h);
    g.attention.w_dec.noalias() += dpre_sum * d.transpose();
    dd.noalias() += p.attention.w_dec.transpose() * dpre_sum;

    Vec dh = std::move(dd);
    for (std::size_t l = layers; l-- > 0;) {
      if (l + 1 < layers) {
        dh = s.masks[l].size() ? Vec(dx.cwiseProduct(s.masks[l])) : dx;
        dh += dh_carry[l];
      }
      lstm_backward(s.layers[l], p.decoder[l], dh, dm_carry[l], g.decoder[l], &dx, dh_prev);
      dh_carry[l] = dh_prev;
    }
    const TokenId fed = t == 0 ? 0 : target[t - 1];
    g.symbol_embedding.row(fed) += dx.transpose();
  }

  g.attention.w_enc.noalias() += d_keys * enc.memory.transpose();
  d_memory.noalias() += p.attention.w_enc.transpose() * d_keys;

  std::vector<Vec> d_above(static_cast<std::size_t>(in_steps));
  for (std::size_t l = layers; l-- > 0;) {
    Vec dh_c = std::move(dh_carry[l]);
    Vec dm_c = std::move(dm_carry[l]);
    std::vector<Vec> d_inputs(static_cast<std::size_t>(in_steps));
    for (Eigen::Index t = in_steps; t-- > 0;) {
      const auto ts = static_cast<std::size_t>(t);
      Vec dh = dh_c;
      if (l + 1 == layers) {
        dh += d_memory.col(t);
      } else if (!etape.masks[l].empty()) {
        dh += d_above[ts].cwiseProduct(etape.masks[l][ts]);
      } else {
        dh += d_above[ts];
      }
      lstm_backward(etape.steps[l][ts], p.encoder[l], dh, dm_c, g.encoder[l], &d_inputs[ts], dh_prev);
      dh_c = dh_prev;
    }
    g.encoder[l].h0 += dh_c;
    g.encoder[l].m0 += dm_c;
    d_above = std::move(d_inputs);
  }
  for (std::size_t t = 0; t < input_ids.size(); ++t) {
    g.input_embedding.row(input_ids[t]) += d_above[t].transpose();
  }
  return log_prob;
}

}  // namespace seqparse
