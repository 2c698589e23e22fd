#pragma once

// Independent reference implementations used only by tests. They are written
// with plain loops over std::vector so they share no code path with the
// library's Eigen kernels.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "seqparse/model.hpp"
#include "seqparse/tree.hpp"

namespace oracle {

using seqparse::Real;
using Dense = std::vector<std::vector<Real>>;
using Row = std::vector<Real>;

inline Dense to_dense(const seqparse::Mat& m) {
  Dense d(static_cast<std::size_t>(m.rows()), Row(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

inline Row to_row(const seqparse::Vec& v) { return Row(v.data(), v.data() + v.size()); }

inline Row matvec(const Dense& w, const Row& x) {
  Row out(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += w[i][j] * x[j];
  return out;
}

inline Real sig(Real z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Cell {
  Row h, m;
};

// The six LSTM equations written out with separate W1..W8.
inline Cell lstm(const Row& x, const Cell& prev, seqparse::LstmLayerParams p) {
  Dense w[9];
  for (int k = 1; k <= 8; ++k) w[k] = to_dense(seqparse::Mat(p.gate_matrix(k)));
  const Row a1 = matvec(w[1], x), a2 = matvec(w[2], prev.h);
  const Row a3 = matvec(w[3], x), a4 = matvec(w[4], prev.h);
  const Row a5 = matvec(w[5], x), a6 = matvec(w[6], prev.h);
  const Row a7 = matvec(w[7], x), a8 = matvec(w[8], prev.h);
  Cell out{Row(prev.h.size()), Row(prev.h.size())};
  for (std::size_t k = 0; k < prev.h.size(); ++k) {
    const Real i = sig(a1[k] + a2[k]);
    const Real ic = std::tanh(a3[k] + a4[k]);
    const Real f = sig(a5[k] + a6[k]);
    const Real o = sig(a7[k] + a8[k]);
    out.m[k] = prev.m[k] * f + i * ic;
    out.h[k] = out.m[k] * o;
  }
  return out;
}

inline Row softmax(const Row& u) {
  Real mx = u[0];
  for (Real x : u) mx = std::max(mx, x);
  Row e(u.size());
  Real s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (e[i] = std::exp(u[i] - mx));
  for (Real& x : e) x /= s;
  return e;
}

struct Att {
  Row weights;
  Row context;
};

// u_i = v . tanh(W'1 h_i + W'2 d); a = softmax(u); d' = sum a_i h_i
inline Att attention(const std::vector<Row>& enc, const Row& d, const seqparse::AttentionParams& p) {
  const Dense w1 = to_dense(p.w_enc), w2 = to_dense(p.w_dec);
  const Row v = to_row(p.v);
  const Row qd = matvec(w2, d);
  Row u(enc.size());
  for (std::size_t i = 0; i < enc.size(); ++i) {
    const Row qh = matvec(w1, enc[i]);
    Real s = 0;
    for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * std::tanh(qh[k] + qd[k]);
    u[i] = s;
  }
  Att a{softmax(u), Row(d.size(), 0.0)};
  for (std::size_t i = 0; i < enc.size(); ++i)
    for (std::size_t k = 0; k < d.size(); ++k) a.context[k] += a.weights[i] * enc[i][k];
  return a;
}

// One decoder step of the whole model, from scratch.
struct StepOut {
  Row dist;
  std::vector<Cell> next;
};

inline StepOut decoder_step(int prev, const std::vector<Cell>& state, const std::vector<Row>& enc,
                            const seqparse::ModelParams& p) {
  Row x(static_cast<std::size_t>(p.symbol_embedding.cols()));
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = p.symbol_embedding(prev, static_cast<Eigen::Index>(k));
  StepOut out;
  for (std::size_t l = 0; l < p.decoder.size(); ++l) {
    out.next.push_back(lstm(x, state[l], p.decoder[l]));
    x = out.next.back().h;
  }
  const Att a = attention(enc, x, p.attention);
  Row concat = x;
  concat.insert(concat.end(), a.context.begin(), a.context.end());
  out.dist = softmax(matvec(to_dense(p.output_proj), concat));
  if (p.shape.routing == seqparse::FeedbackRouting::kProjectedTopRecurrent) {
    out.next.back().h = matvec(to_dense(p.feedback), concat);
  }
  return out;
}

struct EncOut {
  std::vector<Row> top;
  std::vector<Cell> finals;
};

inline EncOut encoder(const std::vector<int>& ids, const seqparse::ModelParams& p) {
  std::vector<Row> seq;
  for (int id : ids) {
    Row x(static_cast<std::size_t>(p.input_embedding.cols()));
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = p.input_embedding(id, static_cast<Eigen::Index>(k));
    seq.push_back(x);
  }
  EncOut out;
  for (const auto& layer : p.encoder) {
    Cell c{to_row(layer.h0), to_row(layer.m0)};
    std::vector<Row> next;
    for (const auto& x : seq) {
      c = lstm(x, c, layer);
      next.push_back(c.h);
    }
    out.finals.push_back(c);
    seq = next;
  }
  out.top = seq;
  return out;
}

inline Real sequence_log_prob(const std::vector<int>& ids, const std::vector<int>& target,
                              const seqparse::ModelParams& p) {
  EncOut e = encoder(ids, p);
  std::vector<Cell> state = e.finals;
  int prev = 0;
  Real lp = 0;
  for (int y : target) {
    StepOut s = decoder_step(prev, state, e.top, p);
    lp += std::log(s.dist[static_cast<std::size_t>(y)]);
    state = s.next;
    prev = y;
  }
  return lp;
}

// --- bracket scoring by explicit enumeration ----------------------------------

using Span = std::tuple<std::string, std::size_t, std::size_t>;

inline std::size_t spans_of(const seqparse::ParseTree& t, std::size_t start, std::vector<Span>& out) {
  if (t.children.empty()) return 1;
  std::size_t w = 0;
  for (const auto& c : t.children) w += spans_of(c, start + w, out);
  out.emplace_back(t.label, start, start + w);
  return w;
}

struct Counts {
  std::size_t matched = 0, gold = 0, pred = 0;
};

// Multiset intersection by counting each distinct span on both sides.
inline Counts brute_force_counts(const std::vector<seqparse::ParseTree>& gold,
                                 const std::vector<seqparse::ParseTree>& pred) {
  Counts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::vector<Span> g, p;
    spans_of(gold[i], 0, g);
    spans_of(pred[i], 0, p);
    c.gold += g.size();
    c.pred += p.size();
    std::map<Span, int> gc, pc;
    for (const auto& s : g) ++gc[s];
    for (const auto& s : p) ++pc[s];
    for (const auto& [s, n] : gc) {
      auto it = pc.find(s);
      if (it != pc.end()) c.matched += static_cast<std::size_t>(std::min(n, it->second));
    }
  }
  return c;
}

}  // namespace oracle
