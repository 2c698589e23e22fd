#include "seqparse/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "seqparse/decode.hpp"
#include "seqparse/eval.hpp"

namespace seqparse {

void validate(const TrainConfig& c) {
  if (!(c.learning_rate >= 0)) throw std::invalid_argument("train: learning_rate must be >= 0");
  if (!(c.lr_decay > 0)) throw std::invalid_argument("train: lr_decay must be > 0");
  if (c.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (c.max_epochs < 0) throw std::invalid_argument("train: max_epochs must be >= 0");
  if (!(c.dropout_rate >= 0 && c.dropout_rate < 1)) {
    throw std::invalid_argument("train: dropout_rate must lie in [0, 1)");
  }
  if (!(c.grad_clip_norm > 0)) throw std::invalid_argument("train: grad_clip_norm must be > 0");
  if (c.patience < 1) throw std::invalid_argument("train: patience must be >= 1");
  if (c.eval_beam < 1) throw std::invalid_argument("train: eval_beam must be >= 1");
}

nlohmann::json to_json(const TrainConfig& c) {
  nlohmann::json j = {{"learning_rate", c.learning_rate},
                      {"lr_decay", c.lr_decay},
                      {"decay_start_epoch", c.decay_start_epoch},
                      {"batch_size", c.batch_size},
                      {"max_epochs", c.max_epochs},
                      {"dropout_rate", c.dropout_rate},
                      {"grad_clip_norm", c.grad_clip_norm},
                      {"seed", c.seed},
                      {"eval_every", c.eval_every},
                      {"patience", c.patience},
                      {"eval_beam", c.eval_beam},
                      {"log_wall_clock", c.log_wall_clock}};
  j["max_steps"] = c.max_steps ? nlohmann::json(*c.max_steps) : nlohmann::json(nullptr);
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "learning_rate") c.learning_rate = value.get<Real>();
    else if (key == "lr_decay") c.lr_decay = value.get<Real>();
    else if (key == "decay_start_epoch") c.decay_start_epoch = value.get<int>();
    else if (key == "batch_size") c.batch_size = value.get<int>();
    else if (key == "max_epochs") c.max_epochs = value.get<int>();
    else if (key == "max_steps") c.max_steps = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
    else if (key == "dropout_rate") c.dropout_rate = value.get<Real>();
    else if (key == "grad_clip_norm") c.grad_clip_norm = value.get<Real>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "eval_every") c.eval_every = value.get<std::size_t>();
    else if (key == "patience") c.patience = value.get<int>();
    else if (key == "eval_beam") c.eval_beam = value.get<int>();
    else if (key == "log_wall_clock") c.log_wall_clock = value.get<bool>();
    else throw std::invalid_argument("train config: unknown key '" + key + "'");
  }
  validate(c);
  return c;
}

Vocab build_input_vocab(const std::vector<ParseTree>& trees, std::size_t cap) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(trees.size());
  for (const auto& t : trees) corpus.push_back(words(t));
  return build_vocab(corpus, cap, VocabKind::kInput);
}

Vocab build_output_vocab(const std::vector<ParseTree>& trees, std::size_t cap) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(trees.size());
  for (const auto& t : trees) {
    std::vector<std::string> toks;
    for (const auto& s : linearize(normalize_pos(t))) toks.push_back(to_string(s));
    corpus.push_back(std::move(toks));
  }
  return build_vocab(corpus, cap, VocabKind::kOutput);
}

TrainingPair make_training_pair(const ParseTree& t, const Vocab& in, const Vocab& out) {
  TrainingPair pair;
  pair.input = encode_input(words(t), in);
  for (const auto& s : linearize(normalize_pos(t))) pair.target.push_back(out.id(to_string(s)));
  return pair;
}

std::vector<TrainingPair> make_training_pairs(const std::vector<ParseTree>& trees,
                                              const Vocab& in, const Vocab& out) {
  std::vector<TrainingPair> pairs;
  pairs.reserve(trees.size());
  for (const auto& t : trees) pairs.push_back(make_training_pair(t, in, out));
  return pairs;
}

std::vector<DevExample> make_dev_set(const std::vector<ParseTree>& trees) {
  std::vector<DevExample> dev;
  dev.reserve(trees.size());
  for (const auto& t : trees) dev.push_back({words(t), normalize_pos(t)});
  return dev;
}

BatchLoss batch_loss(const ModelParams& p, const std::vector<const TrainingPair*>& batch,
                     DropoutContext dropout) {
  if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
  BatchLoss out;
  out.grad = zeros_like(p);
  Real total = 0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    try {
      total += sequence_log_prob(batch[k]->input, batch[k]->target, p, dropout, &out.grad);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError("batch example " + std::to_string(k) + ": " + e.what());
    }
  }
  const Real scale = -1.0 / static_cast<Real>(batch.size());
  out.loss = scale * total;
  for_each_array(out.grad, [&](std::string_view, auto& a) { a *= scale; });
  return out;
}

Real global_norm(const ModelParams& grads) {
  Real sq = 0;
  for_each_array(grads, [&](std::string_view, const auto& a) { sq += a.squaredNorm(); });
  return std::sqrt(sq);
}

SgdStats sgd_step(ModelParams& p, const ModelParams& grads, Real lr, Real clip_norm) {
  check_same_shapes(p, grads);
  SgdStats stats;
  stats.grad_norm = global_norm(grads);
  Real scale = lr;
  if (stats.grad_norm > clip_norm) {
    stats.clipped = true;
    scale *= clip_norm / stats.grad_norm;
  }
  std::vector<const Real*> src;
  for_each_array(grads, [&](std::string_view, const auto& a) { src.push_back(a.data()); });
  std::size_t k = 0;
  for_each_array(p, [&](std::string_view, auto& a) {
    const Real* g = src[k++];
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] -= scale * g[i];
  });
  return stats;
}

Real learning_rate_for_epoch(const TrainConfig& c, int epoch) {
  const int decays = std::max(0, epoch - c.decay_start_epoch + 1);
  return c.learning_rate * std::pow(c.lr_decay, decays);
}

nlohmann::json to_json(const LogRecord& r, bool with_wall_clock) {
  nlohmann::json j = {{"kind", r.kind}, {"step", r.step}, {"epoch", r.epoch},
                      {"loss", r.loss}, {"lr", r.lr}};
  j["dev_f1"] = r.dev_f1 ? nlohmann::json(*r.dev_f1) : nlohmann::json(nullptr);
  if (with_wall_clock) j["wall_seconds"] = r.wall_seconds;
  return j;
}

double dev_f1(const ModelParams& p, const std::vector<DevExample>& dev, const Vocab& in,
              const Vocab& out, int beam) {
  Parser parser;
  parser.models = {&p};
  parser.input_vocab = &in;
  parser.output_vocab = &out;
  parser.beam_size = beam;
  std::vector<ParseTree> gold, pred;
  gold.reserve(dev.size());
  pred.reserve(dev.size());
  for (const auto& ex : dev) {
    gold.push_back(ex.gold);
    pred.push_back(parse_sentence(ex.words, parser).tree);
  }
  return bracket_f1(gold, pred).f1;
}

TrainResult train_loop(const std::vector<TrainingPair>& train, const std::vector<DevExample>& dev,
                       const TrainConfig& cfg, ModelParams init, const Vocab& in,
                       const Vocab& out, const TrainHooks& hooks) {
  validate(cfg);
  if (dev.empty()) throw std::invalid_argument("train_loop: empty dev set");
  TrainResult result;
  result.best = init;
  if (cfg.max_epochs == 0 || train.empty()) return result;
  init.shape.dropout_rate = cfg.dropout_rate;

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return cfg.log_wall_clock
               ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
               : 0.0;
  };
  auto emit = [&](LogRecord r) {
    if (hooks.log_stream) *hooks.log_stream << to_json(r, cfg.log_wall_clock).dump() << "\n";
    result.log.push_back(std::move(r));
  };

  Rng rng(cfg.seed);
  ModelParams p = std::move(init);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  int evals_without_gain = 0;
  bool stop = false;

  auto evaluate = [&](int epoch, Real lr, Real last_loss) {
    LogRecord r{"eval", result.steps, epoch, last_loss, dev_f1(p, dev, in, out, cfg.eval_beam), lr,
                elapsed()};
    if (*r.dev_f1 > result.best_dev_f1) {
      result.best_dev_f1 = *r.dev_f1;
      result.best_step = result.steps;
      result.best = p;
      evals_without_gain = 0;
      if (hooks.on_improvement) hooks.on_improvement(p, r);
    } else if (++evals_without_gain >= cfg.patience) {
      stop = true;
      result.stopped_early = true;
    }
    emit(std::move(r));
  };

  Real last_loss = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs && !stop; ++epoch) {
    const Real lr = learning_rate_for_epoch(cfg, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t at = 0; at < order.size() && !stop; at += static_cast<std::size_t>(cfg.batch_size)) {
      if (cfg.max_steps && result.steps >= *cfg.max_steps) {
        stop = true;
        break;
      }
      std::vector<const TrainingPair*> batch;
      const std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t k = at; k < end; ++k) batch.push_back(&train[order[k]]);
      BatchLoss bl;
      try {
        bl = batch_loss(p, batch, {true, &rng});
      } catch (const NonFiniteError& e) {
        throw TrainingError("step " + std::to_string(result.steps + 1) + ", epoch " +
                            std::to_string(epoch) + ": " + e.what());
      }
      if (!std::isfinite(bl.loss)) {
        throw TrainingError("step " + std::to_string(result.steps + 1) + ": non-finite loss");
      }
      sgd_step(p, bl.grad, lr, cfg.grad_clip_norm);
      ++result.steps;
      last_loss = bl.loss;
      emit(LogRecord{"step", result.steps, epoch, bl.loss, std::nullopt, lr, elapsed()});
      if (cfg.eval_every > 0 && result.steps % cfg.eval_every == 0) evaluate(epoch, lr, last_loss);
    }
    if (cfg.eval_every == 0 && !stop) evaluate(epoch, lr, last_loss);
  }
  // The final state is always scored so trailing updates are not lost.
  if (!result.stopped_early && (result.log.empty() || result.log.back().kind != "eval")) {
    const int epoch = result.log.empty() ? 0 : result.log.back().epoch;
    const Real lr = result.log.empty() ? cfg.learning_rate : result.log.back().lr;
    evaluate(epoch, lr, last_loss);
  }
  return result;
}

}  // namespace seqparse
