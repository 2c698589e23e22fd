#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "seqparse/model.hpp"
#include "seqparse/tree.hpp"
#include "seqparse/vocab.hpp"

namespace seqparse {

struct TrainConfig {
  Real learning_rate = 0.5;
  Real lr_decay = 0.9;
  int decay_start_epoch = 5;  // 1-based; decay applies from this epoch on
  int batch_size = 16;
  int max_epochs = 10;
  std::optional<std::size_t> max_steps;
  Real dropout_rate = 0.3;
  Real grad_clip_norm = 5.0;
  std::uint64_t seed = 1;
  std::size_t eval_every = 200;  // steps; 0 evaluates once per epoch only
  int patience = 5;
  int eval_beam = 1;
  bool log_wall_clock = true;
};

void validate(const TrainConfig& c);
nlohmann::json to_json(const TrainConfig& c);
// Missing keys keep their defaults; unknown keys are an error.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

// Already encoded: input reversed, target ends with END.
struct TrainingPair {
  std::vector<TokenId> input;
  std::vector<TokenId> target;
};

struct DevExample {
  std::vector<std::string> words;
  ParseTree gold;  // POS-normalised
};

Vocab build_input_vocab(const std::vector<ParseTree>& trees, std::size_t cap = 90000);
Vocab build_output_vocab(const std::vector<ParseTree>& trees, std::size_t cap = 128);

// Normalises POS tags, linearises and encodes; throws for symbols missing
// from the output vocabulary.
TrainingPair make_training_pair(const ParseTree& t, const Vocab& in, const Vocab& out);
std::vector<TrainingPair> make_training_pairs(const std::vector<ParseTree>& trees,
                                              const Vocab& in, const Vocab& out);
std::vector<DevExample> make_dev_set(const std::vector<ParseTree>& trees);

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BatchLoss {
  Real loss = 0;  // mean negative log probability
  ModelParams grad;  // d(loss)/d(theta)
};

BatchLoss batch_loss(const ModelParams& p, const std::vector<const TrainingPair*>& batch,
                     DropoutContext dropout = {});

struct SgdStats {
  Real grad_norm = 0;
  bool clipped = false;
};

Real global_norm(const ModelParams& grads);

// Clips the gradient to `clip_norm` (global L2) then steps theta -= lr * g.
SgdStats sgd_step(ModelParams& p, const ModelParams& grads, Real lr, Real clip_norm);

Real learning_rate_for_epoch(const TrainConfig& c, int epoch);

struct LogRecord {
  std::string kind;  // "step" or "eval"
  std::size_t step = 0;
  int epoch = 0;
  Real loss = 0;
  std::optional<double> dev_f1;
  Real lr = 0;
  double wall_seconds = 0;
};

nlohmann::json to_json(const LogRecord& r, bool with_wall_clock = true);

struct TrainResult {
  ModelParams best;
  double best_dev_f1 = -1;  // -1 when no evaluation ran
  std::size_t best_step = 0;
  std::size_t steps = 0;
  bool stopped_early = false;
  std::vector<LogRecord> log;
};

struct TrainHooks {
  std::ostream* log_stream = nullptr;  // JSON lines
  std::function<void(const ModelParams&, const LogRecord&)> on_improvement;
};

// Decodes `dev` and scores bracket F1 against the gold trees.
double dev_f1(const ModelParams& p, const std::vector<DevExample>& dev, const Vocab& in,
              const Vocab& out, int beam);

TrainResult train_loop(const std::vector<TrainingPair>& train, const std::vector<DevExample>& dev,
                       const TrainConfig& cfg, ModelParams init, const Vocab& in,
                       const Vocab& out, const TrainHooks& hooks = {});

}  // namespace seqparse
