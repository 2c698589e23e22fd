// seqparse command-line driver.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "seqparse/checkpoint.hpp"
#include "seqparse/corpusgen.hpp"
#include "seqparse/decode.hpp"
#include "seqparse/eval.hpp"
#include "seqparse/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace seqparse;

namespace {

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CliError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw CliError("cannot write " + p.string());
  out << text;
}

std::vector<ParseTree> read_treebank(const fs::path& p) {
  try {
    return read_bracketed(read_file(p));
  } catch (const TreeParseError& e) {
    throw CliError(p.string() + ": " + e.what());
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

// Flag beats SEQPARSE_OUT_DIR, which beats the config file value.
fs::path resolve_out_dir(const std::string& flag, const std::optional<std::string>& from_config) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SEQPARSE_OUT_DIR"); env && *env) return env;
  if (from_config) return *from_config;
  return ".";
}

void write_resolved(const fs::path& dir, const std::string& command, json cfg) {
  cfg["command"] = command;
  write_file(dir / ("resolved_" + command + "_config.json"), cfg.dump(2) + "\n");
}

// --- linearize / delinearize ------------------------------------------------

struct LinearizeOpts {
  std::string input, output, words_out;
  bool keep_tags = false;
};

int cmd_linearize(const LinearizeOpts& o) {
  const auto trees = read_treebank(o.input);
  std::string seq, wl;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    try {
      validate(trees[i]);
    } catch (const std::exception& e) {
      throw CliError("tree " + std::to_string(i) + ": " + e.what());
    }
    const ParseTree t = o.keep_tags ? trees[i] : normalize_pos(trees[i]);
    seq += join_symbols(linearize(t)) + "\n";
    for (const auto& w : words(t)) wl += (wl.empty() || wl.back() == '\n' ? "" : " ") + w;
    wl += "\n";
  }
  if (o.output.empty()) {
    std::cout << seq;
  } else {
    write_file(o.output, seq);
  }
  if (!o.words_out.empty()) write_file(o.words_out, wl);
  return 0;
}

struct DelinearizeOpts {
  std::string symbols, words, output;
  bool repair = false;
};

int cmd_delinearize(const DelinearizeOpts& o) {
  const auto seqs = split_lines(read_file(o.symbols));
  const auto sents = split_lines(read_file(o.words));
  if (seqs.size() != sents.size()) {
    throw CliError("symbol file has " + std::to_string(seqs.size()) + " lines but word file has " +
                   std::to_string(sents.size()));
  }
  std::string out;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    try {
      const auto syms = split_symbols(seqs[i]);
      const auto ws = tokens(sents[i]);
      const ParseTree t = o.repair ? tree_from_symbols(syms, ws, "S") : delinearize(syms, ws);
      out += write_bracketed(t) + "\n";
    } catch (const std::exception& e) {
      throw CliError("line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (o.output.empty()) {
    std::cout << out;
  } else {
    write_file(o.output, out);
  }
  return 0;
}

// --- gen-corpus ---------------------------------------------------------------

struct GenOpts {
  std::string grammar, out_dir;
  std::size_t n_train = 2000, n_dev = 200, n_test = 200;
  std::uint64_t seed = 1;
};

int cmd_gen_corpus(const GenOpts& o) {
  const ToyGrammar g = o.grammar.empty() ? ToyGrammar::default_grammar()
                                         : ToyGrammar::parse(read_file(o.grammar));
  const fs::path dir = resolve_out_dir(o.out_dir, std::nullopt);
  write_corpus(make_corpus(g, o.n_train, o.n_dev, o.n_test, o.seed), dir);
  write_resolved(dir, "gen-corpus",
                 {{"grammar", o.grammar.empty() ? json(nullptr) : json(o.grammar)},
                  {"train", o.n_train}, {"dev", o.n_dev}, {"test", o.n_test}, {"seed", o.seed},
                  {"out_dir", dir.string()}});
  std::cerr << "wrote " << o.n_train << "/" << o.n_dev << "/" << o.n_test
            << " train/dev/test trees to " << dir.string() << "\n";
  return 0;
}

// --- train ----------------------------------------------------------------------

struct RunConfig {
  std::string train_trees, dev_trees, embeddings;
  std::optional<std::string> out_dir;
  std::size_t input_vocab_cap = 90000, output_vocab_cap = 128;
  ModelShape shape;
  Real init_scale = 0.08;
  TrainConfig train;
};

json to_json(const RunConfig& c) {
  return {{"train_trees", c.train_trees},
          {"dev_trees", c.dev_trees},
          {"embeddings", c.embeddings.empty() ? json(nullptr) : json(c.embeddings)},
          {"out_dir", c.out_dir ? json(*c.out_dir) : json(nullptr)},
          {"input_vocab_cap", c.input_vocab_cap},
          {"output_vocab_cap", c.output_vocab_cap},
          {"model",
           {{"layers", c.shape.layers},
            {"hidden", c.shape.hidden},
            {"embed", c.shape.embed},
            {"routing", std::string(routing_name(c.shape.routing))},
            {"init_scale", c.init_scale}}},
          {"train", to_json(c.train)}};
}

RunConfig run_config_from_json(const json& j, const fs::path& base) {
  RunConfig c;
  c.shape.layers = 3;
  c.shape.hidden = 256;
  c.shape.embed = 256;
  auto path = [&](const json& v) {
    const fs::path p = v.get<std::string>();
    return (p.is_absolute() ? p : base / p).string();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "train_trees") c.train_trees = path(v);
    else if (key == "dev_trees") c.dev_trees = path(v);
    else if (key == "embeddings") c.embeddings = v.is_null() ? "" : path(v);
    else if (key == "out_dir") c.out_dir = v.is_null() ? std::nullopt : std::optional(path(v));
    else if (key == "input_vocab_cap") c.input_vocab_cap = v.get<std::size_t>();
    else if (key == "output_vocab_cap") c.output_vocab_cap = v.get<std::size_t>();
    else if (key == "model") {
      for (const auto& [mk, mv] : v.items()) {
        if (mk == "layers") c.shape.layers = mv.get<int>();
        else if (mk == "hidden") c.shape.hidden = mv.get<int>();
        else if (mk == "embed") c.shape.embed = mv.get<int>();
        else if (mk == "routing") c.shape.routing = routing_from_name(mv.get<std::string>());
        else if (mk == "init_scale") c.init_scale = mv.get<Real>();
        else throw CliError("unknown model key '" + mk + "'");
      }
    } else if (key == "train") {
      c.train = train_config_from_json(v);
    } else {
      throw CliError("unknown key '" + key + "'");
    }
  }
  return c;
}

struct TrainFlags {
  std::string config, train_trees, dev_trees, out_dir, embeddings, routing;
  std::optional<int> layers, hidden, embed, batch_size, max_epochs, patience, eval_beam;
  std::optional<Real> lr, dropout, init_scale, clip;
  std::optional<std::size_t> max_steps, eval_every;
  std::optional<std::uint64_t> seed;
  bool no_wall_clock = false;
};

std::string checkpoint_name(std::size_t step, double f1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "ckpt_step%06zu_f1_%.2f.sqp", step, f1 < 0 ? 0.0 : f1);
  return buf;
}

int cmd_train(const TrainFlags& f) {
  RunConfig c;
  c.shape.layers = 3;
  c.shape.hidden = 256;
  c.shape.embed = 256;
  if (!f.config.empty()) {
    try {
      c = run_config_from_json(json::parse(read_file(f.config)), fs::path(f.config).parent_path());
    } catch (const std::exception& e) {
      throw CliError("config " + f.config + ": " + e.what());
    }
  }
  if (!f.train_trees.empty()) c.train_trees = f.train_trees;
  if (!f.dev_trees.empty()) c.dev_trees = f.dev_trees;
  if (!f.embeddings.empty()) c.embeddings = f.embeddings;
  if (!f.routing.empty()) c.shape.routing = routing_from_name(f.routing);
  if (f.layers) c.shape.layers = *f.layers;
  if (f.hidden) c.shape.hidden = *f.hidden;
  if (f.embed) c.shape.embed = *f.embed;
  if (f.init_scale) c.init_scale = *f.init_scale;
  if (f.lr) c.train.learning_rate = *f.lr;
  if (f.batch_size) c.train.batch_size = *f.batch_size;
  if (f.max_epochs) c.train.max_epochs = *f.max_epochs;
  if (f.max_steps) c.train.max_steps = *f.max_steps;
  if (f.dropout) c.train.dropout_rate = *f.dropout;
  if (f.clip) c.train.grad_clip_norm = *f.clip;
  if (f.seed) c.train.seed = *f.seed;
  if (f.eval_every) c.train.eval_every = *f.eval_every;
  if (f.patience) c.train.patience = *f.patience;
  if (f.eval_beam) c.train.eval_beam = *f.eval_beam;
  if (f.no_wall_clock) c.train.log_wall_clock = false;
  const std::string where = f.config.empty() ? "train" : "config " + f.config;
  if (c.train_trees.empty() || c.dev_trees.empty()) {
    throw CliError(where + ": train_trees and dev_trees are required");
  }
  try {
    validate(c.train);
  } catch (const std::exception& e) {
    throw CliError(where + ": " + e.what());
  }

  const fs::path dir = resolve_out_dir(f.out_dir, c.out_dir);
  fs::create_directories(dir);
  json resolved = to_json(c);
  resolved["out_dir"] = dir.string();
  write_resolved(dir, "train", resolved);

  const auto train_trees = read_treebank(c.train_trees);
  const auto dev_trees = read_treebank(c.dev_trees);
  if (dev_trees.empty()) throw CliError(where + ": dev treebank is empty");
  const Vocab in = build_input_vocab(train_trees, c.input_vocab_cap);
  const Vocab out = build_output_vocab(train_trees, c.output_vocab_cap);
  {
    std::ofstream vi(dir / "input.vocab"), vo(dir / "output.vocab");
    write_vocab(vi, in);
    write_vocab(vo, out);
  }
  const auto pairs = make_training_pairs(train_trees, in, out);
  const auto dev = make_dev_set(dev_trees);

  c.shape.input_vocab = static_cast<int>(in.size());
  c.shape.output_vocab = static_cast<int>(out.size());
  c.shape.dropout_rate = c.train.dropout_rate;
  validate(c.shape);
  Rng init_rng(c.train.seed);
  ModelParams init = make_params(c.shape, init_rng, c.init_scale);
  if (!c.embeddings.empty()) {
    std::ifstream ef(c.embeddings);
    if (!ef) throw CliError("cannot read " + c.embeddings);
    PretrainedLoadStats st;
    init.input_embedding =
        load_pretrained(ef, in, static_cast<std::size_t>(c.shape.embed), init_rng, &st);
    for (const auto& w : st.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "pretrained embeddings: " << st.copied << " copied, " << st.random << " random\n";
  }

  auto make_ckpt = [&](const ModelParams& p, std::size_t step, double f1) {
    Checkpoint ck{p, in, out, c.train.seed, c.init_scale, json::object()};
    ck.meta = {{"step", step}, {"dev_f1", f1}, {"train_config", to_json(c.train)}};
    return ck;
  };

  std::ofstream log(dir / "train_log.jsonl");
  TrainHooks hooks;
  hooks.log_stream = &log;
  hooks.on_improvement = [&](const ModelParams& p, const LogRecord& r) {
    save_checkpoint(dir / checkpoint_name(r.step, *r.dev_f1), make_ckpt(p, r.step, *r.dev_f1));
  };
  TrainResult result;
  try {
    result = train_loop(pairs, dev, c.train, init, in, out, hooks);
  } catch (const std::exception& e) {
    throw CliError(where + ": " + e.what());
  }
  save_checkpoint(dir / "best.sqp", make_ckpt(result.best, result.best_step, result.best_dev_f1));
  std::printf("steps %zu  best dev F1 %.2f at step %zu%s\n", result.steps,
              result.best_dev_f1 < 0 ? 0.0 : result.best_dev_f1, result.best_step,
              result.stopped_early ? " (early stop)" : "");
  return 0;
}

// --- parse ----------------------------------------------------------------------

struct ParseOpts {
  std::vector<std::string> checkpoints;
  std::string input, output, out_dir, attention_dir, fallback_root = "S";
  int beam = 10;
  std::optional<int> max_len;
  bool attention = false;
};

int cmd_parse(const ParseOpts& o) {
  std::vector<Checkpoint> ckpts;
  for (const auto& path : o.checkpoints) ckpts.push_back(load_checkpoint(path));
  for (std::size_t k = 1; k < ckpts.size(); ++k) {
    if (!(ckpts[k].input_vocab == ckpts[0].input_vocab) ||
        !(ckpts[k].output_vocab == ckpts[0].output_vocab)) {
      throw CliError(o.checkpoints[k] + ": vocabularies differ from " + o.checkpoints[0]);
    }
  }
  Parser parser;
  for (const auto& c : ckpts) parser.models.push_back(&c.params);
  parser.input_vocab = &ckpts[0].input_vocab;
  parser.output_vocab = &ckpts[0].output_vocab;
  parser.beam_size = o.beam;
  parser.max_len = o.max_len;
  parser.fallback_root = o.fallback_root;

  const fs::path dir = resolve_out_dir(o.out_dir, std::nullopt);
  const fs::path out_path = o.output.empty() ? dir / "parsed.trees" : fs::path(o.output);
  const fs::path att_dir = o.attention_dir.empty() ? dir / "attention" : fs::path(o.attention_dir);
  write_resolved(dir, "parse",
                 {{"checkpoints", o.checkpoints}, {"input", o.input}, {"output", out_path.string()},
                  {"beam", o.beam}, {"max_len", o.max_len ? json(*o.max_len) : json(nullptr)},
                  {"attention", o.attention ? json(att_dir.string()) : json(nullptr)},
                  {"fallback_root", o.fallback_root}});

  const auto lines = split_lines(read_file(o.input));
  std::string out;
  std::size_t parsed = 0, repaired = 0, skipped = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto ws = tokens(lines[i]);
    if (ws.empty()) {
      std::cerr << "warning: line " << i + 1 << " is empty, skipped\n";
      ++skipped;
      continue;
    }
    const ParseResult r = parse_sentence(ws, parser);
    out += write_bracketed(r.tree) + "\n";
    ++parsed;
    repaired += r.was_repaired;
    if (o.attention) {
      std::vector<std::string> enc(ws.rbegin(), ws.rend());
      std::vector<std::string> outs;
      for (const auto& s : r.raw_symbols) outs.push_back(to_string(s));
      if (static_cast<std::size_t>(r.trace.weights.rows()) > outs.size()) outs.push_back(std::string(kEndToken));
      fs::create_directories(att_dir);
      char name[48];
      std::snprintf(name, sizeof name, "sentence_%06zu.tsv", i + 1);
      std::ofstream tsv(att_dir / name);
      write_attention_tsv(tsv, r.trace, enc, outs);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(out_path, out);
  const double rate = secs > 0 ? static_cast<double>(parsed) / secs : 0.0;
  const json stats = {{"sentences", parsed},
                      {"skipped_empty", skipped},
                      {"repaired", repaired},
                      {"malformed_rate", parsed ? static_cast<double>(repaired) / static_cast<double>(parsed) : 0.0},
                      {"sentences_per_second", rate},
                      {"beam", o.beam},
                      {"ensemble_size", ckpts.size()}};
  write_file(dir / "parse_stats.json", stats.dump(2) + "\n");
  std::fprintf(stderr, "parsed %zu sentences (%zu repaired, %zu empty skipped), %.1f sentences/second\n",
               parsed, repaired, skipped, rate);
  return 0;
}

// --- eval -----------------------------------------------------------------------

struct EvalOpts {
  std::string gold, pred, out_dir, parse_stats;
  bool buckets = false, delete_punct = false;
};

int cmd_eval(const EvalOpts& o) {
  const auto gold = read_treebank(o.gold);
  const auto pred = read_treebank(o.pred);
  EvalOptions opts;
  opts.delete_punctuation = o.delete_punct;
  F1Report r = bracket_f1(gold, pred, opts);
  r.per_bucket = length_report(gold, pred, kDefaultBuckets, opts);
  if (!o.parse_stats.empty()) {
    r.malformed_rate = json::parse(read_file(o.parse_stats)).at("malformed_rate").get<double>();
  }
  const fs::path dir = resolve_out_dir(o.out_dir, std::nullopt);
  write_resolved(dir, "eval",
                 {{"gold", o.gold}, {"pred", o.pred}, {"buckets", o.buckets},
                  {"delete_punctuation", o.delete_punct},
                  {"parse_stats", o.parse_stats.empty() ? json(nullptr) : json(o.parse_stats)}});
  write_file(dir / "eval_report.json", to_json(r).dump(2) + "\n");
  std::ostringstream text;
  write_text_report(text, r);
  write_file(dir / "eval_report.txt", text.str());
  if (o.buckets) {
    std::ostringstream tsv;
    write_bucket_tsv(tsv, r.per_bucket);
    write_file(dir / "buckets.tsv", tsv.str());
  }
  std::cout << text.str();
  return 0;
}

// --- inspect-checkpoint -----------------------------------------------------------

int cmd_inspect(const std::string& path, bool full) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot read " + path);
  json h = read_checkpoint_header(in);
  if (!full) {
    for (const char* k : {"input_vocab", "output_vocab"}) {
      if (h.contains(k) && h[k].contains("tokens")) {
        h[k]["size"] = h[k]["tokens"].size();
        h[k].erase("tokens");
      }
    }
  }
  std::cout << h.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqparse: sequence-to-sequence constituency parser"};
  app.require_subcommand(1);

  LinearizeOpts lin;
  auto* c_lin = app.add_subcommand("linearize", "Linearize a bracketed treebank");
  c_lin->add_option("treebank", lin.input, "Bracketed tree file")->required()->check(CLI::ExistingFile);
  c_lin->add_option("-o,--output", lin.output, "Output file (default stdout)");
  c_lin->add_option("--words", lin.words_out, "Also write the sentences, one per line");
  c_lin->add_flag("--keep-tags", lin.keep_tags, "Keep POS tags instead of XX");

  DelinearizeOpts del;
  auto* c_del = app.add_subcommand("delinearize", "Rebuild trees from symbol sequences and words");
  c_del->add_option("symbols", del.symbols, "Symbol sequences, one per line")->required()->check(CLI::ExistingFile);
  c_del->add_option("words", del.words, "Sentences, one per line")->required()->check(CLI::ExistingFile);
  c_del->add_option("-o,--output", del.output, "Output file (default stdout)");
  c_del->add_flag("--repair", del.repair, "Repair malformed sequences instead of failing");

  GenOpts gen;
  auto* c_gen = app.add_subcommand("gen-corpus", "Sample a toy treebank");
  c_gen->add_option("--grammar", gen.grammar, "Grammar file (default built-in)")->check(CLI::ExistingFile);
  c_gen->add_option("--train", gen.n_train, "Training trees");
  c_gen->add_option("--dev", gen.n_dev, "Dev trees");
  c_gen->add_option("--test", gen.n_test, "Test trees");
  c_gen->add_option("--seed", gen.seed, "Random seed");
  c_gen->add_option("--out-dir", gen.out_dir, "Output directory");

  TrainFlags tf;
  auto* c_train = app.add_subcommand("train", "Train a parser");
  c_train->add_option("-c,--config", tf.config, "JSON run config")->check(CLI::ExistingFile);
  c_train->add_option("--train-trees", tf.train_trees, "Training treebank");
  c_train->add_option("--dev-trees", tf.dev_trees, "Dev treebank");
  c_train->add_option("--out-dir", tf.out_dir, "Output directory");
  c_train->add_option("--embeddings", tf.embeddings, "word2vec text vectors");
  c_train->add_option("--routing", tf.routing, "projected_top_recurrent | none");
  c_train->add_option("--layers", tf.layers);
  c_train->add_option("--hidden", tf.hidden);
  c_train->add_option("--embed", tf.embed);
  c_train->add_option("--init-scale", tf.init_scale);
  c_train->add_option("--lr", tf.lr);
  c_train->add_option("--batch-size", tf.batch_size);
  c_train->add_option("--max-epochs", tf.max_epochs);
  c_train->add_option("--max-steps", tf.max_steps);
  c_train->add_option("--dropout", tf.dropout);
  c_train->add_option("--clip", tf.clip);
  c_train->add_option("--seed", tf.seed);
  c_train->add_option("--eval-every", tf.eval_every);
  c_train->add_option("--patience", tf.patience);
  c_train->add_option("--eval-beam", tf.eval_beam);
  c_train->add_flag("--no-wall-clock", tf.no_wall_clock, "Omit wall-clock times from the log");

  ParseOpts po;
  auto* c_parse = app.add_subcommand("parse", "Parse tokenized sentences");
  c_parse->add_option("-m,--checkpoint", po.checkpoints, "Checkpoint (repeat for an ensemble)")
      ->required()
      ->allow_extra_args(false)
      ->check(CLI::ExistingFile);
  c_parse->add_option("input", po.input, "Sentences, one per line, space-tokenized")
      ->required()
      ->check(CLI::ExistingFile);
  c_parse->add_option("-o,--output", po.output, "Output treebank (default <out-dir>/parsed.trees)");
  c_parse->add_option("--out-dir", po.out_dir, "Output directory");
  c_parse->add_option("--beam", po.beam, "Beam size")->check(CLI::PositiveNumber);
  c_parse->add_option("--max-len", po.max_len, "Maximum output length");
  c_parse->add_flag("--attention", po.attention, "Write one attention TSV per sentence");
  c_parse->add_option("--attention-dir", po.attention_dir, "Directory for attention TSVs");
  c_parse->add_option("--fallback-root", po.fallback_root, "Root label used by repair");

  EvalOpts eo;
  auto* c_eval = app.add_subcommand("eval", "Score predicted trees against gold trees");
  c_eval->add_option("gold", eo.gold, "Gold treebank")->required()->check(CLI::ExistingFile);
  c_eval->add_option("pred", eo.pred, "Predicted treebank")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--out-dir", eo.out_dir, "Output directory");
  c_eval->add_flag("--buckets", eo.buckets, "Write buckets.tsv with F1 per length bound");
  c_eval->add_flag("--delete-punct", eo.delete_punct, "Delete punctuation before scoring");
  c_eval->add_option("--parse-stats", eo.parse_stats, "parse_stats.json to take the malformed rate from");

  std::string inspect_path;
  bool inspect_full = false;
  auto* c_inspect = app.add_subcommand("inspect-checkpoint", "Print a checkpoint header");
  c_inspect->add_option("checkpoint", inspect_path)->required()->check(CLI::ExistingFile);
  c_inspect->add_flag("--full", inspect_full, "Include vocabulary tokens");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_lin->parsed()) return cmd_linearize(lin);
    if (c_del->parsed()) return cmd_delinearize(del);
    if (c_gen->parsed()) return cmd_gen_corpus(gen);
    if (c_train->parsed()) return cmd_train(tf);
    if (c_parse->parsed()) return cmd_parse(po);
    if (c_eval->parsed()) return cmd_eval(eo);
    if (c_inspect->parsed()) return cmd_inspect(inspect_path, inspect_full);
  } catch (const std::exception& e) {
    std::cerr << "seqparse: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
