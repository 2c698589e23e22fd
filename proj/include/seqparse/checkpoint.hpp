#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "seqparse/model.hpp"
#include "seqparse/vocab.hpp"

namespace seqparse {

// Container layout, all integers little-endian:
//   8 bytes   magic "SQPCKPT1"
//   8 bytes   u64 header length N
//   N bytes   JSON header: format_version, shape, routing, dropout_rate,
//             init_scale, seed, vocabularies, the ordered array table
//             (name, rows, cols) and free-form `meta`
//   ...       every array as IEEE-754 binary64, column-major, in table order
struct Checkpoint {
  ModelParams params;
  Vocab input_vocab;
  Vocab output_vocab;
  std::uint64_t seed = 0;
  Real init_scale = 0.08;
  nlohmann::json meta = nlohmann::json::object();
};

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Header only, for inspection.
nlohmann::json read_checkpoint_header(std::istream& in);

}  // namespace seqparse
