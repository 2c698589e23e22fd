#include "seqparse/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace seqparse {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'Q', 'P', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) {
    throw std::runtime_error("checkpoint: truncated");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

nlohmann::json shape_json(const ModelShape& s) {
  return {{"layers", s.layers},           {"hidden", s.hidden},
          {"embed", s.embed},             {"input_vocab", s.input_vocab},
          {"output_vocab", s.output_vocab}, {"dropout_rate", s.dropout_rate},
          {"routing", std::string(routing_name(s.routing))}};
}

ModelShape shape_from_json(const nlohmann::json& j) {
  ModelShape s;
  s.layers = j.at("layers").get<int>();
  s.hidden = j.at("hidden").get<int>();
  s.embed = j.at("embed").get<int>();
  s.input_vocab = j.at("input_vocab").get<int>();
  s.output_vocab = j.at("output_vocab").get<int>();
  s.dropout_rate = j.at("dropout_rate").get<Real>();
  s.routing = routing_from_name(j.at("routing").get<std::string>());
  return s;
}

nlohmann::json build_header(const Checkpoint& c) {
  nlohmann::json arrays = nlohmann::json::array();
  for_each_array(c.params, [&](std::string_view name, const auto& a) {
    arrays.push_back({{"name", std::string(name)}, {"rows", a.rows()}, {"cols", a.cols()}});
  });
  return {{"format", "seqparse-checkpoint"},
          {"format_version", kCheckpointVersion},
          {"byte_order", "little"},
          {"scalar", "float64"},
          {"shape", shape_json(c.params.shape)},
          {"seed", c.seed},
          {"init_scale", c.init_scale},
          {"input_vocab", c.input_vocab.tokens()},
          {"output_vocab", c.output_vocab.tokens()},
          {"arrays", arrays},
          {"meta", c.meta}};
}

void write_reals(std::ostream& out, const Real* data, Eigen::Index n) {
  static_assert(sizeof(Real) == 8);
  for (Eigen::Index i = 0; i < n; ++i) put_u64(out, std::bit_cast<std::uint64_t>(data[i]));
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const std::string header = build_header(ckpt).dump();
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for_each_array(ckpt.params, [&](std::string_view, const auto& a) { write_reals(out, a.data(), a.size()); });
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

nlohmann::json read_checkpoint_header(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const std::uint64_t len = get_u64(in);
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    throw std::runtime_error("checkpoint: truncated header");
  }
  nlohmann::json header = nlohmann::json::parse(text);
  if (header.value("format_version", 0) != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported format version");
  }
  return header;
}

Checkpoint read_checkpoint(std::istream& in) {
  const nlohmann::json header = read_checkpoint_header(in);
  Checkpoint c;
  const ModelShape shape = shape_from_json(header.at("shape"));
  Rng unused(0);
  c.params = make_params(shape, unused);
  c.seed = header.at("seed").get<std::uint64_t>();
  c.init_scale = header.at("init_scale").get<Real>();
  c.input_vocab = Vocab(VocabKind::kInput, header.at("input_vocab").get<std::vector<std::string>>());
  c.output_vocab = Vocab(VocabKind::kOutput, header.at("output_vocab").get<std::vector<std::string>>());
  c.meta = header.value("meta", nlohmann::json::object());
  const auto& table = header.at("arrays");
  std::size_t k = 0;
  for_each_array(c.params, [&](std::string_view name, auto& a) {
    if (k >= table.size()) throw std::runtime_error("checkpoint: array table too short");
    const auto& entry = table[k++];
    if (entry.at("name").get<std::string>() != name || entry.at("rows").get<Eigen::Index>() != a.rows() ||
        entry.at("cols").get<Eigen::Index>() != a.cols()) {
      throw std::runtime_error("checkpoint: array table disagrees with shape at " + std::string(name));
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = std::bit_cast<Real>(get_u64(in));
  });
  if (k != table.size()) throw std::runtime_error("checkpoint: array table too long");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_checkpoint(in);
}

}  // namespace seqparse
