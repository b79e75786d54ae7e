// SPDX-License-Identifier: Apache-2.0
#include "gagcn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

namespace gagcn {

namespace {

constexpr char kMagic[8] = {'G', 'A', 'G', 'C', 'N', 'C', 'K', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndMarker = 0x444E4547u;  // "GEND"

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u8(std::ofstream& out, std::uint8_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in, const std::string& what) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError("checkpoint truncated while reading " + what);
  return v;
}

std::uint8_t read_u8(std::ifstream& in, const std::string& what) {
  std::uint8_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError("checkpoint truncated while reading " + what);
  return v;
}

std::string read_bytes(std::ifstream& in, std::size_t n, const std::string& what) {
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw IoError("checkpoint truncated while reading " + what);
  return s;
}

}  // namespace

namespace detail {

void write_checkpoint_raw(const std::filesystem::path& path, const std::string& meta,
                          const std::vector<RawTensorRef>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(meta.size()));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  write_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const RawTensorRef& t : tensors) {
    write_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_u8(out, t.prec == Precision::binary32 ? 0 : 1);
    write_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (const int d : t.shape) write_u32(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data), static_cast<std::streamsize>(t.bytes));
  }
  write_u32(out, kEndMarker);
  if (!out) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

}  // namespace detail

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("'" + path.string() + "' is not a checkpoint (bad magic)");
  }
  const std::uint32_t version = read_u32(in, "version");
  if (version != kVersion) {
    throw IoError("checkpoint '" + path.string() + "': unsupported version " +
                  std::to_string(version));
  }
  Checkpoint ck;
  const std::uint32_t meta_len = read_u32(in, "metadata length");
  ck.meta = read_bytes(in, meta_len, "metadata");
  const std::uint32_t count = read_u32(in, "tensor count");
  ck.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    const std::uint32_t name_len = read_u32(in, "tensor name length");
    e.name = read_bytes(in, name_len, "tensor name");
    const std::uint8_t prec = read_u8(in, "precision of '" + e.name + "'");
    if (prec > 1) {
      throw IoError("checkpoint: tensor '" + e.name + "' has unknown precision tag " +
                    std::to_string(prec));
    }
    e.prec = prec == 0 ? Precision::binary32 : Precision::binary64;
    const std::uint32_t rank = read_u32(in, "rank of '" + e.name + "'");
    std::size_t total = 1;
    e.shape.reserve(rank);
    for (std::uint32_t d = 0; d < rank; ++d) {
      const std::uint32_t ext = read_u32(in, "dims of '" + e.name + "'");
      e.shape.push_back(static_cast<int>(ext));
      total *= ext;
    }
    e.values.resize(total);
    if (e.prec == Precision::binary32) {
      std::vector<float> buf(total);
      in.read(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(total * sizeof(float)));
      if (!in) throw IoError("checkpoint truncated in payload of '" + e.name + "'");
      for (std::size_t j = 0; j < total; ++j) e.values[j] = static_cast<double>(buf[j]);
    } else {
      in.read(reinterpret_cast<char*>(e.values.data()),
              static_cast<std::streamsize>(total * sizeof(double)));
      if (!in) throw IoError("checkpoint truncated in payload of '" + e.name + "'");
    }
    ck.entries.push_back(std::move(e));
  }
  const std::uint32_t end = read_u32(in, "end marker");
  if (end != kEndMarker) {
    throw IoError("checkpoint '" + path.string() + "': bad end marker (file corrupt)");
  }
  return ck;
}

// ---- model metadata -----------------------------------------------------------

std::string to_string(ResidualMode m) {
  return m == ResidualMode::offset_from_last_frame ? "offset_from_last_frame" : "absolute";
}

ResidualMode residual_from_string(const std::string& s) {
  if (s == "offset_from_last_frame") return ResidualMode::offset_from_last_frame;
  if (s == "absolute") return ResidualMode::absolute;
  throw ConfigError("unknown residual mode '" + s +
                    "' (expected offset_from_last_frame or absolute)");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::relu:
      return "relu";
    case Activation::identity:
      return "identity";
  }
  return "tanh";
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  throw ConfigError("unknown activation '" + s + "' (expected tanh, relu or identity)");
}

void ModelConfig::validate() const {
  if (joints < 1) throw ConfigError("model: joints must be >= 1");
  if (channels < 1) throw ConfigError("model: channels must be >= 1");
  if (input_frames < 1 || output_frames < 1) {
    throw ConfigError("model: input_frames and output_frames must be >= 1");
  }
  if (n < 1 || m < 1) throw ConfigError("model: candidate counts n and m must be >= 1");
  if (encoder_layers < 1) throw ConfigError("model: encoder_layers must be >= 1");
  if (width < 1) throw ConfigError("model: width must be >= 1");
  if (decoder_blocks < 1) throw ConfigError("model: decoder_blocks must be >= 1");
  if (kernel < 1) throw ConfigError("model: kernel must be >= 1");
  if (dilations.empty()) throw ConfigError("model: dilations must not be empty");
  for (const int d : dilations) {
    if (d < 1) throw ConfigError("model: dilations must be >= 1");
  }
  if (receptive_field() < input_frames) {
    throw ConfigError("model: decoder receptive field " + std::to_string(receptive_field()) +
                      " is smaller than the " + std::to_string(input_frames) +
                      "-frame input window; add blocks, kernel taps or dilation");
  }
}

std::string model_meta_json(const ModelConfig& cfg, Precision prec) {
  nlohmann::json j;
  j["format"] = 1;
  j["precision"] = prec == Precision::binary32 ? "binary32" : "binary64";
  nlohmann::json m;
  m["joints"] = cfg.joints;
  m["channels"] = cfg.channels;
  m["input_frames"] = cfg.input_frames;
  m["output_frames"] = cfg.output_frames;
  m["n"] = cfg.n;
  m["m"] = cfg.m;
  m["encoder_layers"] = cfg.encoder_layers;
  m["width"] = cfg.width;
  m["embed_width"] = cfg.embed_width;
  m["decoder_blocks"] = cfg.decoder_blocks;
  m["kernel"] = cfg.kernel;
  m["dilations"] = cfg.dilations;
  m["activation"] = to_string(cfg.act);
  m["residual"] = to_string(cfg.residual);
  m["stable"] = cfg.stable;
  j["model"] = m;
  return j.dump();
}

ModelConfig model_config_from_meta(const std::string& meta) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }
  const auto& m = j.at("model");
  ModelConfig cfg;
  cfg.joints = m.at("joints").get<int>();
  cfg.channels = m.at("channels").get<int>();
  cfg.input_frames = m.at("input_frames").get<int>();
  cfg.output_frames = m.at("output_frames").get<int>();
  cfg.n = m.at("n").get<int>();
  cfg.m = m.at("m").get<int>();
  cfg.encoder_layers = m.at("encoder_layers").get<int>();
  cfg.width = m.at("width").get<int>();
  cfg.embed_width = m.at("embed_width").get<int>();
  cfg.decoder_blocks = m.at("decoder_blocks").get<int>();
  cfg.kernel = m.at("kernel").get<int>();
  cfg.dilations = m.at("dilations").get<std::vector<int>>();
  cfg.act = activation_from_string(m.at("activation").get<std::string>());
  cfg.residual = residual_from_string(m.at("residual").get<std::string>());
  cfg.stable = m.at("stable").get<bool>();
  cfg.validate();
  return cfg;
}

Precision precision_from_meta(const std::string& meta) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }
  const std::string p = j.at("precision").get<std::string>();
  if (p == "binary32") return Precision::binary32;
  if (p == "binary64") return Precision::binary64;
  throw IoError("checkpoint metadata: unknown precision '" + p + "'");
}

}  // namespace gagcn
