#include "wlmsc/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace wlmsc {

namespace {

void write_u32_le(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("truncated checkpoint header");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_floats(std::ostream& out, const float* data, size_t count) {
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
}

void read_floats(std::istream& in, float* data, size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 4));
  if (!in) throw std::runtime_error("truncated checkpoint tensor data");
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams<float>& params,
                     const AdamState<float>* opt, int64_t step) {
  if (opt && opt->m.size() != params.num_params()) {
    throw std::invalid_argument("optimizer state does not match parameter count");
  }
  nlohmann::json header;
  header["config"] = nlohmann::json::parse(params.config.to_json());
  header["step"] = step;
  header["has_opt_state"] = opt != nullptr;
  const std::string header_text = header.dump();

  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    out.write(kCheckpointMagic, 6);
    write_u32_le(out, static_cast<uint32_t>(header_text.size()));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    params.for_each_tensor([&](const std::string&, const float* ptr, size_t n, int) {
      write_floats(out, ptr, n);
    });
    if (opt) {
      write_floats(out, opt->m.data(), opt->m.size());
      write_floats(out, opt->v.data(), opt->v.size());
    }
    if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
  }
  std::filesystem::rename(tmp, target);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kCheckpointMagic, 6) != 0) {
    throw std::runtime_error("bad checkpoint magic in " + path);
  }
  const uint32_t header_len = read_u32_le(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  if (!in) throw std::runtime_error("truncated checkpoint header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad checkpoint header JSON: ") + e.what());
  }
  const ModelConfig config = ModelConfig::from_json(header.at("config").dump());
  const int64_t step = header.value("step", int64_t{0});
  const bool has_opt = header.value("has_opt_state", false);

  LoadedCheckpoint loaded{ModelParams<float>(config), std::nullopt, step};
  loaded.params.for_each_tensor([&](const std::string&, float* ptr, size_t n, int) {
    read_floats(in, ptr, n);
  });
  if (has_opt) {
    AdamState<float> opt(loaded.params.num_params());
    read_floats(in, opt.m.data(), opt.m.size());
    read_floats(in, opt.v.data(), opt.v.size());
    opt.step = step;
    loaded.opt = std::move(opt);
  }
  return loaded;
}

}  // namespace wlmsc
