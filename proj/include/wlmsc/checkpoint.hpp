#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wlmsc/model.hpp"
#include "wlmsc/optimizer.hpp"

namespace wlmsc {

// Checkpoint layout: 6-byte magic "WLMSC1", uint32 little-endian JSON header
// length, the JSON header (model config, step, has_opt_state), then each
// tensor as raw little-endian float32 in declaration order. When optimizer
// state is included, the flattened Adam m and v vectors follow the tensors.
inline constexpr char kCheckpointMagic[] = "WLMSC1";

struct LoadedCheckpoint {
  ModelParams<float> params;
  std::optional<AdamState<float>> opt;
  int64_t step = 0;
};

void save_checkpoint(const std::string& path, const ModelParams<float>& params,
                     const AdamState<float>* opt, int64_t step);

// Throws std::runtime_error on missing file, bad magic, or truncation.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace wlmsc
