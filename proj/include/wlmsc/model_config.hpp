#pragma once

#include <cstdint>
#include <string>

namespace wlmsc {

struct ModelConfig {
  int vocab_size = 0;
  int hidden_dim = 128;
  int num_layers = 4;
  int num_heads = 4;
  int ff_dim = 512;
  int max_positions = 32;
  int max_hypotheses = 5;
  double dropout_rate = 0.1;
  bool use_slot_embedding = false;
  uint64_t init_seed = 1234;
  double layer_norm_eps = 1e-5;

  int head_dim() const { return hidden_dim / num_heads; }
  // Throws std::invalid_argument on out-of-range or inconsistent values.
  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

}  // namespace wlmsc
