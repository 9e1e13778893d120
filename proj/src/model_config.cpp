#include "wlmsc/model_config.hpp"

#include <stdexcept>

#include "json.hpp"
#include "wlmsc/common.hpp"

namespace wlmsc {

void ModelConfig::validate() const {
  if (vocab_size <= kNumSpecialTokens) {
    throw std::invalid_argument("vocab_size must exceed the special-token count");
  }
  if (hidden_dim <= 0 || num_layers <= 0 || num_heads <= 0 || ff_dim <= 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (hidden_dim % num_heads != 0) {
    throw std::invalid_argument("hidden_dim must be divisible by num_heads");
  }
  if (max_positions <= 0 || max_hypotheses <= 0) {
    throw std::invalid_argument("max_positions and max_hypotheses must be positive");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("dropout_rate must be in [0, 1)");
  }
  if (layer_norm_eps <= 0.0) {
    throw std::invalid_argument("layer_norm_eps must be positive");
  }
}

std::string ModelConfig::to_json() const {
  nlohmann::json j;
  j["vocab_size"] = vocab_size;
  j["hidden_dim"] = hidden_dim;
  j["num_layers"] = num_layers;
  j["num_heads"] = num_heads;
  j["ff_dim"] = ff_dim;
  j["max_positions"] = max_positions;
  j["max_hypotheses"] = max_hypotheses;
  j["dropout_rate"] = dropout_rate;
  j["use_slot_embedding"] = use_slot_embedding;
  j["init_seed"] = init_seed;
  j["layer_norm_eps"] = layer_norm_eps;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad model config JSON: ") + e.what());
  }
  ModelConfig c;
  try {
    c.vocab_size = j.at("vocab_size").get<int>();
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.num_layers = j.value("num_layers", c.num_layers);
    c.num_heads = j.value("num_heads", c.num_heads);
    c.ff_dim = j.value("ff_dim", c.ff_dim);
    c.max_positions = j.value("max_positions", c.max_positions);
    c.max_hypotheses = j.value("max_hypotheses", c.max_hypotheses);
    c.dropout_rate = j.value("dropout_rate", c.dropout_rate);
    c.use_slot_embedding = j.value("use_slot_embedding", c.use_slot_embedding);
    c.init_seed = j.value("init_seed", c.init_seed);
    c.layer_norm_eps = j.value("layer_norm_eps", c.layer_norm_eps);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad model config JSON: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace wlmsc
