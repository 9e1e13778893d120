#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wlmsc/model.hpp"
#include "wlmsc/optimizer.hpp"

namespace wlmsc {

// One training example; sequences carry their own position and segment ids so
// pretraining (single segment) and correction fine-tuning (multi-segment)
// share the loop.
struct TrainExample {
  std::vector<TokenId> input_ids;
  std::vector<int32_t> position_ids;
  std::vector<int32_t> segment_ids;
  std::vector<TokenId> target_ids;
  std::vector<uint8_t> target_ops;
  std::vector<uint8_t> loss_mask;
};

struct TrainConfig {
  int64_t steps = 1000;
  int batch_size = 16;
  OptimizerConfig optimizer;
  double warmup_fraction = 0.05;
  uint64_t seed = 42;
  int64_t log_every = 50;
  int64_t checkpoint_every = 0;  // 0 = only at the end
  double divergence_threshold = 1e4;
  std::string checkpoint_path;
  std::string loss_curve_path;

  void validate() const;
};

struct TrainResult {
  int64_t steps_run = 0;
  double final_loss = 0.0;
  double final_token_loss = 0.0;
  double final_op_loss = 0.0;
};

// Pads the selected examples to a common length and flattens them.
Batch make_batch(const std::vector<TrainExample>& examples,
                 const std::vector<size_t>& indices, const ModelConfig& config);

// Index of the example used at global slot `slot` (= step * batch_size + k).
// Each epoch is a Fisher-Yates permutation seeded from (seed, epoch), so the
// schedule depends only on the global step and survives checkpoint resume.
size_t example_index_at(uint64_t seed, size_t dataset_size, uint64_t slot);

// Runs AdamW training from `start_step` (the step recorded in a resumed
// checkpoint, 0 for fresh runs). Appends one CSV row per step to
// loss_curve_path when set, and throws on divergence.
TrainResult train_model(ModelParams<float>& params, AdamState<float>& opt,
                        const std::vector<TrainExample>& dataset,
                        const TrainConfig& config, int64_t start_step,
                        const std::function<void(const std::string&)>& log = {});

// Mean loss and head accuracies over a dataset in evaluation mode.
struct EvalStats {
  double loss = 0.0;
  double token_accuracy = 0.0;
  double op_accuracy = 0.0;
};
EvalStats evaluate_examples(const ModelParams<float>& params,
                            const std::vector<TrainExample>& dataset, int batch_size);

}  // namespace wlmsc
