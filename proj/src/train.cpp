#include "wlmsc/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wlmsc/checkpoint.hpp"
#include "wlmsc/rng.hpp"

namespace wlmsc {

void TrainConfig::validate() const {
  if (steps <= 0) throw std::invalid_argument("steps must be positive");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (warmup_fraction < 0.0 || warmup_fraction > 1.0) {
    throw std::invalid_argument("warmup_fraction must be in [0, 1]");
  }
  if (divergence_threshold <= 0.0) {
    throw std::invalid_argument("divergence_threshold must be positive");
  }
  optimizer.validate();
}

Batch make_batch(const std::vector<TrainExample>& examples,
                 const std::vector<size_t>& indices, const ModelConfig& config) {
  if (indices.empty()) throw std::invalid_argument("empty batch");
  size_t max_len = 0;
  for (size_t idx : indices) {
    const TrainExample& ex = examples[idx];
    const size_t len = ex.input_ids.size();
    if (len == 0) throw std::invalid_argument("empty training example");
    if (ex.position_ids.size() != len || ex.segment_ids.size() != len ||
        ex.target_ids.size() != len || ex.target_ops.size() != len ||
        ex.loss_mask.size() != len) {
      throw std::invalid_argument("training example field length mismatch");
    }
    max_len = std::max(max_len, len);
  }

  Batch batch;
  batch.batch_size = static_cast<int>(indices.size());
  batch.seq_len = static_cast<int>(max_len);
  const size_t total = indices.size() * max_len;
  batch.input_ids.assign(total, kPadId);
  batch.position_ids.assign(total, 0);
  batch.segment_ids.assign(total, 0);
  batch.attention_mask.assign(total, 0);
  batch.target_ids.assign(total, kPadId);
  batch.target_ops.assign(total, static_cast<uint8_t>(WarpOp::Keep));
  batch.loss_mask.assign(total, 0);

  for (size_t row = 0; row < indices.size(); ++row) {
    const TrainExample& ex = examples[indices[row]];
    const size_t base = row * max_len;
    for (size_t i = 0; i < ex.input_ids.size(); ++i) {
      batch.input_ids[base + i] = ex.input_ids[i];
      batch.position_ids[base + i] = ex.position_ids[i];
      batch.segment_ids[base + i] = ex.segment_ids[i];
      batch.attention_mask[base + i] = 1;
      batch.target_ids[base + i] = ex.target_ids[i];
      batch.target_ops[base + i] = ex.target_ops[i];
      batch.loss_mask[base + i] = ex.loss_mask[i];
    }
  }
  batch.validate(config);
  return batch;
}

namespace {

struct EpochPerm {
  uint64_t seed = 0;
  uint64_t epoch = ~uint64_t{0};
  std::vector<size_t> order;
};

void fill_perm(EpochPerm& perm, uint64_t seed, size_t n, uint64_t epoch) {
  if (perm.seed == seed && perm.epoch == epoch && perm.order.size() == n) return;
  perm.order.resize(n);
  for (size_t i = 0; i < n; ++i) perm.order[i] = i;
  Rng rng(derive_seed(seed, "epoch", epoch));
  for (size_t i = n; i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(perm.order[i - 1], perm.order[j]);
  }
  perm.seed = seed;
  perm.epoch = epoch;
}

}  // namespace

size_t example_index_at(uint64_t seed, size_t dataset_size, uint64_t slot) {
  if (dataset_size == 0) throw std::invalid_argument("empty dataset");
  thread_local EpochPerm perm;
  const uint64_t epoch = slot / dataset_size;
  fill_perm(perm, seed, dataset_size, epoch);
  return perm.order[slot % dataset_size];
}

TrainResult train_model(ModelParams<float>& params, AdamState<float>& opt,
                        const std::vector<TrainExample>& dataset,
                        const TrainConfig& config, int64_t start_step,
                        const std::function<void(const std::string&)>& log) {
  config.validate();
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  if (start_step < 0 || start_step > config.steps) {
    throw std::invalid_argument("start_step out of range");
  }

  std::ofstream curve;
  if (!config.loss_curve_path.empty()) {
    const std::filesystem::path p(config.loss_curve_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const bool fresh = start_step == 0;
    curve.open(config.loss_curve_path,
               fresh ? std::ios::trunc : std::ios::app);
    if (!curve) {
      throw std::runtime_error("cannot open loss curve file: " + config.loss_curve_path);
    }
    if (fresh) curve << "step,loss,token_acc,op_acc\n";
  }

  const int64_t warmup_steps =
      static_cast<int64_t>(std::llround(config.warmup_fraction * config.steps));
  TrainResult result;
  Activations<float> acts;
  ModelParams<float> grads(params.config);

  for (int64_t step = start_step; step < config.steps; ++step) {
    std::vector<size_t> indices(config.batch_size);
    for (int k = 0; k < config.batch_size; ++k) {
      const uint64_t slot =
          static_cast<uint64_t>(step) * config.batch_size + static_cast<uint64_t>(k);
      indices[k] = example_index_at(config.seed, dataset.size(), slot);
    }
    const Batch batch = make_batch(dataset, indices, params.config);

    const uint64_t dropout_seed = derive_seed(config.seed, "dropout", step);
    const ForwardResult<float> fwd = forward(params, batch, true, dropout_seed, acts);
    const LossStats stats = backward(params, batch, fwd, acts, grads);

    if (!std::isfinite(stats.loss) || stats.loss > config.divergence_threshold) {
      std::ostringstream msg;
      msg << "training diverged at step " << step << " (loss " << stats.loss << ")";
      throw std::runtime_error(msg.str());
    }

    const double lr_now = lr_at_step(config.optimizer.lr, step, warmup_steps);
    adam_step(params, grads, opt, config.optimizer, lr_now);

    if (curve.is_open()) {
      const auto [tok_acc, op_acc] = head_accuracy(fwd, batch);
      curve << step << ',' << stats.loss << ',' << tok_acc << ',' << op_acc << '\n';
    }
    if (log && config.log_every > 0 &&
        (step % config.log_every == 0 || step + 1 == config.steps)) {
      std::ostringstream msg;
      msg << "step " << step << " lr " << lr_now << " loss " << stats.loss
          << " (token " << stats.token_loss << ", op " << stats.op_loss << ")";
      log(msg.str());
    }
    if (!config.checkpoint_path.empty() && config.checkpoint_every > 0 &&
        (step + 1) % config.checkpoint_every == 0 && step + 1 < config.steps) {
      save_checkpoint(config.checkpoint_path, params, &opt, step + 1);
    }

    result.steps_run = step + 1 - start_step;
    result.final_loss = stats.loss;
    result.final_token_loss = stats.token_loss;
    result.final_op_loss = stats.op_loss;
  }

  if (!config.checkpoint_path.empty()) {
    save_checkpoint(config.checkpoint_path, params, &opt, config.steps);
  }
  if (curve.is_open()) curve.flush();
  return result;
}

EvalStats evaluate_examples(const ModelParams<float>& params,
                            const std::vector<TrainExample>& dataset, int batch_size) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  Activations<float> acts;
  double loss_sum = 0.0;
  double token_acc_sum = 0.0;
  double op_acc_sum = 0.0;
  int64_t supervised_total = 0;
  for (size_t begin = 0; begin < dataset.size(); begin += batch_size) {
    const size_t end = std::min(dataset.size(), begin + batch_size);
    std::vector<size_t> indices(end - begin);
    for (size_t i = begin; i < end; ++i) indices[i - begin] = i;
    const Batch batch = make_batch(dataset, indices, params.config);
    const ForwardResult<float> fwd = forward(params, batch, false, 0, acts);
    const LossStats stats = compute_loss(fwd.token_logits, fwd.op_logits, batch);
    const auto [tok_acc, op_acc] = head_accuracy(fwd, batch);
    loss_sum += stats.loss * stats.supervised;
    token_acc_sum += tok_acc * stats.supervised;
    op_acc_sum += op_acc * stats.supervised;
    supervised_total += stats.supervised;
  }
  EvalStats out;
  if (supervised_total > 0) {
    out.loss = loss_sum / supervised_total;
    out.token_accuracy = token_acc_sum / supervised_total;
    out.op_accuracy = op_acc_sum / supervised_total;
  }
  return out;
}

}  // namespace wlmsc
