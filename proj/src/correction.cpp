#include "wlmsc/correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wlmsc {

namespace {

std::vector<TokenSeq> additional_texts(const HypothesisSet& set) {
  std::vector<TokenSeq> out;
  out.reserve(set.additional.size());
  for (const auto& h : set.additional) out.push_back(h.tokens);
  return out;
}

}  // namespace

AssembledInput assemble_input(const HypothesisSet& set, const ModelConfig& config) {
  validate(set, config.max_hypotheses);

  AssembledInput out;
  out.padded_top = insert_dum_tokens(set.top.tokens, additional_texts(set));
  out.num_segments = 1 + static_cast<int>(set.additional.size());

  size_t common = out.padded_top.size();
  for (const auto& h : set.additional) common = std::max(common, h.tokens.size());
  if (common > static_cast<size_t>(config.max_positions)) {
    throw std::invalid_argument("sequence too long");
  }
  if (common == 0) throw std::invalid_argument("empty hypothesis set");
  out.segment_len = static_cast<int>(common);

  const int total = out.num_segments * out.segment_len;
  Batch& b = out.batch;
  b.batch_size = 1;
  b.seq_len = total;
  b.input_ids.assign(total, kPadId);
  b.position_ids.assign(total, 0);
  b.segment_ids.assign(total, 0);
  b.attention_mask.assign(total, 0);
  b.target_ids.assign(total, kPadId);
  b.target_ops.assign(total, static_cast<uint8_t>(WarpOp::Keep));
  b.loss_mask.assign(total, 0);

  for (int seg = 0; seg < out.num_segments; ++seg) {
    const TokenSeq& tokens = seg == 0 ? out.padded_top : set.additional[seg - 1].tokens;
    const int base = seg * out.segment_len;
    for (int i = 0; i < out.segment_len; ++i) {
      b.position_ids[base + i] = i;
      b.segment_ids[base + i] = seg;
    }
    for (size_t i = 0; i < tokens.size(); ++i) {
      b.input_ids[base + i] = tokens[i];
      b.attention_mask[base + i] = 1;
    }
  }
  return out;
}

TrainExample build_finetune_example(const HypothesisSet& set, const ModelConfig& config) {
  if (!set.golden) {
    throw std::invalid_argument("fine-tuning requires a golden sentence");
  }
  AssembledInput assembled = assemble_input(set, config);
  const Batch& b = assembled.batch;

  TrainExample ex;
  ex.input_ids = b.input_ids;
  ex.position_ids = b.position_ids;
  ex.segment_ids = b.segment_ids;
  ex.target_ids.assign(b.input_ids.size(), kPadId);
  ex.target_ops.assign(b.input_ids.size(), static_cast<uint8_t>(WarpOp::Keep));
  ex.loss_mask.assign(b.input_ids.size(), 0);

  for (int seg = 0; seg < assembled.num_segments; ++seg) {
    const TokenSeq& tokens =
        seg == 0 ? assembled.padded_top : set.additional[seg - 1].tokens;
    if (tokens.empty()) continue;
    const AlignmentLabels labels = derive_warp_labels(tokens, *set.golden);
    const int base = seg * assembled.segment_len;
    for (size_t i = 0; i < tokens.size(); ++i) {
      ex.target_ids[base + i] = labels.target_ids[i];
      ex.target_ops[base + i] = static_cast<uint8_t>(labels.target_ops[i]);
      ex.loss_mask[base + i] = 1;
    }
  }
  return ex;
}

std::vector<PositionPrediction> predict_top(const ModelParams<float>& params,
                                            const HypothesisSet& set) {
  const AssembledInput assembled = assemble_input(set, params.config);
  Activations<float> acts;
  const ForwardResult<float> fwd = forward(params, assembled.batch, false, 0, acts);

  std::vector<PositionPrediction> preds;
  preds.reserve(assembled.padded_top.size());
  for (size_t i = 0; i < assembled.padded_top.size(); ++i) {
    const float* trow = fwd.token_logits.row(static_cast<int>(i));
    const float* orow = fwd.op_logits.row(static_cast<int>(i));
    PositionPrediction p;

    auto argmax_softmax = [&](const float* row, int cols, int& best, double& prob) {
      best = 0;
      for (int j = 1; j < cols; ++j) {
        if (row[j] > row[best]) best = j;
      }
      double denom = 0.0;
      for (int j = 0; j < cols; ++j) {
        const double v = std::exp(static_cast<double>(row[j]) - row[best]);
        if (!std::isfinite(v)) {
          throw std::runtime_error("non-finite logits (untrained parameters?)");
        }
        denom += v;
      }
      prob = 1.0 / denom;
    };

    int best = 0;
    argmax_softmax(trow, fwd.token_logits.cols, best, p.token_prob);
    p.token_id = best;
    argmax_softmax(orow, fwd.op_logits.cols, best, p.op_prob);
    p.op = static_cast<WarpOp>(best);
    preds.push_back(p);
  }
  return preds;
}

TokenSeq reconstruct(const TokenSeq& input, const std::vector<PositionPrediction>& preds,
                     ReconstructStats* stats) {
  if (input.size() != preds.size()) {
    throw std::invalid_argument("prediction count does not match input length");
  }
  TokenSeq out;
  out.reserve(input.size());
  auto emit_input = [&](TokenId id) {
    if (id != kDumId && !is_special(id)) out.push_back(id);
    if (id == kUnkId) out.push_back(id);  // [UNK] present in the input survives
  };
  auto emit_predicted = [&](size_t i) {
    if (!is_special(preds[i].token_id)) {
      out.push_back(preds[i].token_id);
    } else {
      if (stats) ++stats->special_fallbacks;
      emit_input(input[i]);
    }
  };
  for (size_t i = 0; i < input.size(); ++i) {
    switch (preds[i].op) {
      case WarpOp::Keep:
        emit_input(input[i]);
        break;
      case WarpOp::Rand:
      case WarpOp::Mask:
        emit_predicted(i);
        break;
      case WarpOp::Drop:
        emit_predicted(i);
        emit_input(input[i]);
        break;
      case WarpOp::Insert:
        break;
    }
  }
  return out;
}

CorrectionResult correct(const ModelParams<float>& params, const HypothesisSet& set,
                         const CorrectOptions& options) {
  HypothesisSet working = set;
  if (!options.use_additional) working.additional.clear();

  std::vector<PositionPrediction> preds = predict_top(params, working);
  const AssembledInput assembled = assemble_input(working, params.config);
  const TokenSeq& input = assembled.padded_top;

  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].op != WarpOp::Keep && preds[i].op_prob < options.op_confidence_threshold) {
      preds[i].op = WarpOp::Keep;
    }
  }

  CorrectionResult result;
  result.corrected = reconstruct(input, preds, &result.stats);
  for (size_t i = 0; i < preds.size(); ++i) {
    const WarpOp op = preds[i].op;
    if (op == WarpOp::Keep) continue;
    if (op == WarpOp::Insert && input[i] == kDumId) continue;  // no-op on a slot
    AppliedEdit edit;
    edit.pos = static_cast<int>(i);
    edit.op = op;
    if (op == WarpOp::Rand || op == WarpOp::Mask || op == WarpOp::Drop) {
      edit.token = preds[i].token_id;
    }
    result.edits.push_back(edit);
  }
  return result;
}

}  // namespace wlmsc
