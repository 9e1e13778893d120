#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "wlmsc/correction.hpp"

using namespace wlmsc;

namespace {

constexpr TokenId kDelete = 5, kTimer = 6, kThirty = 7, kSecond = 8, kMy = 9,
                  kPlease = 10;

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.vocab_size = 20;
  cfg.hidden_dim = 8;
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.ff_dim = 16;
  cfg.max_positions = 8;
  cfg.dropout_rate = 0.0;
  return cfg;
}

HypothesisSet timer_set() {
  HypothesisSet set;
  set.id = "timer";
  set.golden = TokenSeq{kDelete, kThirty, kSecond, kTimer};
  set.top = {{kDelete, kTimer}, 0.9};
  set.additional = {{{kDelete, kThirty, kSecond, kTimer}, 0.6},
                    {{kDelete, kMy, kTimer, kPlease}, 0.4}};
  return set;
}

std::vector<PositionPrediction> preds_of(const std::vector<WarpOp>& ops,
                                         const TokenSeq& tokens) {
  std::vector<PositionPrediction> preds(ops.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    preds[i].op = ops[i];
    preds[i].token_id = tokens[i];
  }
  return preds;
}

}  // namespace

TEST_CASE("assembly pads the top and restarts positions per segment") {
  const ModelConfig cfg = small_config();
  HypothesisSet set = timer_set();
  set.additional.pop_back();  // single additional hypothesis first

  const AssembledInput one = assemble_input(set, cfg);
  CHECK(one.padded_top == TokenSeq{kDelete, kDumId, kDumId, kTimer});
  CHECK(one.num_segments == 2);
  CHECK(one.segment_len == 4);
  CHECK(one.batch.seq_len == 8);
  CHECK(one.batch.position_ids ==
        std::vector<int32_t>{0, 1, 2, 3, 0, 1, 2, 3});
  CHECK(one.batch.segment_ids == std::vector<int32_t>{0, 0, 0, 0, 1, 1, 1, 1});
  for (uint8_t m : one.batch.attention_mask) CHECK(m == 1);

  const AssembledInput two = assemble_input(timer_set(), cfg);
  CHECK(two.padded_top == TokenSeq{kDelete, kDumId, kDumId, kTimer, kDumId});
  CHECK(two.num_segments == 3);
  CHECK(two.segment_len == 5);
  // Both additional hypotheses are 4 tokens, so the 5th slot is padding.
  CHECK(two.batch.input_ids[5 + 4] == kPadId);
  CHECK(two.batch.attention_mask[5 + 4] == 0);
  CHECK(two.batch.attention_mask[2 * 5 + 4] == 0);
  CHECK(two.batch.input_ids[2 * 5 + 0] == kDelete);
}

TEST_CASE("assembly rejects oversized and empty inputs") {
  ModelConfig cfg = small_config();
  cfg.max_positions = 4;
  CHECK_THROWS_WITH_AS(assemble_input(timer_set(), cfg), "sequence too long",
                       std::invalid_argument);

  HypothesisSet empty;
  empty.id = "e";
  empty.top = {{}, 0.9};
  CHECK_THROWS_WITH_AS(assemble_input(empty, small_config()), "empty hypothesis set",
                       std::invalid_argument);

  HypothesisSet unsorted = timer_set();
  std::swap(unsorted.additional[0], unsorted.additional[1]);
  CHECK_THROWS_AS(assemble_input(unsorted, small_config()), std::invalid_argument);
}

TEST_CASE("fine-tuning example supervises every non-pad position") {
  const ModelConfig cfg = small_config();
  const HypothesisSet set = timer_set();
  const TrainExample ex = build_finetune_example(set, cfg);
  const AssembledInput assembled = assemble_input(set, cfg);
  REQUIRE(ex.input_ids.size() == assembled.batch.input_ids.size());

  for (size_t i = 0; i < ex.input_ids.size(); ++i) {
    CHECK(ex.loss_mask[i] == (ex.input_ids[i] != kPadId ? 1 : 0));
  }

  // Segment 0 carries the padded-top labels: KEEP MASK MASK KEEP + trailing
  // [DUM] with nothing to host -> INSERT.
  CHECK(ex.target_ops[0] == static_cast<uint8_t>(WarpOp::Keep));
  CHECK(ex.target_ops[1] == static_cast<uint8_t>(WarpOp::Mask));
  CHECK(ex.target_ids[1] == kThirty);
  CHECK(ex.target_ops[2] == static_cast<uint8_t>(WarpOp::Mask));
  CHECK(ex.target_ids[2] == kSecond);
  CHECK(ex.target_ops[3] == static_cast<uint8_t>(WarpOp::Keep));
  CHECK(ex.target_ops[4] == static_cast<uint8_t>(WarpOp::Insert));
  CHECK(ex.target_ids[4] == kInsertId);

  // Segment 1 is already the golden sentence: all KEEP.
  for (int i = 0; i < 4; ++i) {
    CHECK(ex.target_ops[5 + i] == static_cast<uint8_t>(WarpOp::Keep));
    CHECK(ex.target_ids[5 + i] == (*set.golden)[i]);
  }

  HypothesisSet no_golden = timer_set();
  no_golden.golden.reset();
  CHECK_THROWS_AS(build_finetune_example(no_golden, cfg), std::invalid_argument);
}

TEST_CASE("reconstruct inverts each warping operation") {
  // The worked example: two [DUM] slots filled by MASK predictions.
  CHECK(reconstruct({kDelete, kDumId, kDumId, kTimer},
                    preds_of({WarpOp::Keep, WarpOp::Mask, WarpOp::Mask, WarpOp::Keep},
                             {kDelete, kThirty, kSecond, kTimer})) ==
        TokenSeq{kDelete, kThirty, kSecond, kTimer});

  // KEEP on a [DUM] emits nothing.
  CHECK(reconstruct({kDelete, kDumId, kTimer},
                    preds_of({WarpOp::Keep, WarpOp::Keep, WarpOp::Keep},
                             {kDelete, kDelete, kTimer})) ==
        TokenSeq{kDelete, kTimer});

  // DROP emits the prediction, then the surviving input token.
  CHECK(reconstruct({kDelete, kTimer},
                    preds_of({WarpOp::Keep, WarpOp::Drop}, {kDelete, kThirty})) ==
        TokenSeq{kDelete, kThirty, kTimer});

  // INSERT deletes the spurious input token.
  CHECK(reconstruct({kDelete, kMy, kTimer},
                    preds_of({WarpOp::Keep, WarpOp::Insert, WarpOp::Keep},
                             {kDelete, kInsertId, kTimer})) ==
        TokenSeq{kDelete, kTimer});

  // RAND swaps in the prediction.
  CHECK(reconstruct({kDelete, kMy},
                    preds_of({WarpOp::Keep, WarpOp::Rand}, {kDelete, kTimer})) ==
        TokenSeq{kDelete, kTimer});
}

TEST_CASE("special predictions fall back to the input token") {
  ReconstructStats stats;
  // MASK predicting [MASK] keeps the input word instead.
  CHECK(reconstruct({kDelete, kTimer},
                    preds_of({WarpOp::Keep, WarpOp::Mask}, {kDelete, kMaskId}),
                    &stats) == TokenSeq{kDelete, kTimer});
  CHECK(stats.special_fallbacks == 1);

  // On a [DUM] slot the fallback has nothing to emit: the slot stays empty.
  stats = {};
  CHECK(reconstruct({kDelete, kDumId},
                    preds_of({WarpOp::Keep, WarpOp::Mask}, {kDelete, kPadId}),
                    &stats) == TokenSeq{kDelete});
  CHECK(stats.special_fallbacks == 1);

  CHECK_THROWS_AS(reconstruct({kDelete}, {}), std::invalid_argument);
}

TEST_CASE("unknown input tokens survive reconstruction") {
  CHECK(reconstruct({kDelete, kUnkId, kTimer},
                    preds_of({WarpOp::Keep, WarpOp::Keep, WarpOp::Keep},
                             {kDelete, kUnkId, kTimer})) ==
        TokenSeq{kDelete, kUnkId, kTimer});
}

TEST_CASE("prediction covers exactly the padded top hypothesis") {
  const ModelConfig cfg = small_config();
  const ModelParams<float> params(cfg);  // all-zero weights: uniform heads
  const HypothesisSet set = timer_set();
  const auto preds = predict_top(params, set);
  REQUIRE(preds.size() == 5);  // delete [DUM] [DUM] timer [DUM]
  for (const auto& p : preds) {
    CHECK(p.op == WarpOp::Mask);  // argmax of uniform logits is label id 0
    CHECK(p.op_prob == doctest::Approx(0.2));
    CHECK(p.token_prob == doctest::Approx(1.0 / cfg.vocab_size));
  }
}

TEST_CASE("confidence threshold demotes uncertain edits to KEEP") {
  const ModelConfig cfg = small_config();
  const ModelParams<float> params(cfg);
  const HypothesisSet set = timer_set();

  CorrectOptions cautious;
  cautious.op_confidence_threshold = 0.5;  // uniform op_prob 0.2 never clears it
  const CorrectionResult held = correct(params, set, cautious);
  CHECK(held.corrected == set.top.tokens);
  CHECK(held.edits.empty());
  CHECK(held.stats.special_fallbacks == 0);

  CorrectOptions eager;
  eager.op_confidence_threshold = 0.0;
  const CorrectionResult forced = correct(params, set, eager);
  // Every position argmaxes to MASK predicting [PAD]; the fallback re-emits
  // the input, so the sentence is unchanged but the edits are recorded.
  CHECK(forced.corrected == set.top.tokens);
  CHECK(forced.edits.size() == 5);
  CHECK(forced.stats.special_fallbacks == 5);
  for (const auto& e : forced.edits) {
    CHECK(e.op == WarpOp::Mask);
    CHECK(e.token == kPadId);
  }
}

TEST_CASE("additional hypotheses can be excluded") {
  const ModelConfig cfg = small_config();
  const ModelParams<float> params(cfg);
  HypothesisSet set = timer_set();
  CorrectOptions opts;
  opts.op_confidence_threshold = 0.5;
  opts.use_additional = false;
  const CorrectionResult result = correct(params, set, opts);
  CHECK(result.corrected == set.top.tokens);  // no [DUM] padding without them
}
