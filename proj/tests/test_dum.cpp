#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "wlmsc/correction.hpp"
#include "wlmsc/edit.hpp"
#include "wlmsc/rng.hpp"

using namespace wlmsc;

namespace {

// Word ids used throughout: delete=5 timer=6 thirty=7 second=8 my=9 please=10
// the=11.
constexpr TokenId kDelete = 5, kTimer = 6, kThirty = 7, kSecond = 8, kMy = 9,
                  kPlease = 10, kThe = 11;

TokenSeq strip_dum(const TokenSeq& seq) {
  TokenSeq out;
  for (TokenId id : seq) {
    if (id != kDumId) out.push_back(id);
  }
  return out;
}

int dum_script_cost(const std::vector<DumStep>& steps) {
  int cost = 0;
  for (const DumStep& s : steps) {
    cost += s.type == DumStepType::Substitute || s.type == DumStepType::DeleteFromA ||
            s.type == DumStepType::InsertIntoA;
  }
  return cost;
}

std::vector<PositionPrediction> to_predictions(const AlignmentLabels& labels) {
  std::vector<PositionPrediction> preds(labels.target_ids.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    preds[i].token_id = labels.target_ids[i];
    preds[i].op = labels.target_ops[i];
  }
  return preds;
}

TokenSeq random_sentence(Rng& rng, int min_len, int max_len, int words) {
  TokenSeq seq(min_len + rng.next_below(max_len - min_len + 1));
  for (auto& t : seq) {
    t = kNumSpecialTokens + static_cast<TokenId>(rng.next_below(words));
  }
  return seq;
}

}  // namespace

TEST_CASE("padding reproduces the worked timer example") {
  const TokenSeq top = {kDelete, kTimer};
  const TokenSeq hyp1 = {kDelete, kThirty, kSecond, kTimer};
  const TokenSeq hyp2 = {kDelete, kMy, kTimer, kPlease};

  const TokenSeq after_first = insert_dum_tokens(top, {hyp1});
  CHECK(after_first == TokenSeq{kDelete, kDumId, kDumId, kTimer});

  const TokenSeq after_both = insert_dum_tokens(top, {hyp1, hyp2});
  CHECK(after_both == TokenSeq{kDelete, kDumId, kDumId, kTimer, kDumId});
}

TEST_CASE("filled placeholders are labeled MASK with the absorbed tokens") {
  const TokenSeq hyp = {kDelete, kDumId, kDumId, kTimer};
  const TokenSeq truth = {kDelete, kThirty, kSecond, kTimer};
  const AlignmentLabels labels = derive_warp_labels(hyp, truth);
  CHECK(labels.target_ops ==
        std::vector<WarpOp>{WarpOp::Keep, WarpOp::Mask, WarpOp::Mask, WarpOp::Keep});
  CHECK(labels.target_ids == TokenSeq{kDelete, kThirty, kSecond, kTimer});
  CHECK_FALSE(labels.lossy);
}

TEST_CASE("spurious token is labeled INSERT targeting the insert id") {
  const AlignmentLabels labels =
      derive_warp_labels({kDelete, kMy, kTimer}, {kDelete, kTimer});
  CHECK(labels.target_ops ==
        std::vector<WarpOp>{WarpOp::Keep, WarpOp::Insert, WarpOp::Keep});
  CHECK(labels.target_ids == TokenSeq{kDelete, kInsertId, kTimer});
  CHECK_FALSE(labels.lossy);
}

TEST_CASE("unhosted missing token is carried as DROP on the next position") {
  const AlignmentLabels labels =
      derive_warp_labels({kDelete, kTimer}, {kDelete, kThe, kTimer});
  REQUIRE(labels.target_ops.size() == 2);
  CHECK(labels.target_ops == std::vector<WarpOp>{WarpOp::Keep, WarpOp::Drop});
  CHECK(labels.target_ids == TokenSeq{kDelete, kThe});
  CHECK_FALSE(labels.lossy);
}

TEST_CASE("two consecutive unhosted missing tokens fold and mark lossy") {
  const AlignmentLabels labels =
      derive_warp_labels({kDelete, kTimer}, {kDelete, kThirty, kSecond, kTimer});
  REQUIRE(labels.target_ops.size() == 2);
  CHECK(labels.target_ops[1] == WarpOp::Drop);
  CHECK(labels.target_ids[1] == kSecond);  // only the last missing token is carried
  CHECK(labels.lossy);
}

TEST_CASE("stripping placeholders recovers the top hypothesis") {
  Rng rng(55);
  for (int iter = 0; iter < 500; ++iter) {
    const TokenSeq top = random_sentence(rng, 1, 8, 5);
    std::vector<TokenSeq> additional;
    for (int h = 0; h < static_cast<int>(rng.next_below(4)); ++h) {
      additional.push_back(random_sentence(rng, 1, 9, 5));
    }
    const TokenSeq padded = insert_dum_tokens(top, additional);
    CHECK(padded.size() >= top.size());
    CHECK(strip_dum(padded) == top);
  }
}

TEST_CASE("placeholder-free alignment matches plain edit distance") {
  Rng rng(66);
  for (int iter = 0; iter < 500; ++iter) {
    const TokenSeq a = random_sentence(rng, 0, 7, 4);
    const TokenSeq b = random_sentence(rng, 1, 7, 4);
    const auto steps = align_with_dum(a, b);
    CHECK(dum_script_cost(steps) == levenshtein_distance(a, b));
  }
}

TEST_CASE("placeholders never change the cost between real tokens") {
  Rng rng(77);
  for (int iter = 0; iter < 500; ++iter) {
    const TokenSeq a = random_sentence(rng, 1, 6, 4);
    const TokenSeq b = random_sentence(rng, 1, 6, 4);
    TokenSeq padded;
    for (TokenId id : a) {
      while (rng.next_double() < 0.3) padded.push_back(kDumId);
      padded.push_back(id);
    }
    const int plain = dum_script_cost(align_with_dum(a, b));
    const int with_dum = dum_script_cost(align_with_dum(padded, b));
    CHECK(with_dum <= plain);  // placeholders can only absorb insertions
  }
}

TEST_CASE("labels round-trip through reconstruct when not lossy") {
  Rng rng(88);
  int checked = 0;
  for (int iter = 0; iter < 2000; ++iter) {
    const TokenSeq truth = random_sentence(rng, 1, 10, 6);
    const TokenSeq hyp_raw = random_sentence(rng, 1, 10, 6);
    std::vector<TokenSeq> additional;
    for (int h = 0; h < static_cast<int>(rng.next_below(3)); ++h) {
      additional.push_back(random_sentence(rng, 1, 11, 6));
    }
    const TokenSeq hyp = insert_dum_tokens(hyp_raw, additional);
    const AlignmentLabels labels = derive_warp_labels(hyp, truth);
    REQUIRE(labels.target_ids.size() == hyp.size());
    for (size_t i = 0; i < hyp.size(); ++i) {
      if (labels.target_ops[i] == WarpOp::Insert) {
        CHECK(labels.target_ids[i] == kInsertId);
      }
    }
    if (labels.lossy) continue;
    ++checked;
    CHECK(reconstruct(hyp, to_predictions(labels)) == truth);
  }
  CHECK(checked > 500);  // the property must actually exercise non-lossy pairs
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(derive_warp_labels({kDelete}, {}), std::invalid_argument);
  CHECK_THROWS_AS(derive_warp_labels({kDelete}, {kDumId}), std::invalid_argument);
  CHECK_THROWS_AS(insert_dum_tokens({kDelete, kDumId}, {}), std::invalid_argument);
  CHECK_THROWS_AS(insert_dum_tokens({kDelete}, {{kPadId}}), std::invalid_argument);
}
