#pragma once

#include <vector>

#include "wlmsc/common.hpp"

namespace wlmsc {

enum class EditType : std::uint8_t { Match, Substitute, DeleteFromA, InsertIntoA };

struct EditStep {
  EditType type;
  int a_index;  // index into A, -1 for InsertIntoA
  int b_index;  // index into B, -1 for DeleteFromA
  bool operator==(const EditStep&) const = default;
};

struct EditScript {
  std::vector<EditStep> steps;  // visits A and B monotonically and exhaustively
  int total_cost = 0;           // number of non-Match steps == edit distance
};

// Unit-cost token edit distance with a deterministic backtrace. Ties resolve
// Match > Substitute > DeleteFromA > InsertIntoA.
EditScript levenshtein(const TokenSeq& a, const TokenSeq& b);

// Distance only; O(min(|a|,|b|)) memory. Hot path for WER.
int levenshtein_distance(const TokenSeq& a, const TokenSeq& b);

// --- [DUM]-aware alignment -------------------------------------------------
//
// Shared by hypothesis padding and label derivation. A may contain [DUM]
// placeholders, B never does. A [DUM] aligns to any B token at cost 0
// (DumAbsorb) and deletes at cost 0 when unused (DumDelete), so placeholders
// never distort the distance between real tokens. Real tokens keep unit
// costs. Backtrace preference:
//   Match > DumAbsorb > DumDelete > InsertIntoA > Substitute > DeleteFromA.

enum class DumStepType : std::uint8_t {
  Match,        // real token == real token
  Substitute,   // real vs real, unequal
  DeleteFromA,  // real A token absent from B
  InsertIntoA,  // B token with no A slot
  DumAbsorb,    // [DUM] aligned to a B token
  DumDelete,    // [DUM] aligned to nothing
};

struct DumStep {
  DumStepType type;
  int a_index;  // -1 for InsertIntoA
  int b_index;  // -1 for DeleteFromA / DumDelete
  bool operator==(const DumStep&) const = default;
};

std::vector<DumStep> align_with_dum(const TokenSeq& a, const TokenSeq& b);

// Appendix-style padding: for each additional hypothesis in confidence order,
// aligns the current top sequence to it and inserts a [DUM] wherever the
// script needs an insertion; no other changes are made.
TokenSeq insert_dum_tokens(const TokenSeq& top,
                           const std::vector<TokenSeq>& additional);

struct AlignmentLabels {
  TokenSeq target_ids;               // same length as the hypothesis
  std::vector<WarpOp> target_ops;
  bool lossy = false;                // true when a missing token had to be folded
};

// Maps the minimal script from hypothesis (possibly [DUM]-padded) to truth
// onto per-position warping labels:
//   Match -> (KEEP, token); Substitute -> (RAND, truth token);
//   spurious real token -> (INSERT, [INSERT]); [DUM] absorbing a truth token
//   -> (MASK, truth token); unused [DUM] -> (INSERT, [INSERT]); a missing
//   truth token is carried as (DROP, token) on the next hypothesis position.
// Missing tokens that cannot be carried exactly set lossy.
AlignmentLabels derive_warp_labels(const TokenSeq& hypothesis, const TokenSeq& truth);

}  // namespace wlmsc
