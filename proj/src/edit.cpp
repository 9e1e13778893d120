#include "wlmsc/edit.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace wlmsc {

namespace {

// Rectangular DP table indexed [i][j], i over A prefixes, j over B prefixes.
struct Table {
  int rows, cols;
  std::vector<int> d;
  Table(int n, int m) : rows(n + 1), cols(m + 1), d(static_cast<size_t>(rows) * cols) {}
  int& at(int i, int j) { return d[static_cast<size_t>(i) * cols + j]; }
  int at(int i, int j) const { return d[static_cast<size_t>(i) * cols + j]; }
};

}  // namespace

int levenshtein_distance(const TokenSeq& a, const TokenSeq& b) {
  const TokenSeq& shorter = a.size() <= b.size() ? a : b;
  const TokenSeq& longer = a.size() <= b.size() ? b : a;
  std::vector<int> row(shorter.size() + 1);
  for (size_t j = 0; j <= shorter.size(); ++j) row[j] = static_cast<int>(j);
  for (size_t i = 1; i <= longer.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (size_t j = 1; j <= shorter.size(); ++j) {
      const int sub = diag + (longer[i - 1] == shorter[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
    }
  }
  return row[shorter.size()];
}

EditScript levenshtein(const TokenSeq& a, const TokenSeq& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  Table t(n, m);
  for (int i = 0; i <= n; ++i) t.at(i, 0) = i;
  for (int j = 0; j <= m; ++j) t.at(0, j) = j;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int sub = t.at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
      t.at(i, j) = std::min({sub, t.at(i - 1, j) + 1, t.at(i, j - 1) + 1});
    }
  }

  EditScript script;
  script.total_cost = t.at(n, m);
  // Backtrace, preferring Match > Substitute > DeleteFromA > InsertIntoA.
  int i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && a[i - 1] == b[j - 1] && t.at(i - 1, j - 1) == t.at(i, j)) {
      script.steps.push_back({EditType::Match, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && t.at(i - 1, j - 1) + 1 == t.at(i, j)) {
      script.steps.push_back({EditType::Substitute, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && t.at(i - 1, j) + 1 == t.at(i, j)) {
      script.steps.push_back({EditType::DeleteFromA, i - 1, -1});
      --i;
    } else {
      script.steps.push_back({EditType::InsertIntoA, -1, j - 1});
      --j;
    }
  }
  std::reverse(script.steps.begin(), script.steps.end());
  return script;
}

std::vector<DumStep> align_with_dum(const TokenSeq& a, const TokenSeq& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  Table t(n, m);
  t.at(0, 0) = 0;
  for (int j = 1; j <= m; ++j) t.at(0, j) = j;
  for (int i = 1; i <= n; ++i) {
    t.at(i, 0) = t.at(i - 1, 0) + (a[i - 1] == kDumId ? 0 : 1);
  }
  for (int i = 1; i <= n; ++i) {
    const bool dum = a[i - 1] == kDumId;
    for (int j = 1; j <= m; ++j) {
      const int diag = t.at(i - 1, j - 1) + (dum ? 0 : (a[i - 1] == b[j - 1] ? 0 : 1));
      const int up = t.at(i - 1, j) + (dum ? 0 : 1);
      const int left = t.at(i, j - 1) + 1;
      t.at(i, j) = std::min({diag, up, left});
    }
  }

  std::vector<DumStep> steps;
  // Preference: Match > DumAbsorb > DumDelete > InsertIntoA > Substitute >
  // DeleteFromA. This ordering reproduces the reference padding behaviour:
  // placeholders soak up alignment slack first, and a genuine insertion is
  // taken before a substitution when both are minimal.
  int i = n, j = m;
  while (i > 0 || j > 0) {
    const bool dum = i > 0 && a[i - 1] == kDumId;
    if (i > 0 && j > 0 && !dum && a[i - 1] == b[j - 1] &&
        t.at(i - 1, j - 1) == t.at(i, j)) {
      steps.push_back({DumStepType::Match, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && dum && t.at(i - 1, j - 1) == t.at(i, j)) {
      steps.push_back({DumStepType::DumAbsorb, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && dum && t.at(i - 1, j) == t.at(i, j)) {
      steps.push_back({DumStepType::DumDelete, i - 1, -1});
      --i;
    } else if (j > 0 && t.at(i, j - 1) + 1 == t.at(i, j)) {
      steps.push_back({DumStepType::InsertIntoA, -1, j - 1});
      --j;
    } else if (i > 0 && j > 0 && !dum && t.at(i - 1, j - 1) + 1 == t.at(i, j)) {
      steps.push_back({DumStepType::Substitute, i - 1, j - 1});
      --i, --j;
    } else {
      steps.push_back({DumStepType::DeleteFromA, i - 1, -1});
      --i;
    }
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

TokenSeq insert_dum_tokens(const TokenSeq& top, const std::vector<TokenSeq>& additional) {
  for (TokenId id : top) {
    if (id == kDumId) throw std::invalid_argument("top hypothesis already contains [DUM]");
  }
  for (const TokenSeq& hyp : additional) {
    for (TokenId id : hyp) {
      if (is_special(id) && id != kUnkId) {
        throw std::invalid_argument("additional hypothesis contains special tokens");
      }
    }
  }

  TokenSeq current = top;
  for (const TokenSeq& hyp : additional) {
    const std::vector<DumStep> steps = align_with_dum(current, hyp);
    TokenSeq next;
    next.reserve(current.size());
    for (const DumStep& s : steps) {
      if (s.type == DumStepType::InsertIntoA) {
        next.push_back(kDumId);
      } else {
        next.push_back(current[static_cast<size_t>(s.a_index)]);
      }
    }
    current = std::move(next);
  }
  return current;
}

AlignmentLabels derive_warp_labels(const TokenSeq& hypothesis, const TokenSeq& truth) {
  if (truth.empty()) throw std::invalid_argument("empty truth");
  for (TokenId id : truth) {
    if (is_special(id)) throw std::invalid_argument("truth contains special tokens");
  }
  for (TokenId id : hypothesis) {
    if (is_special(id) && id != kDumId && id != kUnkId) {
      throw std::invalid_argument("hypothesis contains unexpected special tokens");
    }
  }

  const std::vector<DumStep> steps = align_with_dum(hypothesis, truth);

  AlignmentLabels out;
  out.target_ids.resize(hypothesis.size());
  out.target_ops.resize(hypothesis.size());

  // Truth indices that fell into insertions and have not yet found a host.
  // Kept in increasing truth order.
  std::deque<int> pending;

  for (const DumStep& s : steps) {
    switch (s.type) {
      case DumStepType::InsertIntoA:
        pending.push_back(s.b_index);
        break;
      case DumStepType::DumAbsorb: {
        // A [DUM] hosts the earliest outstanding missing token; the token it
        // absorbed in the script becomes the newest outstanding one.
        int hosted = s.b_index;
        if (!pending.empty()) {
          hosted = pending.front();
          pending.pop_front();
          pending.push_back(s.b_index);
        }
        out.target_ids[s.a_index] = truth[static_cast<size_t>(hosted)];
        out.target_ops[s.a_index] = WarpOp::Mask;
        break;
      }
      case DumStepType::DumDelete:
        if (!pending.empty()) {
          out.target_ids[s.a_index] = truth[static_cast<size_t>(pending.front())];
          out.target_ops[s.a_index] = WarpOp::Mask;
          pending.pop_front();
        } else {
          out.target_ids[s.a_index] = kInsertId;
          out.target_ops[s.a_index] = WarpOp::Insert;
        }
        break;
      case DumStepType::Match:
        if (!pending.empty()) {
          // Only the last missing token can ride on this position.
          out.target_ids[s.a_index] = truth[static_cast<size_t>(pending.back())];
          out.target_ops[s.a_index] = WarpOp::Drop;
          if (pending.size() > 1) out.lossy = true;
          pending.clear();
        } else {
          out.target_ids[s.a_index] = hypothesis[static_cast<size_t>(s.a_index)];
          out.target_ops[s.a_index] = WarpOp::Keep;
        }
        break;
      case DumStepType::Substitute:
        if (!pending.empty()) {
          // The DROP carry displaces the substitution fix; unrepresentable.
          out.target_ids[s.a_index] = truth[static_cast<size_t>(pending.back())];
          out.target_ops[s.a_index] = WarpOp::Drop;
          out.lossy = true;
          pending.clear();
        } else {
          out.target_ids[s.a_index] = truth[static_cast<size_t>(s.b_index)];
          out.target_ops[s.a_index] = WarpOp::Rand;
        }
        break;
      case DumStepType::DeleteFromA:
        // Spurious token: it emits nothing at reconstruction, so any pending
        // missing token safely carries past it.
        out.target_ids[s.a_index] = kInsertId;
        out.target_ops[s.a_index] = WarpOp::Insert;
        break;
    }
  }
  if (!pending.empty()) {
    // Missing tokens after the last hypothesis position have no host.
    out.lossy = true;
  }
  return out;
}

}  // namespace wlmsc
