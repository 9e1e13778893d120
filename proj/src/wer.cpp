#include "wlmsc/wer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wlmsc/edit.hpp"

namespace wlmsc {

void validate(const HypothesisSet& set, int max_hypotheses) {
  if (static_cast<int>(set.additional.size()) > max_hypotheses - 1) {
    throw std::invalid_argument("too many additional hypotheses for utterance " + set.id);
  }
  for (size_t i = 1; i < set.additional.size(); ++i) {
    if (set.additional[i - 1].score < set.additional[i].score) {
      throw std::invalid_argument("additional hypotheses not sorted by score: " + set.id);
    }
  }
  auto check_tokens = [&](const TokenSeq& seq) {
    for (TokenId id : seq) {
      if (is_special(id) && id != kUnkId) {
        throw std::invalid_argument("special token inside raw hypothesis: " + set.id);
      }
    }
  };
  check_tokens(set.top.tokens);
  for (const auto& h : set.additional) check_tokens(h.tokens);
  if (set.golden) {
    for (TokenId id : *set.golden) {
      if (is_special(id)) {
        throw std::invalid_argument("special token inside golden: " + set.id);
      }
    }
  }
}

WerReport corpus_wer(const std::vector<TokenSeq>& candidates,
                     const std::vector<TokenSeq>& goldens,
                     const std::vector<std::string>* ids) {
  if (candidates.size() != goldens.size()) {
    throw std::invalid_argument("candidate/golden list length mismatch");
  }
  if (ids && ids->size() != goldens.size()) {
    throw std::invalid_argument("id list length mismatch");
  }
  WerReport report;
  report.per_utterance.reserve(goldens.size());
  for (size_t i = 0; i < goldens.size(); ++i) {
    if (goldens[i].empty()) {
      throw std::invalid_argument("empty golden at index " + std::to_string(i));
    }
    UtteranceWer u;
    u.id = ids ? (*ids)[i] : std::to_string(i);
    u.distance = levenshtein_distance(candidates[i], goldens[i]);
    u.golden_len = static_cast<int>(goldens[i].size());
    report.total_edit_distance += u.distance;
    report.total_golden_tokens += u.golden_len;
    report.per_utterance.push_back(std::move(u));
  }
  return report;
}

WerReport oracle_wer(const std::vector<HypothesisSet>& sets) {
  std::vector<TokenSeq> best;
  std::vector<TokenSeq> goldens;
  std::vector<std::string> ids;
  best.reserve(sets.size());
  goldens.reserve(sets.size());
  for (const HypothesisSet& set : sets) {
    if (!set.golden) throw std::invalid_argument("oracle_wer requires golden: " + set.id);
    int best_dist = levenshtein_distance(set.top.tokens, *set.golden);
    double best_score = set.top.score;
    const TokenSeq* pick = &set.top.tokens;
    for (const ScoredHypothesis& h : set.additional) {
      const int d = levenshtein_distance(h.tokens, *set.golden);
      if (d < best_dist || (d == best_dist && h.score > best_score)) {
        best_dist = d;
        best_score = h.score;
        pick = &h.tokens;
      }
    }
    best.push_back(*pick);
    goldens.push_back(*set.golden);
    ids.push_back(set.id);
  }
  return corpus_wer(best, goldens, &ids);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman requires two equal-length series, n >= 2");
  }
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const size_t n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) mx += rx[i], my += ry[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double cov = 0, vx = 0, vy = 0;
  for (size_t i = 0; i < n; ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  if (vx == 0 || vy == 0) return 0.0;
  return cov / std::sqrt(vx * vy);
}

}  // namespace wlmsc
