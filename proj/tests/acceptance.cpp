// Acceptance gate: ten pass/fail checks covering alignment round trips,
// edit-distance correctness, model gradients, and a scaled-down end-to-end
// correction experiment on the bundled toy corpus. Prints one line per
// criterion and exits nonzero if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wlmsc/correction.hpp"
#include "wlmsc/dataset.hpp"
#include "wlmsc/edit.hpp"
#include "wlmsc/evalreport.hpp"
#include "wlmsc/io.hpp"
#include "wlmsc/model.hpp"
#include "wlmsc/noisesim.hpp"
#include "wlmsc/rng.hpp"
#include "wlmsc/train.hpp"
#include "wlmsc/vocab.hpp"
#include "wlmsc/warp.hpp"
#include "wlmsc/wer.hpp"

#ifndef WLMSC_TOY_CORPUS
#define WLMSC_TOY_CORPUS "data/toy.txt"
#endif

namespace {

using namespace wlmsc;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", x * 100.0);
  return buf;
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f s", s);
  return buf;
}

// Toy corpus plus the vocabulary built from it, shared by criteria 1 and 8-10.
struct Env {
  std::vector<std::string> lines;
  Vocabulary vocab;
  std::vector<TokenSeq> sentences;
};

const Env& env() {
  static const Env e = [] {
    std::vector<std::string> lines = read_lines(WLMSC_TOY_CORPUS);
    Vocabulary vocab = Vocabulary::build(lines, 1);
    std::vector<TokenSeq> sentences;
    for (const auto& line : lines) {
      TokenSeq tokens = vocab.tokenize(line);
      if (!tokens.empty()) sentences.push_back(std::move(tokens));
    }
    return Env{std::move(lines), std::move(vocab), std::move(sentences)};
  }();
  return e;
}

std::vector<PositionPrediction> to_predictions(const AlignmentLabels& labels) {
  std::vector<PositionPrediction> preds(labels.target_ids.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    preds[i].token_id = labels.target_ids[i];
    preds[i].op = labels.target_ops[i];
  }
  return preds;
}

TokenSeq padded_top(const HypothesisSet& set) {
  std::vector<TokenSeq> additional;
  additional.reserve(set.additional.size());
  for (const auto& h : set.additional) additional.push_back(h.tokens);
  return insert_dum_tokens(set.top.tokens, additional);
}

// --- criterion 1 -----------------------------------------------------------

double lossy_fraction(const NoiseProfile& profile, const ConfusionTable& table,
                      size_t pairs, uint64_t index_offset) {
  const Env& e = env();
  size_t lossy = 0;
  for (size_t i = 0; i < pairs; ++i) {
    const TokenSeq& truth = e.sentences[(index_offset + i) % e.sentences.size()];
    const HypothesisSet set =
        simulate_set(truth, profile, table, index_offset + i, std::to_string(i));
    if (derive_warp_labels(padded_top(set), truth).lossy) ++lossy;
  }
  return static_cast<double>(lossy) / static_cast<double>(pairs);
}

Outcome criterion1() {
  const Timer timer;
  const Env& e = env();
  const ConfusionTable table(e.vocab, 1.5);

  // All sweep profiles stay at or below 30% combined corruption.
  std::vector<NoiseProfile> sweep(4);
  sweep[0].sub_rate = 0.10, sweep[0].del_rate = 0.01, sweep[0].ins_rate = 0.01;
  sweep[1].sub_rate = 0.15, sweep[1].del_rate = 0.02, sweep[1].ins_rate = 0.02;
  sweep[2].sub_rate = 0.22, sweep[2].del_rate = 0.03, sweep[2].ins_rate = 0.03;
  sweep[3].sub_rate = 0.25, sweep[3].del_rate = 0.02, sweep[3].ins_rate = 0.02;
  for (size_t i = 0; i < sweep.size(); ++i) {
    sweep[i].seed = 90 + i;
    sweep[i].validate();
  }

  const size_t kPairs = 10000;
  size_t lossy = 0;
  size_t mismatches = 0;
  for (size_t i = 0; i < kPairs; ++i) {
    const TokenSeq& truth = e.sentences[i % e.sentences.size()];
    const HypothesisSet set =
        simulate_set(truth, sweep[i % sweep.size()], table, i, std::to_string(i));
    const TokenSeq padded = padded_top(set);
    const AlignmentLabels labels = derive_warp_labels(padded, truth);
    if (labels.lossy) {
      ++lossy;
      continue;
    }
    if (reconstruct(padded, to_predictions(labels)) != truth) ++mismatches;
  }

  const double asr_lossy = lossy_fraction(default_asr_profile(501), table, 5000, 0);
  const double human_lossy = lossy_fraction(default_human_profile(502), table, 5000, 17);

  const double elapsed = timer.seconds();
  const bool pass = mismatches == 0 && asr_lossy < 0.05 && human_lossy < 0.05 &&
                    elapsed < 10.0;
  std::ostringstream detail;
  detail << (kPairs - lossy) << "/" << kPairs << " non-lossy pairs round-trip exactly, "
         << mismatches << " mismatches; default-profile lossy asr " << pct(asr_lossy)
         << " human " << pct(human_lossy) << "; " << secs(elapsed);
  return {pass, detail.str()};
}

// --- criterion 2 -----------------------------------------------------------

int brute_force_distance(const TokenSeq& a, const TokenSeq& b, size_t i, size_t j) {
  if (i == a.size()) return static_cast<int>(b.size() - j);
  if (j == b.size()) return static_cast<int>(a.size() - i);
  const int sub = (a[i] == b[j] ? 0 : 1) + brute_force_distance(a, b, i + 1, j + 1);
  const int del = 1 + brute_force_distance(a, b, i + 1, j);
  const int ins = 1 + brute_force_distance(a, b, i, j + 1);
  return std::min({sub, del, ins});
}

Outcome criterion2() {
  const Timer timer;
  const std::vector<TokenId> alphabet = {5, 6, 7};
  std::vector<TokenSeq> all = {{}};
  std::vector<TokenSeq> frontier = {{}};
  for (int len = 1; len <= 4; ++len) {
    std::vector<TokenSeq> next;
    for (const TokenSeq& seq : frontier) {
      for (TokenId t : alphabet) {
        TokenSeq grown = seq;
        grown.push_back(t);
        next.push_back(grown);
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }

  size_t checked = 0;
  size_t wrong = 0;
  for (const TokenSeq& a : all) {
    for (const TokenSeq& b : all) {
      const int expected = brute_force_distance(a, b, 0, 0);
      if (levenshtein_distance(a, b) != expected ||
          levenshtein(a, b).total_cost != expected) {
        ++wrong;
      }
      ++checked;
    }
  }

  const double elapsed = timer.seconds();
  const bool pass = wrong == 0 && checked == all.size() * all.size() && elapsed < 30.0;
  std::ostringstream detail;
  detail << checked << " pairs over " << all.size()
         << " sequences match exhaustive search, " << wrong << " mismatches; "
         << secs(elapsed);
  return {pass, detail.str()};
}

// --- criterion 3 -----------------------------------------------------------

Outcome criterion3() {
  const std::vector<TokenSeq> candidates = {
      {5, 6, 7}, {5, 6, 8}, {5, 7}, {5, 6, 9, 10}, {5, 6, 7}};
  const std::vector<TokenSeq> goldens = {
      {5, 6, 7}, {5, 6, 7}, {5, 6, 7}, {5, 6, 7, 8}, {9}};
  // Hand-computed distances 0, 1, 1, 2, 3 over golden lengths 3, 3, 3, 4, 1.
  const WerReport report = corpus_wer(candidates, goldens);

  const bool totals_ok =
      report.total_edit_distance == 7 && report.total_golden_tokens == 14;
  const bool wer_ok = report.wer() == 0.5;
  const UtteranceWer& last = report.per_utterance.back();
  const bool over_100 = last.distance == 3 && last.golden_len == 1 &&
                        static_cast<double>(last.distance) / last.golden_len > 1.0;
  const bool pass = totals_ok && wer_ok && report.per_utterance.size() == 5 && over_100;

  std::ostringstream detail;
  detail << "corpus WER " << report.total_edit_distance << "/"
         << report.total_golden_tokens << " = " << report.wer()
         << ", last utterance at 300%";
  return {pass, detail.str()};
}

// --- criterion 4 -----------------------------------------------------------

Outcome criterion4() {
  const Vocabulary vocab = Vocabulary::build(
      {"delete thirty second timer", "delete my timer please"}, 1);
  const TokenSeq top = vocab.tokenize("delete timer");
  const TokenSeq h1 = vocab.tokenize("delete thirty second timer");
  const TokenSeq h2 = vocab.tokenize("delete my timer please");

  const std::string stage1 = vocab.join_raw(insert_dum_tokens(top, {h1}));
  const std::string stage2 = vocab.join_raw(insert_dum_tokens(top, {h1, h2}));
  const bool pass = stage1 == "delete [DUM] [DUM] timer" &&
                    stage2 == "delete [DUM] [DUM] timer [DUM]";
  std::ostringstream detail;
  detail << "\"" << stage1 << "\" then \"" << stage2 << "\"";
  return {pass, detail.str()};
}

// --- criterion 5 -----------------------------------------------------------

double eval_loss(const ModelParams<double>& params, const Batch& batch) {
  Activations<double> acts;
  const ForwardResult<double> fwd = forward(params, batch, false, 0, acts);
  return compute_loss(fwd.token_logits, fwd.op_logits, batch).loss;
}

Outcome criterion5() {
  const Timer timer;
  ModelConfig cfg;
  cfg.vocab_size = 16;
  cfg.hidden_dim = 16;
  cfg.num_layers = 2;
  cfg.num_heads = 2;
  cfg.ff_dim = 32;
  cfg.max_positions = 8;
  cfg.dropout_rate = 0.0;
  cfg.init_seed = 2718;
  cfg.validate();

  Batch batch;
  batch.batch_size = 2;
  batch.seq_len = 4;
  batch.input_ids = {5, kMaskId, 7, kPadId, 6, 8, kDumId, kPadId};
  batch.position_ids = {0, 1, 2, 0, 0, 1, 2, 0};
  batch.segment_ids = {0, 0, 0, 0, 0, 0, 0, 0};
  batch.attention_mask = {1, 1, 1, 0, 1, 1, 1, 0};
  batch.target_ids = {5, 6, 7, 0, 6, 9, kInsertId, 0};
  batch.target_ops = {static_cast<uint8_t>(WarpOp::Keep),
                      static_cast<uint8_t>(WarpOp::Mask),
                      static_cast<uint8_t>(WarpOp::Drop),
                      0,
                      static_cast<uint8_t>(WarpOp::Keep),
                      static_cast<uint8_t>(WarpOp::Rand),
                      static_cast<uint8_t>(WarpOp::Insert),
                      0};
  batch.loss_mask = {1, 1, 1, 0, 1, 1, 1, 0};
  batch.validate(cfg);

  ModelParams<double> params = init_params<double>(cfg);
  Activations<double> acts;
  const ForwardResult<double> fwd = forward(params, batch, false, 0, acts);
  ModelParams<double> grads(cfg);
  backward(params, batch, fwd, acts, grads);

  struct View {
    double* param = nullptr;
    double* grad = nullptr;
    size_t count = 0;
  };
  std::vector<View> views;
  params.for_each_tensor([&](const std::string&, double* ptr, size_t n, int) {
    views.push_back({ptr, nullptr, n});
  });
  size_t vi = 0;
  grads.for_each_tensor([&](const std::string&, double* ptr, size_t, int) {
    views[vi++].grad = ptr;
  });

  const double eps = 1e-4;
  double worst = 0.0;
  size_t probed = 0;
  for (const View& view : views) {
    const size_t probes = std::min<size_t>(view.count, 4);
    for (size_t p = 0; p < probes; ++p) {
      const size_t idx = p * view.count / probes;
      const double saved = view.param[idx];
      view.param[idx] = saved + eps;
      const double lp = eval_loss(params, batch);
      view.param[idx] = saved - eps;
      const double lm = eval_loss(params, batch);
      view.param[idx] = saved;
      const double numeric = (lp - lm) / (2 * eps);
      const double analytic = view.grad[idx];
      const double denom = std::max(1e-8, std::abs(numeric) + std::abs(analytic));
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
      ++probed;
    }
  }

  const double elapsed = timer.seconds();
  const bool pass = worst < 1e-3 && elapsed < 60.0;
  std::ostringstream detail;
  detail << "max relative error " << worst << " over " << probed << " probes in "
         << views.size() << " tensors; " << secs(elapsed);
  return {pass, detail.str()};
}

// --- criterion 6 -----------------------------------------------------------

Outcome criterion6() {
  const int kVocab = 30;
  ModelConfig cfg;
  cfg.vocab_size = kVocab;
  cfg.hidden_dim = 8;
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.ff_dim = 16;
  cfg.max_positions = 4;

  Batch batch;
  batch.batch_size = 1;
  batch.seq_len = 3;
  batch.input_ids = {5, 6, 7};
  batch.position_ids = {0, 1, 2};
  batch.segment_ids = {0, 0, 0};
  batch.attention_mask = {1, 1, 1};
  batch.target_ids = {8, 9, 10};
  batch.target_ops = {static_cast<uint8_t>(WarpOp::Mask),
                      static_cast<uint8_t>(WarpOp::Rand),
                      static_cast<uint8_t>(WarpOp::Keep)};
  batch.loss_mask = {1, 1, 1};
  batch.validate(cfg);

  Mat<float> token_logits(3, kVocab);
  Mat<float> op_logits(3, kNumWarpOps);
  const double uniform = compute_loss(token_logits, op_logits, batch).loss;
  const double expected = std::log(double(kVocab)) + std::log(double(kNumWarpOps));
  const double uniform_err = std::abs(uniform - expected);

  for (int i = 0; i < 3; ++i) {
    token_logits.at(i, batch.target_ids[i]) = 200.0f;
    op_logits.at(i, batch.target_ops[i]) = 200.0f;
  }
  const double perfect = compute_loss(token_logits, op_logits, batch).loss;

  const bool pass = uniform_err < 1e-6 && perfect < 1e-9;
  std::ostringstream detail;
  detail << "uniform loss off by " << uniform_err << ", perfect-prediction loss "
         << perfect;
  return {pass, detail.str()};
}

// --- criterion 7 -----------------------------------------------------------

Outcome criterion7() {
  const Timer timer;
  Rng rng(4242);
  std::vector<std::string> words;
  for (int i = 0; i < 40; ++i) words.push_back("w" + std::to_string(i));

  std::vector<std::string> lines;
  for (int i = 0; i < 64; ++i) {
    const int len = 6 + static_cast<int>(rng.next_below(5));
    std::string line;
    for (int j = 0; j < len; ++j) {
      if (j) line += ' ';
      line += words[rng.next_below(words.size())];
    }
    lines.push_back(std::move(line));
  }
  const Vocabulary vocab = Vocabulary::build(lines, 1);

  WarpPolicy policy;
  std::vector<TrainExample> examples;
  for (size_t i = 0; i < lines.size(); ++i) {
    policy.rng_seed = derive_seed(777, i);
    examples.push_back(
        pretrain_to_example(warp_sentence(vocab.tokenize(lines[i]), policy, vocab.size())));
  }

  ModelConfig cfg;  // stock desk configuration, only the vocabulary is bespoke
  cfg.vocab_size = vocab.size();
  cfg.init_seed = 99;
  cfg.validate();
  ModelParams<float> params = init_params<float>(cfg);
  AdamState<float> opt(params.num_params());

  TrainConfig tc;
  tc.batch_size = 16;
  tc.optimizer.lr = 1e-3;
  tc.warmup_fraction = 0.0;  // keeps the schedule identical across chunks
  tc.seed = 31;
  tc.log_every = 1 << 30;

  const int64_t kMaxSteps = 2000;
  const int64_t kChunk = 250;
  int64_t steps = 0;
  EvalStats stats;
  while (steps < kMaxSteps) {
    const int64_t next = std::min(steps + kChunk, kMaxSteps);
    tc.steps = next;
    train_model(params, opt, examples, tc, steps);
    steps = next;
    stats = evaluate_examples(params, examples, tc.batch_size);
    if (stats.token_accuracy >= 0.99 && stats.op_accuracy >= 0.99) break;
  }

  const double elapsed = timer.seconds();
  const bool pass =
      stats.token_accuracy >= 0.99 && stats.op_accuracy >= 0.99 && elapsed < 300.0;
  std::ostringstream detail;
  detail << "token " << pct(stats.token_accuracy) << " op " << pct(stats.op_accuracy)
         << " after " << steps << " steps; " << secs(elapsed);
  return {pass, detail.str()};
}

// --- criteria 8-10 ---------------------------------------------------------

struct Pipeline {
  EvaluationReport with_additional;
  EvaluationReport without_additional;
};
std::optional<Pipeline> g_pipeline;

std::vector<CorrectedRecord> correct_records(const std::vector<DatasetRecord>& records,
                                             const Vocabulary& vocab,
                                             const ModelParams<float>& params,
                                             const CorrectOptions& options) {
  std::vector<CorrectedRecord> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    const HypothesisSet set = to_hypothesis_set(record, vocab, CorrectionSource::Asr,
                                                params.config.max_hypotheses);
    CorrectedRecord corrected;
    corrected.id = record.id;
    try {
      corrected.corrected = vocab.detokenize(correct(params, set, options).corrected);
    } catch (const std::invalid_argument&) {
      corrected.corrected = vocab.detokenize(set.top.tokens);
    }
    out.push_back(std::move(corrected));
  }
  return out;
}

Outcome criterion8() {
  const Timer timer;
  const Env& e = env();

  const std::array<double, 3> fractions = {10.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0};
  const CorpusSplits splits = generate_corpus(e.lines, e.vocab, default_asr_profile(0),
                                              default_human_profile(0), fractions, 2024);

  // Clean-side warping over the training goldens, two variants per sentence.
  WarpPolicy policy;
  std::vector<TrainExample> pretrain_examples;
  pretrain_examples.reserve(2 * splits.train.size());
  for (size_t i = 0; i < splits.train.size(); ++i) {
    const TokenSeq truth = e.vocab.tokenize(splits.train[i].golden);
    for (int variant = 0; variant < 2; ++variant) {
      policy.rng_seed = derive_seed(131, 2 * i + variant);
      pretrain_examples.push_back(
          pretrain_to_example(warp_sentence(truth, policy, e.vocab.size())));
    }
  }

  ModelConfig cfg;
  cfg.vocab_size = e.vocab.size();
  cfg.hidden_dim = 96;
  cfg.num_layers = 3;
  cfg.num_heads = 4;
  cfg.ff_dim = 384;
  cfg.max_positions = 110;
  cfg.init_seed = 7001;
  cfg.validate();
  ModelParams<float> params = init_params<float>(cfg);
  AdamState<float> opt(params.num_params());

  TrainConfig pre;
  pre.steps = 2000;
  pre.batch_size = 16;
  pre.optimizer.lr = 1e-3;
  pre.seed = 8101;
  pre.log_every = 1 << 30;
  train_model(params, opt, pretrain_examples, pre, 0);

  std::vector<TrainExample> finetune_examples;
  size_t skipped = 0;
  for (const auto& record : splits.train) {
    const HypothesisSet set =
        to_hypothesis_set(record, e.vocab, CorrectionSource::Asr, cfg.max_hypotheses);
    try {
      finetune_examples.push_back(build_finetune_example(set, cfg));
    } catch (const std::invalid_argument&) {
      ++skipped;
    }
  }

  TrainConfig fine;
  fine.steps = 1500;
  fine.batch_size = 16;
  fine.optimizer.lr = 5e-4;
  fine.seed = 8102;
  fine.log_every = 1 << 30;
  AdamState<float> fine_opt(params.num_params());
  train_model(params, fine_opt, finetune_examples, fine, 0);

  CorrectOptions options;
  options.op_confidence_threshold = 0.5;
  const auto corrected = correct_records(splits.test, e.vocab, params, options);
  options.use_additional = false;
  const auto corrected_solo = correct_records(splits.test, e.vocab, params, options);

  Pipeline pipeline{
      evaluate_corrections(splits.test, corrected, e.vocab, CorrectionSource::Asr),
      evaluate_corrections(splits.test, corrected_solo, e.vocab, CorrectionSource::Asr)};
  const EvaluationReport& report = pipeline.with_additional;
  g_pipeline = std::move(pipeline);

  const double original = report.original_wer();
  const double fixed = report.corrected_wer();
  const double oracle = report.oracle_wer();
  const double rel = (original - fixed) / original;
  const double elapsed = timer.seconds();

  const bool pass = fixed <= 0.9 * original && oracle <= original && elapsed < 1800.0;
  std::ostringstream detail;
  detail << report.num_utterances << " test utterances, WER " << pct(original) << " -> "
         << pct(fixed) << " (" << pct(rel) << " relative), oracle " << pct(oracle)
         << ", " << skipped << " train records skipped; " << secs(elapsed);
  return {pass, detail.str()};
}

Outcome criterion9() {
  if (!g_pipeline) return {false, "end-to-end pipeline unavailable (criterion 8 failed)"};
  const double with_add = g_pipeline->with_additional.corrected_wer();
  const double without_add = g_pipeline->without_additional.corrected_wer();
  const bool pass = with_add <= without_add;
  std::ostringstream detail;
  detail << "WER with additional " << pct(with_add) << " <= without " << pct(without_add);
  return {pass, detail.str()};
}

Outcome criterion10() {
  if (!g_pipeline) return {false, "end-to-end pipeline unavailable (criterion 8 failed)"};
  const EvaluationReport& report = g_pipeline->with_additional;

  bool partitions = true;
  for (const auto* bins : {&report.confidence_bins, &report.wer_bins}) {
    int64_t count = 0, golden = 0, original = 0, corrected = 0;
    for (const BinStat& bin : *bins) {
      count += bin.count;
      golden += bin.golden_tokens;
      original += bin.original_edits;
      corrected += bin.corrected_edits;
    }
    partitions = partitions && count == report.num_utterances &&
                 golden == report.golden_tokens && original == report.original_edits &&
                 corrected == report.corrected_edits;
  }

  const bool pass = partitions && report.spearman_confidence_wer < 0.0;
  std::ostringstream detail;
  detail << (partitions ? "bins partition totals exactly" : "bin totals do not add up")
         << ", spearman(confidence, WER) = " << report.spearman_confidence_wer;
  return {pass, detail.str()};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Entry> entries = {
      {1, "round-trip oracle", criterion1},
      {2, "levenshtein brute-force equivalence", criterion2},
      {3, "wer definition check", criterion3},
      {4, "appendix-a dum padding reproduction", criterion4},
      {5, "gradient check", criterion5},
      {6, "loss analytics", criterion6},
      {7, "overfit memorization", criterion7},
      {8, "end-to-end directional result", criterion8},
      {9, "ablation ordering", criterion9},
      {10, "stratification integrity", criterion10},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& ex) {
      outcome = {false, std::string("unhandled exception: ") + ex.what()};
    }
    std::printf("%s criterion %d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", entry.id,
                entry.name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }

  if (failures) {
    std::printf("%d of %zu criteria failed\n", failures, entries.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", entries.size());
  return 0;
}
