#include "wlmsc/evalreport.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "wlmsc/edit.hpp"
#include "wlmsc/wer.hpp"

namespace wlmsc {

namespace {

double ratio(int64_t edits, int64_t tokens) {
  return tokens == 0 ? 0.0 : static_cast<double>(edits) / static_cast<double>(tokens);
}

std::optional<double> rel(double original, double corrected) {
  if (original == 0.0) return std::nullopt;
  return (original - corrected) / original * 100.0;
}

// [0,0.2], (0.2,0.4], (0.4,0.6], (0.6,0.8], (0.8,1.0]
int confidence_bin(double score) {
  if (score <= 0.2) return 0;
  if (score <= 0.4) return 1;
  if (score <= 0.6) return 2;
  if (score <= 0.8) return 3;
  return 4;
}

// {0}, (0,0.25), [0.25,0.5), [0.5,1.0), [1.0,inf]
int wer_bin(double wer) {
  if (wer == 0.0) return 0;
  if (wer < 0.25) return 1;
  if (wer < 0.5) return 2;
  if (wer < 1.0) return 3;
  return 4;
}

const char* kConfidenceLabels[5] = {"[0.0,0.2]", "(0.2,0.4]", "(0.4,0.6]", "(0.6,0.8]",
                                    "(0.8,1.0]"};
const char* kWerLabels[5] = {"0", "(0,0.25)", "[0.25,0.5)", "[0.5,1.0)", "[1.0,inf]"};

std::string format_wer(double wer) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << wer * 100.0;
  return out.str();
}

std::string format_rel(const std::optional<double>& r) {
  if (!r) return "-";
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << *r;
  return out.str();
}

}  // namespace

double BinStat::original_wer() const { return ratio(original_edits, golden_tokens); }
double BinStat::corrected_wer() const { return ratio(corrected_edits, golden_tokens); }
std::optional<double> BinStat::relative_diff() const {
  return rel(original_wer(), corrected_wer());
}

double EvaluationReport::original_wer() const { return ratio(original_edits, golden_tokens); }
double EvaluationReport::corrected_wer() const { return ratio(corrected_edits, golden_tokens); }
double EvaluationReport::oracle_wer() const { return ratio(oracle_edits, golden_tokens); }
std::optional<double> EvaluationReport::relative_diff() const {
  return rel(original_wer(), corrected_wer());
}

EvaluationReport evaluate_corrections(const std::vector<DatasetRecord>& dataset,
                                      const std::vector<CorrectedRecord>& corrected,
                                      const Vocabulary& vocab, CorrectionSource source) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");

  std::unordered_map<std::string, const CorrectedRecord*> by_id;
  by_id.reserve(corrected.size());
  for (const auto& c : corrected) by_id[c.id] = &c;

  std::vector<std::string> missing;
  for (const auto& r : dataset) {
    if (!by_id.count(r.id)) missing.push_back(r.id);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "corrected output is missing " << missing.size() << " ids:";
    for (size_t i = 0; i < missing.size() && i < 10; ++i) msg << ' ' << missing[i];
    if (missing.size() > 10) msg << " ...";
    throw std::runtime_error(msg.str());
  }

  EvaluationReport report;
  report.confidence_bins.resize(5);
  report.wer_bins.resize(5);
  for (int i = 0; i < 5; ++i) {
    report.confidence_bins[i].label = kConfidenceLabels[i];
    report.wer_bins[i].label = kWerLabels[i];
  }

  std::vector<double> confidences, asr_wers;
  confidences.reserve(dataset.size());
  asr_wers.reserve(dataset.size());

  for (const auto& r : dataset) {
    const TokenSeq golden = vocab.tokenize(r.golden);
    if (golden.empty()) {
      throw std::runtime_error("empty golden sentence for id " + r.id);
    }
    if (r.hyps.empty()) {
      throw std::runtime_error("no hypotheses for id " + r.id);
    }
    const TokenSeq asr_top = vocab.tokenize(r.hyps[0].text);
    const TokenSeq original =
        source == CorrectionSource::Asr ? asr_top : vocab.tokenize(r.human);
    const TokenSeq fixed = vocab.tokenize(by_id.at(r.id)->corrected);

    const int64_t len = static_cast<int64_t>(golden.size());
    const int64_t original_d = levenshtein_distance(original, golden);
    const int64_t corrected_d = levenshtein_distance(fixed, golden);
    const int64_t asr_top_d = levenshtein_distance(asr_top, golden);
    int64_t oracle_d = asr_top_d;
    for (size_t h = 1; h < r.hyps.size(); ++h) {
      oracle_d = std::min(oracle_d,
                          static_cast<int64_t>(levenshtein_distance(
                              vocab.tokenize(r.hyps[h].text), golden)));
    }

    report.num_utterances += 1;
    report.golden_tokens += len;
    report.original_edits += original_d;
    report.corrected_edits += corrected_d;
    report.oracle_edits += oracle_d;

    const double conf = r.hyps[0].score;
    const double asr_top_wer = static_cast<double>(asr_top_d) / static_cast<double>(len);
    confidences.push_back(conf);
    asr_wers.push_back(asr_top_wer);

    for (BinStat* bin : {&report.confidence_bins[confidence_bin(conf)],
                         &report.wer_bins[wer_bin(asr_top_wer)]}) {
      bin->count += 1;
      bin->golden_tokens += len;
      bin->original_edits += original_d;
      bin->corrected_edits += corrected_d;
    }
  }

  report.spearman_confidence_wer = spearman(confidences, asr_wers);
  return report;
}

std::string EvaluationReport::to_json() const {
  nlohmann::json j;
  j["utterances"] = num_utterances;
  j["golden_tokens"] = golden_tokens;
  j["original_edits"] = original_edits;
  j["corrected_edits"] = corrected_edits;
  j["oracle_edits"] = oracle_edits;
  j["overall"] = {{"original_wer", original_wer()},
                  {"corrected_wer", corrected_wer()},
                  {"oracle_wer", oracle_wer()}};
  if (auto r = relative_diff()) {
    j["overall"]["relative_diff"] = *r;
  } else {
    j["overall"]["relative_diff"] = nullptr;
  }
  j["spearman_confidence_wer"] = spearman_confidence_wer;

  auto bins_json = [](const std::vector<BinStat>& bins) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : bins) {
      nlohmann::json e;
      e["bin"] = b.label;
      e["count"] = b.count;
      e["golden_tokens"] = b.golden_tokens;
      e["original_edits"] = b.original_edits;
      e["corrected_edits"] = b.corrected_edits;
      e["original_wer"] = b.original_wer();
      e["corrected_wer"] = b.corrected_wer();
      if (auto r = b.relative_diff()) {
        e["relative_diff"] = *r;
      } else {
        e["relative_diff"] = nullptr;
      }
      arr.push_back(std::move(e));
    }
    return arr;
  };
  j["confidence_bins"] = bins_json(confidence_bins);
  j["asr_wer_bins"] = bins_json(wer_bins);
  return j.dump(2);
}

std::string EvaluationReport::to_table() const {
  std::ostringstream out;
  out << "Utterances: " << num_utterances << "\n";
  out << "Overall WER (%):  original " << format_wer(original_wer()) << "  corrected "
      << format_wer(corrected_wer()) << "  oracle " << format_wer(oracle_wer())
      << "  rel.diff " << format_rel(relative_diff()) << "\n";
  out << "Spearman(confidence, WER): " << std::fixed << std::setprecision(3)
      << spearman_confidence_wer << "\n";

  auto table = [&out](const std::string& title, const std::vector<BinStat>& bins) {
    out << "\n" << title << "\n";
    out << std::left << std::setw(12) << "Bin" << std::right << std::setw(8) << "Count"
        << std::setw(12) << "Original" << std::setw(12) << "Corrected" << std::setw(12)
        << "Rel. Diff." << "\n";
    for (const auto& b : bins) {
      out << std::left << std::setw(12) << b.label << std::right << std::setw(8)
          << b.count << std::setw(12) << format_wer(b.original_wer()) << std::setw(12)
          << format_wer(b.corrected_wer()) << std::setw(12)
          << format_rel(b.relative_diff()) << "\n";
    }
  };
  table("By ASR confidence", confidence_bins);
  table("By ASR top-hypothesis WER", wer_bins);
  return out.str();
}

}  // namespace wlmsc
