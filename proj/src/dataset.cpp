#include "wlmsc/dataset.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "wlmsc/io.hpp"

namespace wlmsc {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(const std::string& path, size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

json parse_line(const std::string& path, size_t line, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    line_error(path, line, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::vector<DatasetRecord> read_dataset(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<DatasetRecord> records;
  records.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const json j = parse_line(path, i + 1, lines[i]);
    DatasetRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.golden = j.at("golden").get<std::string>();
      for (const auto& h : j.at("hyps")) {
        r.hyps.push_back({h.at("text").get<std::string>(), h.at("score").get<double>()});
      }
      r.human = j.value("human", std::string());
    } catch (const json::exception& e) {
      line_error(path, i + 1, std::string("bad dataset record: ") + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["golden"] = r.golden;
    json hyps = json::array();
    for (const auto& h : r.hyps) {
      hyps.push_back({{"text", h.text}, {"score", h.score}});
    }
    j["hyps"] = std::move(hyps);
    j["human"] = r.human;
    out << j.dump() << '\n';
  }
  write_file_atomic(path, out.str());
}

std::vector<CorrectedRecord> read_corrected(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<CorrectedRecord> records;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const json j = parse_line(path, i + 1, lines[i]);
    CorrectedRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.corrected = j.at("corrected").get<std::string>();
      if (j.contains("edits")) {
        for (const auto& e : j.at("edits")) {
          r.edits.push_back({e.at("pos").get<int>(), e.at("op").get<std::string>(),
                             e.value("token", std::string())});
        }
      }
    } catch (const json::exception& e) {
      line_error(path, i + 1, std::string("bad corrected record: ") + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_corrected(const std::string& path, const std::vector<CorrectedRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["corrected"] = r.corrected;
    json edits = json::array();
    for (const auto& e : r.edits) {
      json je{{"pos", e.pos}, {"op", e.op}};
      if (!e.token.empty()) je["token"] = e.token;
      edits.push_back(std::move(je));
    }
    j["edits"] = std::move(edits);
    out << j.dump() << '\n';
  }
  write_file_atomic(path, out.str());
}

HypothesisSet to_hypothesis_set(const DatasetRecord& record, const Vocabulary& vocab,
                                CorrectionSource source, int max_hypotheses) {
  if (record.hyps.empty() && source == CorrectionSource::Asr) {
    throw std::invalid_argument("dataset record " + record.id + " has no hypotheses");
  }
  HypothesisSet set;
  set.id = record.id;
  if (!record.golden.empty()) set.golden = vocab.tokenize(record.golden);

  size_t first_additional = 0;
  if (source == CorrectionSource::Asr) {
    set.top.tokens = vocab.tokenize(record.hyps[0].text);
    set.top.score = record.hyps[0].score;
    first_additional = 1;
  } else {
    set.top.tokens = vocab.tokenize(record.human);
    set.top.score = 1.0;
  }
  for (size_t i = first_additional; i < record.hyps.size(); ++i) {
    if (static_cast<int>(set.additional.size()) >= max_hypotheses - 1) break;
    set.additional.push_back({vocab.tokenize(record.hyps[i].text), record.hyps[i].score});
  }
  std::stable_sort(set.additional.begin(), set.additional.end(),
                   [](const ScoredHypothesis& a, const ScoredHypothesis& b) {
                     return a.score > b.score;
                   });
  return set;
}

void write_pretrain_samples(const std::string& path,
                            const std::vector<WarpedSample>& samples) {
  std::ostringstream out;
  for (const auto& s : samples) {
    json j;
    j["input"] = s.input_ids;
    j["targets"] = s.target_ids;
    json ops = json::array();
    for (WarpOp op : s.target_ops) ops.push_back(static_cast<int>(op));
    j["ops"] = std::move(ops);
    json mask = json::array();
    for (uint8_t m : s.loss_mask) mask.push_back(static_cast<int>(m));
    j["mask"] = std::move(mask);
    out << j.dump() << '\n';
  }
  write_file_atomic(path, out.str());
}

std::vector<WarpedSample> read_pretrain_samples(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<WarpedSample> samples;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const json j = parse_line(path, i + 1, lines[i]);
    WarpedSample s;
    try {
      s.input_ids = j.at("input").get<std::vector<TokenId>>();
      s.target_ids = j.at("targets").get<std::vector<TokenId>>();
      for (int op : j.at("ops").get<std::vector<int>>()) {
        if (op < 0 || op >= kNumWarpOps) line_error(path, i + 1, "op id out of range");
        s.target_ops.push_back(static_cast<WarpOp>(op));
      }
      for (int m : j.at("mask").get<std::vector<int>>()) {
        if (m != 0 && m != 1) line_error(path, i + 1, "mask value not 0/1");
        s.loss_mask.push_back(static_cast<uint8_t>(m));
      }
    } catch (const json::exception& e) {
      line_error(path, i + 1, std::string("bad pretraining sample: ") + e.what());
    }
    if (s.input_ids.size() != s.target_ids.size() ||
        s.input_ids.size() != s.target_ops.size() ||
        s.input_ids.size() != s.loss_mask.size()) {
      line_error(path, i + 1, "pretraining sample field length mismatch");
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

TrainExample pretrain_to_example(const WarpedSample& sample) {
  TrainExample ex;
  const size_t n = sample.input_ids.size();
  ex.input_ids = sample.input_ids;
  ex.target_ids = sample.target_ids;
  ex.position_ids.resize(n);
  for (size_t i = 0; i < n; ++i) ex.position_ids[i] = static_cast<int32_t>(i);
  ex.segment_ids.assign(n, 0);
  ex.target_ops.reserve(n);
  for (WarpOp op : sample.target_ops) ex.target_ops.push_back(static_cast<uint8_t>(op));
  ex.loss_mask = sample.loss_mask;
  return ex;
}

void write_aligned(const std::string& path, const std::vector<AlignedRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["golden"] = r.golden;
    j["top"] = r.top;
    json hyps = json::array();
    for (const auto& h : r.additional) {
      hyps.push_back({{"text", h.text}, {"score", h.score}});
    }
    j["additional"] = std::move(hyps);
    j["target_tokens"] = r.target_tokens;
    j["target_ops"] = r.target_ops;
    j["lossy"] = r.lossy;
    out << j.dump() << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace wlmsc
