#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wlmsc/checkpoint.hpp"
#include "wlmsc/corpusgen.hpp"
#include "wlmsc/correction.hpp"
#include "wlmsc/dataset.hpp"
#include "wlmsc/evalreport.hpp"
#include "wlmsc/io.hpp"
#include "wlmsc/noisesim.hpp"
#include "wlmsc/train.hpp"
#include "wlmsc/vocab.hpp"
#include "wlmsc/warp.hpp"
#include "wlmsc/wer.hpp"

namespace {

using namespace wlmsc;

// key=value file with '#' comments. Every key must be consumed.
class KeyConfig {
 public:
  static KeyConfig from_file(const std::string& path) {
    KeyConfig cfg;
    if (path.empty()) return cfg;
    for (const std::string& raw : read_lines(path)) {
      std::string line = raw.substr(0, raw.find('#'));
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("bad config line (want key=value): " + raw);
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw std::runtime_error("empty config key in: " + raw);
      cfg.values_[key] = value;
    }
    return cfg;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) {
    const std::string s = get_string(key, "");
    if (s.empty()) return fallback;
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("bad numeric config value for " + key);
    return v;
  }

  int64_t get_int(const std::string& key, int64_t fallback) {
    const std::string s = get_string(key, "");
    if (s.empty()) return fallback;
    size_t pos = 0;
    const int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::runtime_error("bad integer config value for " + key);
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) {
    const std::string s = get_string(key, "");
    if (s.empty()) return fallback;
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::runtime_error("bad boolean config value for " + key);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw std::runtime_error("unknown config key: " + key);
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

struct CommonArgs {
  uint64_t seed = 42;
  std::string vocab_path;
  std::string model_path;
  std::string config_path;
  std::string input_path;
  std::string output_path;
};

ModelConfig model_config_from(KeyConfig& cfg, int vocab_size, uint64_t seed) {
  ModelConfig mc;
  mc.vocab_size = vocab_size;
  mc.hidden_dim = static_cast<int>(cfg.get_int("hidden_dim", mc.hidden_dim));
  mc.num_layers = static_cast<int>(cfg.get_int("num_layers", mc.num_layers));
  mc.num_heads = static_cast<int>(cfg.get_int("num_heads", mc.num_heads));
  mc.ff_dim = static_cast<int>(cfg.get_int("ff_dim", mc.ff_dim));
  mc.max_positions = static_cast<int>(cfg.get_int("max_positions", mc.max_positions));
  mc.max_hypotheses = static_cast<int>(cfg.get_int("max_hypotheses", mc.max_hypotheses));
  mc.dropout_rate = cfg.get_double("dropout_rate", mc.dropout_rate);
  mc.use_slot_embedding = cfg.get_bool("use_slot_embedding", mc.use_slot_embedding);
  mc.init_seed = static_cast<uint64_t>(cfg.get_int("init_seed", static_cast<int64_t>(seed)));
  mc.validate();
  return mc;
}

TrainConfig train_config_from(KeyConfig& cfg, uint64_t seed, const std::string& ckpt) {
  TrainConfig tc;
  tc.steps = cfg.get_int("steps", 2000);
  tc.batch_size = static_cast<int>(cfg.get_int("batch_size", 16));
  tc.optimizer.lr = cfg.get_double("lr", 1e-3);
  tc.optimizer.weight_decay = cfg.get_double("weight_decay", 0.01);
  tc.warmup_fraction = cfg.get_double("warmup_fraction", 0.05);
  tc.seed = seed;
  tc.log_every = cfg.get_int("log_every", 100);
  tc.checkpoint_every = cfg.get_int("checkpoint_every", 0);
  tc.divergence_threshold = cfg.get_double("divergence_threshold", 1e4);
  tc.checkpoint_path = ckpt;
  tc.loss_curve_path = cfg.get_string("loss_curve", "");
  tc.validate();
  return tc;
}

NoiseProfile profile_from(KeyConfig& cfg, const std::string& prefix,
                          const NoiseProfile& defaults) {
  NoiseProfile p = defaults;
  p.sub_rate = cfg.get_double(prefix + "_sub_rate", p.sub_rate);
  p.del_rate = cfg.get_double(prefix + "_del_rate", p.del_rate);
  p.ins_rate = cfg.get_double(prefix + "_ins_rate", p.ins_rate);
  p.confusion_temperature =
      cfg.get_double(prefix + "_confusion_temperature", p.confusion_temperature);
  p.n_best = static_cast<int>(cfg.get_int(prefix + "_n_best", p.n_best));
  p.validate();
  return p;
}

CorrectionSource source_from(const std::string& name) {
  if (name == "asr") return CorrectionSource::Asr;
  if (name == "human") return CorrectionSource::Human;
  throw std::runtime_error("unknown source (want asr or human): " + name);
}

void log_line(const std::string& msg) { std::cout << msg << "\n"; }

int cmd_build_vocab(const CommonArgs& args, int min_count) {
  const std::vector<std::string> lines = read_lines(args.input_path);
  const Vocabulary vocab = Vocabulary::build(lines, min_count);
  vocab.save(args.output_path);
  std::cout << "wrote " << vocab.size() << " tokens to " << args.output_path << "\n";
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  KeyConfig cfg = KeyConfig::from_file(args.config_path);
  const NoiseProfile asr = profile_from(cfg, "asr", default_asr_profile(0));
  const NoiseProfile human = profile_from(cfg, "human", default_human_profile(0));
  const std::array<double, 3> fractions = {cfg.get_double("train_fraction", 0.8),
                                           cfg.get_double("dev_fraction", 0.1),
                                           cfg.get_double("test_fraction", 0.1)};
  cfg.reject_unknown();

  const Vocabulary vocab = Vocabulary::load(args.vocab_path);
  const std::vector<std::string> lines = read_lines(args.input_path);
  const CorpusSplits splits =
      generate_corpus(lines, vocab, asr, human, fractions, args.seed);

  const std::filesystem::path out_dir(args.output_path);
  std::filesystem::create_directories(out_dir);
  write_dataset((out_dir / "train.jsonl").string(), splits.train);
  write_dataset((out_dir / "dev.jsonl").string(), splits.dev);
  write_dataset((out_dir / "test.jsonl").string(), splits.test);
  std::cout << "wrote " << splits.train.size() << "/" << splits.dev.size() << "/"
            << splits.test.size() << " records to " << out_dir.string() << "\n";
  return 0;
}

int cmd_align(const CommonArgs& args, const std::string& source_name) {
  const Vocabulary vocab = Vocabulary::load(args.vocab_path);
  const CorrectionSource source = source_from(source_name);
  const std::vector<DatasetRecord> records = read_dataset(args.input_path);

  std::vector<AlignedRecord> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    const HypothesisSet set = to_hypothesis_set(record, vocab, source, 5);
    if (!set.golden) throw std::runtime_error("record " + record.id + " has no golden");
    std::vector<TokenSeq> additional;
    for (const auto& h : set.additional) additional.push_back(h.tokens);
    const TokenSeq padded = insert_dum_tokens(set.top.tokens, additional);
    const AlignmentLabels labels = derive_warp_labels(padded, *set.golden);

    AlignedRecord aligned;
    aligned.id = record.id;
    aligned.golden = vocab.detokenize(*set.golden);
    aligned.top = vocab.join_raw(padded);
    for (const auto& h : set.additional) {
      aligned.additional.push_back({vocab.detokenize(h.tokens), h.score});
    }
    for (size_t i = 0; i < labels.target_ids.size(); ++i) {
      aligned.target_tokens.push_back(vocab.token(labels.target_ids[i]));
      aligned.target_ops.push_back(to_string(labels.target_ops[i]));
    }
    aligned.lossy = labels.lossy;
    out.push_back(std::move(aligned));
  }
  write_aligned(args.output_path, out);
  std::cout << "wrote " << out.size() << " aligned records to " << args.output_path
            << "\n";
  return 0;
}

int cmd_pretrain(const CommonArgs& args, const std::string& samples_out, bool resume) {
  KeyConfig cfg = KeyConfig::from_file(args.config_path);
  const Vocabulary vocab = Vocabulary::load(args.vocab_path);

  WarpPolicy policy;
  policy.select_rate = cfg.get_double("select_rate", policy.select_rate);
  policy.op_weights = {cfg.get_double("mask_weight", 0.2),
                       cfg.get_double("rand_weight", 0.2),
                       cfg.get_double("drop_weight", 0.2),
                       cfg.get_double("insert_weight", 0.2),
                       cfg.get_double("keep_weight", 0.2)};
  policy.rng_seed = args.seed;
  policy.validate();

  ModelConfig mc = model_config_from(cfg, vocab.size(), args.seed);
  TrainConfig tc = train_config_from(cfg, args.seed, args.model_path);
  cfg.reject_unknown();

  const std::vector<std::string> lines = read_lines(args.input_path);
  std::vector<WarpedSample> samples;
  std::vector<TrainExample> examples;
  size_t skipped = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    const TokenSeq tokens = vocab.tokenize(lines[i]);
    if (tokens.empty()) continue;
    WarpPolicy line_policy = policy;
    line_policy.rng_seed = derive_seed(policy.rng_seed, "warp", i);
    WarpedSample sample = warp_sentence(tokens, line_policy, vocab.size());
    if (sample.input_ids.size() > static_cast<size_t>(mc.max_positions)) {
      ++skipped;
      continue;
    }
    examples.push_back(pretrain_to_example(sample));
    if (!samples_out.empty()) samples.push_back(std::move(sample));
  }
  if (skipped > 0) {
    std::cout << "skipped " << skipped << " sentences longer than max_positions\n";
  }
  if (!samples_out.empty()) write_pretrain_samples(samples_out, samples);

  ModelParams<float> params = init_params<float>(mc);
  AdamState<float> opt(params.num_params());
  int64_t start_step = 0;
  if (resume) {
    LoadedCheckpoint loaded = load_checkpoint(args.model_path);
    if (!loaded.opt) throw std::runtime_error("checkpoint has no optimizer state");
    params = std::move(loaded.params);
    opt = std::move(*loaded.opt);
    start_step = loaded.step;
    std::cout << "resuming from step " << start_step << "\n";
  }

  const TrainResult result =
      train_model(params, opt, examples, tc, start_step, log_line);
  std::cout << "pretrained " << result.steps_run << " steps, final loss "
            << result.final_loss << "; checkpoint " << args.model_path << "\n";
  return 0;
}

int cmd_finetune(const CommonArgs& args, const std::string& out_path,
                 const std::string& source_name) {
  KeyConfig cfg = KeyConfig::from_file(args.config_path);
  const Vocabulary vocab = Vocabulary::load(args.vocab_path);
  const CorrectionSource source = source_from(source_name);

  LoadedCheckpoint loaded = load_checkpoint(args.model_path);
  ModelParams<float>& params = loaded.params;
  if (params.config.vocab_size != vocab.size()) {
    throw std::runtime_error("checkpoint vocabulary size does not match --vocab");
  }

  const std::string target = out_path.empty() ? args.model_path : out_path;
  TrainConfig tc = train_config_from(cfg, args.seed, target);
  cfg.reject_unknown();

  const std::vector<DatasetRecord> records = read_dataset(args.input_path);
  std::vector<TrainExample> examples;
  size_t skipped = 0;
  for (const auto& record : records) {
    const HypothesisSet set =
        to_hypothesis_set(record, vocab, source, params.config.max_hypotheses);
    try {
      examples.push_back(build_finetune_example(set, params.config));
    } catch (const std::invalid_argument&) {
      ++skipped;
    }
  }
  if (examples.empty()) throw std::runtime_error("no usable fine-tuning records");
  if (skipped > 0) {
    std::cout << "skipped " << skipped << " records (too long or missing golden)\n";
  }

  AdamState<float> opt(params.num_params());
  const TrainResult result = train_model(params, opt, examples, tc, 0, log_line);
  std::cout << "fine-tuned " << result.steps_run << " steps, final loss "
            << result.final_loss << "; checkpoint " << target << "\n";
  return 0;
}

int cmd_correct(const CommonArgs& args, const std::string& source_name, double threshold,
                bool no_additional) {
  const Vocabulary vocab = Vocabulary::load(args.vocab_path);
  const CorrectionSource source = source_from(source_name);
  LoadedCheckpoint loaded = load_checkpoint(args.model_path);
  const ModelParams<float>& params = loaded.params;
  if (params.config.vocab_size != vocab.size()) {
    throw std::runtime_error("checkpoint vocabulary size does not match --vocab");
  }

  CorrectOptions options;
  options.op_confidence_threshold = threshold;
  options.use_additional = !no_additional;

  const std::vector<DatasetRecord> records = read_dataset(args.input_path);
  std::vector<CorrectedRecord> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    const HypothesisSet set =
        to_hypothesis_set(record, vocab, source, params.config.max_hypotheses);
    CorrectedRecord corrected;
    corrected.id = record.id;
    try {
      const CorrectionResult result = correct(params, set, options);
      corrected.corrected = vocab.detokenize(result.corrected);
      for (const auto& e : result.edits) {
        CorrectedEditRecord edit;
        edit.pos = e.pos;
        edit.op = to_string(e.op);
        if (e.token >= 0) edit.token = vocab.token(e.token);
        corrected.edits.push_back(std::move(edit));
      }
    } catch (const std::invalid_argument&) {
      // over-long or empty sets pass through uncorrected
      corrected.corrected = vocab.detokenize(set.top.tokens);
    }
    out.push_back(std::move(corrected));
  }
  write_corrected(args.output_path, out);
  std::cout << "wrote " << out.size() << " corrections to " << args.output_path << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& corrected_path,
                 const std::string& source_name) {
  const Vocabulary vocab = Vocabulary::load(args.vocab_path);
  const CorrectionSource source = source_from(source_name);
  const std::vector<DatasetRecord> dataset = read_dataset(args.input_path);
  const std::vector<CorrectedRecord> corrected = read_corrected(corrected_path);

  const EvaluationReport report = evaluate_corrections(dataset, corrected, vocab, source);
  if (!args.output_path.empty()) {
    write_file_atomic(args.output_path, report.to_json() + "\n");
    const std::filesystem::path table_path =
        std::filesystem::path(args.output_path).replace_extension(".txt");
    write_file_atomic(table_path.string(), report.to_table());
    std::cout << "wrote " << args.output_path << " and " << table_path.string() << "\n";
  }
  std::cout << report.to_table();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warped-language-model sentence correction pipeline"};
  app.require_subcommand(1);

  CommonArgs args;
  int min_count = 1;
  std::string source_name = "asr";
  std::string corrected_path;
  std::string samples_out;
  std::string out_path;
  double threshold = 0.0;
  bool no_additional = false;
  bool resume = false;

  auto add_common = [&](CLI::App* sub, bool vocab, bool model, bool input, bool output) {
    sub->add_option("--seed", args.seed, "Base RNG seed");
    sub->add_option("--config", args.config_path, "key=value config file");
    if (vocab) sub->add_option("--vocab", args.vocab_path, "Vocabulary file")->required();
    if (model) sub->add_option("--model", args.model_path, "Checkpoint path")->required();
    if (input) sub->add_option("--input", args.input_path, "Input path")->required();
    if (output) sub->add_option("--output", args.output_path, "Output path")->required();
  };

  CLI::App* build_vocab = app.add_subcommand("build-vocab", "Build a vocabulary file");
  add_common(build_vocab, false, false, true, true);
  build_vocab->add_option("--min-count", min_count, "Minimum word count");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Corrupt a clean corpus into dataset splits");
  add_common(simulate, true, false, true, true);

  CLI::App* align =
      app.add_subcommand("align", "Write labeled alignment records for a dataset");
  add_common(align, true, false, true, true);
  align->add_option("--source", source_name, "asr or human");

  CLI::App* pretrain = app.add_subcommand("pretrain", "Warp a clean corpus and train");
  add_common(pretrain, true, true, true, false);
  pretrain->add_option("--samples-out", samples_out, "Also dump warped samples (JSONL)");
  pretrain->add_flag("--resume", resume, "Continue from the checkpoint at --model");

  CLI::App* finetune =
      app.add_subcommand("finetune", "Fine-tune a pretrained checkpoint on a dataset");
  add_common(finetune, true, true, true, false);
  finetune->add_option("--out-model", out_path, "Output checkpoint (default: --model)");
  finetune->add_option("--source", source_name, "asr or human");

  CLI::App* correct = app.add_subcommand("correct", "Correct a dataset's transcriptions");
  add_common(correct, true, true, true, true);
  correct->add_option("--source", source_name, "asr or human");
  correct->add_option("--threshold", threshold, "Minimum op confidence to apply an edit");
  correct->add_flag("--no-additional", no_additional, "Ignore additional hypotheses");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score corrections against golden");
  add_common(evaluate, true, false, true, true);
  evaluate->add_option("--corrected", corrected_path, "Corrected JSONL")->required();
  evaluate->add_option("--source", source_name, "asr or human");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build_vocab->parsed()) return cmd_build_vocab(args, min_count);
    if (simulate->parsed()) return cmd_simulate(args);
    if (align->parsed()) return cmd_align(args, source_name);
    if (pretrain->parsed()) return cmd_pretrain(args, samples_out, resume);
    if (finetune->parsed()) return cmd_finetune(args, out_path, source_name);
    if (correct->parsed()) return cmd_correct(args, source_name, threshold, no_additional);
    if (evaluate->parsed()) return cmd_evaluate(args, corrected_path, source_name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
