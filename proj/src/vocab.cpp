#include "wlmsc/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "wlmsc/io.hpp"

namespace wlmsc {

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> words;
  std::string word;
  std::istringstream in(line);
  while (in >> word) words.push_back(word);
  return words;
}

std::string lowercased(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string normalize_text(const std::string& text) {
  std::string out;
  for (const std::string& w : split_words(lowercased(text))) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

void Vocabulary::add(const std::string& token, long count) {
  token_to_id_[token] = static_cast<TokenId>(id_to_token_.size());
  id_to_token_.push_back(token);
  counts_.push_back(count);
}

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus, int min_count) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  if (min_count < 1) throw std::invalid_argument("min_count must be positive");

  std::unordered_map<std::string, long> counts;
  for (const std::string& line : corpus) {
    for (const std::string& w : split_words(lowercased(line))) ++counts[w];
  }

  std::vector<std::pair<std::string, long>> kept;
  for (const auto& [word, n] : counts) {
    if (n >= min_count) kept.emplace_back(word, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  v.add(kPadTok, 0);
  v.add(kUnkTok, 0);
  v.add(kMaskTok, 0);
  v.add(kInsertTok, 0);
  v.add(kDumTok, 0);
  for (const auto& [word, n] : kept) v.add(word, n);
  return v;
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_of(" \t") != std::string::npos) {
      throw std::runtime_error("vocabulary token contains whitespace: '" + line + "'");
    }
    if (v.token_to_id_.count(line)) {
      throw std::runtime_error("duplicate vocabulary token: '" + line + "'");
    }
    v.add(line, 0);
  }
  const char* expected[] = {kPadTok, kUnkTok, kMaskTok, kInsertTok, kDumTok};
  if (v.size() < kNumSpecialTokens) {
    throw std::runtime_error("vocabulary file too short: " + path);
  }
  for (int i = 0; i < kNumSpecialTokens; ++i) {
    if (v.id_to_token_[i] != expected[i]) {
      throw std::runtime_error("vocabulary file must start with the special tokens "
                               "[PAD] [UNK] [MASK] [INSERT] [DUM]: " + path);
    }
  }
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ostringstream out;
  for (const std::string& t : id_to_token_) out << t << '\n';
  write_file_atomic(path, out.str());
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || id >= size()) {
    throw std::out_of_range("token id out of range: " + std::to_string(id));
  }
  return id_to_token_[static_cast<size_t>(id)];
}

TokenId Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.count(token) > 0;
}

TokenSeq Vocabulary::tokenize(const std::string& text) const {
  TokenSeq ids;
  for (const std::string& w : split_words(lowercased(text))) ids.push_back(id(w));
  return ids;
}

std::string Vocabulary::detokenize(const TokenSeq& seq) const {
  std::string out;
  for (TokenId id : seq) {
    if (id == kPadId || id == kDumId) continue;
    if (!out.empty()) out += ' ';
    out += token(id);
  }
  return out;
}

std::string Vocabulary::join_raw(const TokenSeq& seq) const {
  std::string out;
  for (TokenId id : seq) {
    if (!out.empty()) out += ' ';
    out += token(id);
  }
  return out;
}

}  // namespace wlmsc
