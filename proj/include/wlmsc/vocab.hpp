#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "wlmsc/common.hpp"

namespace wlmsc {

// Word-level vocabulary. Ids 0..4 are always [PAD] [UNK] [MASK] [INSERT]
// [DUM]; corpus words follow ordered by descending count, ties lexicographic.
// Immutable after construction and safe to share across threads.
class Vocabulary {
 public:
  // corpus: text lines; words are lowercased and whitespace-split.
  // Keeps words occurring at least min_count times.
  static Vocabulary build(const std::vector<std::string>& corpus, int min_count = 1);

  // One token per line, line number == id. Validates the special-token prefix.
  static Vocabulary load(const std::string& path);
  void save(const std::string& path) const;

  int size() const { return static_cast<int>(id_to_token_.size()); }
  int num_words() const { return size() - kNumSpecialTokens; }

  const std::string& token(TokenId id) const;            // throws if out of range
  TokenId id(const std::string& token) const;            // kUnkId if absent
  bool contains(const std::string& token) const;

  // Lowercase + whitespace split; out-of-vocabulary words map to [UNK].
  TokenSeq tokenize(const std::string& text) const;

  // Tokens joined by single spaces; [PAD] and [DUM] are skipped.
  std::string detokenize(const TokenSeq& seq) const;

  // Joins every token literally, specials included. Used by label files
  // where [DUM] placement must survive a round trip.
  std::string join_raw(const TokenSeq& seq) const;

  // Unigram counts observed at build time, indexed by id (0 for specials).
  // Empty for vocabularies loaded from disk.
  const std::vector<long>& unigram_counts() const { return counts_; }

 private:
  Vocabulary() = default;
  void add(const std::string& token, long count);

  std::vector<std::string> id_to_token_;
  std::vector<long> counts_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

// Lowercase, collapse runs of whitespace to single spaces, trim.
std::string normalize_text(const std::string& text);

}  // namespace wlmsc
