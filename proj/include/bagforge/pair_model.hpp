#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bagforge/lexicon.hpp"

namespace bagforge {

using TokenPair = std::pair<TokenId, TokenId>;

inline std::uint64_t pack_pair(TokenId a, TokenId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}
inline std::uint64_t pack_pair(const TokenPair& p) {
  return pack_pair(p.first, p.second);
}
inline TokenPair unpack_pair(std::uint64_t key) {
  return {static_cast<TokenId>(key >> 32),
          static_cast<TokenId>(key & 0xffffffffu)};
}

/// Boundary-augmented adjacent-pair occurrence counts for a corpus.
struct PairCounts {
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total_pairs = 0;

  std::uint64_t distinct_pairs() const { return counts.size(); }
};

/// The training table: adjacent-word-pair scores keyed by (TokenId, TokenId).
///
/// Right after estimate() the scores are joint relative frequencies summing
/// to 1. Corrective training adds and subtracts freely afterwards and never
/// renormalizes, so the one standing rule is that stored scores stay > 0.
/// Absent pairs score unseen_eps, strictly below the training floor so that
/// explicitly floored pairs outrank never-seen pairs.
class PairTable {
 public:
  explicit PairTable(int order = 2, double unseen_eps = 1e-9);

  double score(TokenId a, TokenId b) const;
  bool contains(TokenId a, TokenId b) const;
  void set(TokenId a, TokenId b, double value);  // value must be > 0

  std::size_t entries() const { return scores_.size(); }
  int order() const { return order_; }
  double unseen_eps() const { return unseen_eps_; }
  const std::unordered_map<std::uint64_t, double>& raw() const {
    return scores_;
  }
  bool operator==(const PairTable&) const = default;

 private:
  std::unordered_map<std::uint64_t, double> scores_;
  int order_;
  double unseen_eps_;
};

// Each sentence <*, w1, ..., wn, *> contributes the n+1 adjacent pairs
// (*,w1), (w1,w2), ..., (wn,*).
PairCounts count_pairs(const std::vector<Sentence>& corpus);

// Relative-frequency table: score(a,b) = count(a,b) / total_pairs.
PairTable estimate(const PairCounts& counts, int order = 2,
                   double unseen_eps = 1e-9);

double pair_score(const PairTable& table, TokenId a, TokenId b);

struct LoadedModel {
  Vocabulary vocab;
  PairTable table;
};

// Model file: one header line, then "<token_a>\t<token_b>\t<score>" rows
// sorted lexicographically by (token_a, token_b) text, scores printed as the
// shortest decimal that round-trips. Saving is byte-deterministic.
void save_model(const PairTable& table, const Vocabulary& vocab,
                std::ostream& out);
void save_model(const PairTable& table, const Vocabulary& vocab,
                const std::string& path);
LoadedModel load_model(std::istream& in);
LoadedModel load_model(const std::string& path);

struct ModelStats {
  // Known when derived from counts; a score table does not retain it.
  std::optional<std::uint64_t> total_pairs;
  std::uint64_t distinct_pairs = 0;
  std::uint64_t vocab_size = 0;
};

ModelStats model_stats(const PairCounts& counts, const Vocabulary& vocab);
ModelStats model_stats(const PairTable& table, const Vocabulary& vocab);

}  // namespace bagforge
