#pragma once

#include <cstdint>
#include <vector>

#include "bagforge/lexicon.hpp"
#include "bagforge/pair_model.hpp"

namespace bagforge {

enum class SearchApproach { exact, near };

/// A partial sequence in the coverage DP.
struct Hypothesis {
  // Count vector aligned with the input Bag's items().
  std::vector<std::uint32_t> coverage;
  // Last min(len, order-1) emitted tokens, front-padded with the boundary
  // marker while fewer than order-1 words have been emitted.
  std::vector<TokenId> suffix;
  double log_score = 0.0;
  // Emitted interior sequence.
  std::vector<TokenId> trace;
};

struct SearchStats {
  std::uint64_t expanded = 0;
  std::uint64_t merges = 0;
};

struct SearchResult {
  std::vector<TokenId> sequence;  // <*, w_1, ..., w_n, *>
  double log_score = 0.0;
  SearchStats stats;

  std::vector<TokenId> interior() const {
    return std::vector<TokenId>(sequence.begin() + 1, sequence.end() - 1);
  }
};

// Sum of ln pair_score over (*,w1),(w1,w2),...,(wn,*). Unseen pairs
// contribute ln unseen_eps. The terms are summed in ascending order, so two
// sequences built from the same multiset of pairs score bitwise-identically
// and every solver resolves such ties the same way.
double score_sequence(const PairTable& table,
                      const std::vector<TokenId>& interior);
double score_sequence(const PairTable& table, const Sentence& s);

// Keeps the hypothesis with the greater log score; equal scores keep the
// lexicographically smaller trace. Exact mode requires equal length
// (> order-1), equal suffixes and equal coverage; near mode drops the
// coverage condition, so the survivor keeps its own coverage and the
// discarded one's is lost. Throws std::invalid_argument when the
// preconditions fail.
const Hypothesis& merge_hypotheses(const Hypothesis& a, const Hypothesis& b,
                                   SearchApproach mode, int order = 2);

// Exact coverage DP: states keyed by (coverage, suffix); the returned score
// is the global maximum over all distinct permutations of the bag.
SearchResult generate_exact(const PairTable& table, const Bag& bag);

// Near-optimal DP: one surviving hypothesis per (step, suffix) state. Always
// emits a valid permutation; its score never exceeds generate_exact's.
SearchResult generate_near(const PairTable& table, const Bag& bag);

// Enumerates every distinct permutation (duplicates deduplicated) and keeps
// the best. Guarded to bags of at most 9 words.
SearchResult generate_bruteforce(const PairTable& table, const Bag& bag);

SearchResult generate(const PairTable& table, const Bag& bag,
                      SearchApproach approach);

}  // namespace bagforge
