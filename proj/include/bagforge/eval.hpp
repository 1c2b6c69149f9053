#pragma once

#include <cstdint>
#include <vector>

#include "bagforge/bag_search.hpp"
#include "bagforge/corrective.hpp"
#include "bagforge/lexicon.hpp"

namespace bagforge {

struct RateReport {
  std::uint64_t sentences_total = 0;
  std::uint64_t words_total = 0;
  std::uint64_t sentences_correct = 0;
  std::uint64_t words_correct = 0;

  double sentence_rate() const {
    return sentences_total == 0
               ? 0.0
               : 100.0 * static_cast<double>(sentences_correct) /
                     static_cast<double>(sentences_total);
  }
  double word_rate() const {
    return words_total == 0 ? 0.0
                            : 100.0 * static_cast<double>(words_correct) /
                                  static_cast<double>(words_total);
  }
};

// True iff the hypothesis reproduces the reference exactly, position by
// position. Both take interior sequences; throws std::invalid_argument when
// the two sides are not permutations of the same bag.
bool sentence_correct(const Sentence& ref, const std::vector<TokenId>& hyp);

// Number of interior positions where reference and hypothesis agree.
std::size_t word_correct_count(const Sentence& ref,
                               const std::vector<TokenId>& hyp);

// Regenerates each sentence from its bag and scores both correct rates.
RateReport evaluate_set(const PairTable& table,
                        const std::vector<Sentence>& sentences,
                        SearchApproach approach);

// Filters to interior lengths in [len_lo, len_hi], then splits in input
// order into k contiguous parts whose sizes differ by at most one (later
// parts take the extra sentences).
std::vector<std::vector<Sentence>> partition_corpus(
    const std::vector<Sentence>& sentences, std::size_t len_lo,
    std::size_t len_hi, std::size_t k);

/// Per (stage, part) rate grid of the staged adaptation protocol, plus the
/// per-stage micro-average over the union of parts and the per-stage
/// training epoch reports.
struct StageMatrix {
  std::vector<std::vector<RateReport>> cells;  // [stage][part]
  std::vector<RateReport> averages;            // [stage]
  std::vector<std::vector<EpochReport>> training;  // [stage-1], stages 1..k
};

// Stage 0 evaluates every part on the base table; stage s continues
// corrective training on part s from the previous stage's table and then
// evaluates every part.
StageMatrix staged_experiment(const PairTable& base,
                              const std::vector<std::vector<Sentence>>& parts,
                              const TrainingParams& params,
                              SearchApproach eval_approach);

}  // namespace bagforge
