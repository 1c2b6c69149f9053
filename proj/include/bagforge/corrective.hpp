#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bagforge/bag_search.hpp"
#include "bagforge/lexicon.hpp"
#include "bagforge/pair_model.hpp"

namespace bagforge {

/// Evidence from one divergence point: the pair the desired sequence wants
/// and the pair the computed sequence produced instead.
struct SuspiciousTuple {
  TokenPair ordered;
  TokenPair disordered;

  bool operator==(const SuspiciousTuple&) const = default;
};

struct TrainingParams {
  double alpha = 1.0;   // scaling factor
  double beta1 = 0.6;   // learning rate of the ordered pairs
  double beta2 = 0.5;   // learning rate of the disordered pairs
  double floor_value = 0.0;
  double pair_floor = 0.00001;
  double ge_threshold = 0.0;
  int max_epochs = 50;
  SearchApproach approach = SearchApproach::exact;

  // beta1 and beta2 must lie in [0,1] with beta1 + beta2 > 1; the degenerate
  // beta1 = beta2 = 0 setting is also accepted (it disables feedback and
  // makes training a no-op on the table).
  void validate() const;
};

/// One ordered/disordered score adjustment, as a pair of deltas.
struct PairAdjustment {
  double ordered_delta = 0.0;
  double disordered_delta = 0.0;
};

// Per-pair deltas accumulated within one epoch; each sentence contributes at
// most one delta per pair, deltas across sentences are averaged.
using AdjustmentLedger = std::unordered_map<std::uint64_t, std::vector<double>>;
using PairDeltas = std::unordered_map<std::uint64_t, double>;

enum class StopReason { none, ge_small, all_correct, no_feedback, max_epochs };

const char* to_string(StopReason r);

struct EpochReport {
  int epoch = 0;
  double ge = 0.0;
  std::vector<double> gamma;  // per training sentence, 0 when it was correct
  std::size_t sentences_correct = 0;
  std::size_t adjustments_applied = 0;
  StopReason stop_reason = StopReason::none;
};

// Walks the desired sequence <*, w1..wn, *> against the computed permutation
// <*, w_p(1)..w_p(n), *>: each desired position claims the first unmarked
// computed position holding the same word; when the words following the two
// claimed positions differ, the tuple (<w_i, w_i+1>, <w_p(j), w_p(j+1)>) is
// emitted. Equal sequences emit nothing. Throws std::runtime_error when the
// sequences are not permutations of the same bag.
std::vector<SuspiciousTuple> find_pairs(const std::vector<TokenId>& desired,
                                        const std::vector<TokenId>& computed);

// Pure score-update rule on one suspicious tuple, branching on
// dp = p_ordered - p_disordered:
//   dp > 0: no change.
//   dp = 0: nudge apart by floor_value, then scale by alpha.
//   dp < 0: ordered gains beta1*|dp|, disordered loses beta2*|dp|, scaled by
//           alpha; the post-update gap is alpha*(beta1+beta2-1)*|dp|.
PairAdjustment adjust_pair(const TrainingParams& params, double p_ordered,
                           double p_disordered);

// Arithmetic mean of each pair's recorded deltas.
PairDeltas average_adjustments(const AdjustmentLedger& ledger);

struct ApplyResult {
  PairTable table;
  std::size_t adjustments_applied = 0;
};

// Existing pairs get score + delta, floored at pair_floor whenever the sum
// would not stay positive. Pairs absent from the table are inserted only if
// their delta alone is strictly positive.
ApplyResult apply_adjustments(PairTable table, const PairDeltas& deltas,
                              double pair_floor = 0.00001);

struct GeResult {
  double ge = 0.0;
  std::vector<double> gamma;
};

// GE = sum over sentences of gamma_i, where gamma_i sums |ordered delta| +
// |disordered delta| over that sentence's suspicious tuples (raw per-tuple
// deltas, before averaging).
GeResult gradient_of_error(
    const std::vector<std::vector<PairAdjustment>>& per_sentence);

struct TrainingResult {
  PairTable table;
  std::vector<EpochReport> epochs;
};

// Batch corrective training. Per epoch: regenerate every training sentence
// against the current table, collect suspicious tuples and their deltas,
// then average per pair and apply once. Stops on: zero suspicious tuples,
// zero applied adjustments, GE <= ge_threshold, or max_epochs.
TrainingResult corrective_training(const PairTable& table,
                                   const std::vector<Sentence>& training,
                                   const TrainingParams& params);

std::string epoch_reports_jsonl(const std::vector<EpochReport>& reports);

}  // namespace bagforge
