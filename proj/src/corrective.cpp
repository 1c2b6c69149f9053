#include "bagforge/corrective.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "bagforge/text_io.hpp"

namespace bagforge {

void TrainingParams::validate() const {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("alpha must be positive");
  }
  if (beta1 < 0.0 || beta1 > 1.0 || beta2 < 0.0 || beta2 > 1.0) {
    throw std::invalid_argument("beta1 and beta2 must lie in [0, 1]");
  }
  const bool no_feedback_setting = beta1 == 0.0 && beta2 == 0.0;
  if (!no_feedback_setting && !(beta1 + beta2 > 1.0)) {
    throw std::invalid_argument("beta1 + beta2 must be greater than 1");
  }
  if (!(pair_floor > 0.0)) {
    throw std::invalid_argument("pair_floor must be positive");
  }
  if (floor_value < 0.0) {
    throw std::invalid_argument("floor_value must be nonnegative");
  }
  if (max_epochs < 1) {
    throw std::invalid_argument("max_epochs must be at least 1");
  }
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::none:
      return "none";
    case StopReason::ge_small:
      return "ge_small";
    case StopReason::all_correct:
      return "all_correct";
    case StopReason::no_feedback:
      return "no_feedback";
    case StopReason::max_epochs:
      return "max_epochs";
  }
  return "unknown";
}

namespace {

void check_same_bag(const std::vector<TokenId>& desired,
                    const std::vector<TokenId>& computed) {
  bool ok = desired.size() == computed.size() && desired.size() >= 3 &&
            desired.front() == kBoundary && desired.back() == kBoundary &&
            computed.front() == kBoundary && computed.back() == kBoundary;
  if (ok) {
    std::vector<TokenId> a(desired.begin() + 1, desired.end() - 1);
    std::vector<TokenId> b(computed.begin() + 1, computed.end() - 1);
    ok = std::count(a.begin(), a.end(), kBoundary) == 0 &&
         std::count(b.begin(), b.end(), kBoundary) == 0;
    if (ok) {
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      ok = a == b;
    }
  }
  if (!ok) {
    throw std::runtime_error("not a correction of this bag");
  }
}

}  // namespace

std::vector<SuspiciousTuple> find_pairs(const std::vector<TokenId>& desired,
                                        const std::vector<TokenId>& computed) {
  check_same_bag(desired, computed);
  const std::size_t n = desired.size() - 2;
  std::vector<char> mark(n + 1, 0);
  std::vector<SuspiciousTuple> tuples;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (mark[j] || computed[j] != desired[i]) {
        continue;
      }
      mark[j] = 1;
      if (desired[i + 1] != computed[j + 1]) {
        SuspiciousTuple t{{desired[i], desired[i + 1]},
                          {computed[j], computed[j + 1]}};
        // equal first words with differing successors, so never degenerate
        assert(!(t.ordered == t.disordered));
        tuples.push_back(t);
      }
      break;
    }
  }
  return tuples;
}

PairAdjustment adjust_pair(const TrainingParams& params, double p_ordered,
                           double p_disordered) {
  const double dp = p_ordered - p_disordered;
  if (dp > 0.0) {
    return {0.0, 0.0};
  }
  double new_ordered = 0.0;
  double new_disordered = 0.0;
  if (dp == 0.0) {
    new_ordered = params.alpha * (p_ordered + params.floor_value);
    new_disordered = params.alpha * (p_disordered - params.floor_value);
  } else {
    new_ordered = params.alpha * (p_ordered - params.beta1 * dp);
    new_disordered = params.alpha * (p_disordered + params.beta2 * dp);
  }
  return {new_ordered - p_ordered, new_disordered - p_disordered};
}

PairDeltas average_adjustments(const AdjustmentLedger& ledger) {
  PairDeltas averaged;
  averaged.reserve(ledger.size());
  for (const auto& [key, deltas] : ledger) {
    double sum = 0.0;
    for (double d : deltas) {
      sum += d;
    }
    averaged.emplace(key, sum / static_cast<double>(deltas.size()));
  }
  return averaged;
}

ApplyResult apply_adjustments(PairTable table, const PairDeltas& deltas,
                              double pair_floor) {
  std::size_t applied = 0;
  for (const auto& [key, delta] : deltas) {
    auto [a, b] = unpack_pair(key);
    if (table.contains(a, b)) {
      const double old_value = table.score(a, b);
      double value = old_value + delta;
      // the table never stores a nonpositive score, so the floor also
      // catches a sum of exactly zero
      if (value <= 0.0) {
        value = pair_floor;
      }
      if (value != old_value) {
        table.set(a, b, value);
        ++applied;
      }
    } else if (delta > 0.0) {
      table.set(a, b, delta);
      ++applied;
    }
  }
  return {std::move(table), applied};
}

GeResult gradient_of_error(
    const std::vector<std::vector<PairAdjustment>>& per_sentence) {
  GeResult r;
  r.gamma.reserve(per_sentence.size());
  for (const auto& tuples : per_sentence) {
    double gamma = 0.0;
    for (const PairAdjustment& adj : tuples) {
      gamma += std::abs(adj.ordered_delta) + std::abs(adj.disordered_delta);
    }
    r.gamma.push_back(gamma);
    r.ge += gamma;
  }
  return r;
}

TrainingResult corrective_training(const PairTable& table,
                                   const std::vector<Sentence>& training,
                                   const TrainingParams& params) {
  params.validate();
  TrainingResult result{table, {}};
  if (training.empty()) {
    EpochReport report;
    report.epoch = 1;
    report.stop_reason = StopReason::all_correct;
    result.epochs.push_back(std::move(report));
    return result;
  }

  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    AdjustmentLedger ledger;
    std::vector<std::vector<PairAdjustment>> raw_adjustments(training.size());
    std::size_t correct = 0;
    std::size_t total_tuples = 0;

    for (std::size_t si = 0; si < training.size(); ++si) {
      const Sentence& s = training[si];
      const std::vector<TokenId> desired = with_boundaries(s);
      const SearchResult computed =
          generate(result.table, bag_of(s), params.approach);
      if (computed.sequence == desired) {
        ++correct;
        continue;
      }
      const auto tuples = find_pairs(desired, computed.sequence);
      total_tuples += tuples.size();
      std::unordered_set<std::uint64_t> touched;
      for (const SuspiciousTuple& t : tuples) {
        const double p_op =
            result.table.score(t.ordered.first, t.ordered.second);
        const double p_dp =
            result.table.score(t.disordered.first, t.disordered.second);
        const PairAdjustment adj = adjust_pair(params, p_op, p_dp);
        raw_adjustments[si].push_back(adj);
        if (touched.insert(pack_pair(t.ordered)).second) {
          ledger[pack_pair(t.ordered)].push_back(adj.ordered_delta);
        }
        if (touched.insert(pack_pair(t.disordered)).second) {
          ledger[pack_pair(t.disordered)].push_back(adj.disordered_delta);
        }
      }
    }

    const GeResult ge = gradient_of_error(raw_adjustments);
    ApplyResult applied = apply_adjustments(
        std::move(result.table), average_adjustments(ledger), params.pair_floor);
    result.table = std::move(applied.table);

    EpochReport report;
    report.epoch = epoch;
    report.ge = ge.ge;
    report.gamma = ge.gamma;
    report.sentences_correct = correct;
    report.adjustments_applied = applied.adjustments_applied;
    if (total_tuples == 0) {
      report.stop_reason = StopReason::all_correct;
    } else if (applied.adjustments_applied == 0) {
      report.stop_reason = StopReason::no_feedback;
    } else if (ge.ge <= params.ge_threshold) {
      report.stop_reason = StopReason::ge_small;
    } else if (epoch == params.max_epochs) {
      report.stop_reason = StopReason::max_epochs;
    }
    const StopReason stop = report.stop_reason;
    result.epochs.push_back(std::move(report));
    if (stop != StopReason::none) {
      break;
    }
  }
  return result;
}

std::string epoch_reports_jsonl(const std::vector<EpochReport>& reports) {
  std::ostringstream out;
  for (const EpochReport& r : reports) {
    out << "{\"epoch\":" << r.epoch << ",\"ge\":" << format_double(r.ge)
        << ",\"sentences_correct\":" << r.sentences_correct
        << ",\"adjustments_applied\":" << r.adjustments_applied
        << ",\"stop_reason\":\"" << to_string(r.stop_reason) << "\"}\n";
  }
  return out.str();
}

}  // namespace bagforge
