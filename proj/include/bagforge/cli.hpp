#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bagforge/corrective.hpp"
#include "bagforge/eval.hpp"
#include "bagforge/pair_model.hpp"

namespace bagforge {

/// Flags shared by the CLI subcommands, with the stock defaults.
struct RunConfig {
  std::string command;
  std::string corpus_path;
  std::string model_path;
  std::string model_out_path;
  std::string report_path;
  std::string format = "csv";  // csv | json
  std::string bag_text;
  int order = 2;
  double alpha = 1.0;
  double beta1 = 0.6;
  double beta2 = 0.5;
  double floor_value = 0.0;
  double pair_floor = 0.00001;
  double unseen_eps = 1e-9;
  double ge_threshold = 0.0;
  int max_epochs = 50;
  std::string approach = "exact";  // exact | near
  std::size_t parts = 3;
  std::size_t len_lo = 1;
  std::size_t len_hi = 6;
  std::uint32_t seed = 1;
  // synth only
  std::size_t synth_vocab = 30;
  std::size_t synth_sentences = 60;
  std::string out_path;

  TrainingParams training_params() const;
  SearchApproach search_approach() const;
};

// Dispatches to the subcommands. Exit status: 0 success, 1 usage error,
// 2 data error. `in` feeds the interactive `correct` session; diagnostics go
// to `err`, results to `out`.
int run_command(const std::vector<std::string>& args, std::istream& in,
                std::ostream& out, std::ostream& err);

struct CorrectionSessionResult {
  PairTable table;
  Vocabulary vocab;
  std::size_t corrections = 0;
};

// Read a bag line, print the generated ordering, then read "ok" or a
// corrected ordering over the same multiset. Corrections are applied to the
// table immediately, one sentence per batch. "quit" (or end of input) ends
// the session; the caller persists the returned table.
CorrectionSessionResult interactive_correction_session(
    PairTable table, Vocabulary vocab, const TrainingParams& params,
    std::istream& in, std::ostream& out);

std::string stage_matrix_csv(const StageMatrix& m);
std::string stage_matrix_json(const StageMatrix& m);

// Deterministic serialization, trailing newline; destination "-" writes to
// `out`, anything else is an atomically written file path.
void emit_report(const std::string& content, const std::string& destination,
                 std::ostream& out);

// Deterministic synthetic corpus: sentences of distinct tokens ordered by a
// seed-derived global token ranking, so a run-time domain convention exists
// for corrective training to learn.
std::vector<std::string> synth_corpus_lines(std::size_t vocab_size,
                                            std::size_t sentences,
                                            std::size_t len_lo,
                                            std::size_t len_hi,
                                            std::uint32_t seed);

}  // namespace bagforge
