#include "bagforge/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "bagforge/text_io.hpp"

namespace bagforge {

TrainingParams RunConfig::training_params() const {
  TrainingParams p;
  p.alpha = alpha;
  p.beta1 = beta1;
  p.beta2 = beta2;
  p.floor_value = floor_value;
  p.pair_floor = pair_floor;
  p.ge_threshold = ge_threshold;
  p.max_epochs = max_epochs;
  p.approach = search_approach();
  return p;
}

SearchApproach RunConfig::search_approach() const {
  if (approach == "exact") return SearchApproach::exact;
  if (approach == "near") return SearchApproach::near;
  throw std::invalid_argument("approach must be exact or near");
}

namespace {

std::string join_tokens(const Vocabulary& vocab,
                        const std::vector<TokenId>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += vocab.text(tokens[i]);
  }
  return out;
}

std::vector<TokenId> intern_tokens(Vocabulary& vocab,
                                   const std::vector<std::string>& texts) {
  std::vector<TokenId> ids;
  ids.reserve(texts.size());
  for (const std::string& t : texts) {
    if (t == kBoundaryText) {
      throw std::runtime_error("reserved token \"*\" is not a bag word");
    }
    ids.push_back(vocab.intern(t));
  }
  return ids;
}

std::vector<Sentence> load_corpus(const std::string& path, Vocabulary& vocab) {
  std::istringstream in(read_file(path));
  return tokenize_corpus(in, vocab);
}

std::vector<Sentence> filter_lengths(const std::vector<Sentence>& sentences,
                                     std::size_t lo, std::size_t hi) {
  std::vector<Sentence> kept;
  for (const Sentence& s : sentences) {
    if (s.length() >= lo && s.length() <= hi) {
      kept.push_back(s);
    }
  }
  return kept;
}

std::string rate_report_json(const RateReport& r) {
  std::ostringstream out;
  out << "{\"sentences_total\":" << r.sentences_total
      << ",\"words_total\":" << r.words_total
      << ",\"sentences_correct\":" << r.sentences_correct
      << ",\"words_correct\":" << r.words_correct
      << ",\"sentence_rate\":" << format_double(r.sentence_rate())
      << ",\"word_rate\":" << format_double(r.word_rate()) << "}";
  return out.str();
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.corpus_path.empty()) {
    Vocabulary vocab;
    const auto corpus = load_corpus(cfg.corpus_path, vocab);
    std::uint64_t words = 0;
    for (const Sentence& s : corpus) words += s.length();
    const auto extracted = filter_lengths(corpus, cfg.len_lo, cfg.len_hi);
    std::uint64_t extracted_words = 0;
    for (const Sentence& s : extracted) extracted_words += s.length();
    const PairCounts counts = count_pairs(corpus);
    const ModelStats stats = model_stats(counts, vocab);
    out << "total sentences      " << corpus.size() << "\n"
        << "total words          " << words << "\n"
        << "extracted sentences  " << extracted.size() << "  (lengths "
        << cfg.len_lo << "-" << cfg.len_hi << ")\n"
        << "extracted words      " << extracted_words << "\n"
        << "total pairs          " << *stats.total_pairs << "\n"
        << "distinct pairs       " << stats.distinct_pairs << "\n"
        << "vocabulary           " << stats.vocab_size << "\n";
  }
  if (!cfg.model_path.empty()) {
    const LoadedModel m = load_model(cfg.model_path);
    const ModelStats stats = model_stats(m.table, m.vocab);
    out << "model                " << cfg.model_path << "\n"
        << "order                " << m.table.order() << "\n"
        << "unseen_eps           " << format_double(m.table.unseen_eps())
        << "\n"
        << "distinct pairs       " << stats.distinct_pairs << "\n"
        << "vocabulary           " << stats.vocab_size << "\n";
  }
  return 0;
}

int cmd_train_lm(const RunConfig& cfg, std::ostream& out) {
  Vocabulary vocab;
  const auto corpus = load_corpus(cfg.corpus_path, vocab);
  if (corpus.empty()) {
    throw std::runtime_error("corpus has no sentences: " + cfg.corpus_path);
  }
  const PairCounts counts = count_pairs(corpus);
  const PairTable table = estimate(counts, cfg.order, cfg.unseen_eps);
  save_model(table, vocab, cfg.model_path);
  out << "trained on " << corpus.size() << " sentences: "
      << counts.total_pairs << " total pairs, " << counts.distinct_pairs()
      << " distinct pairs, vocabulary " << vocab.size() << "\n"
      << "model saved: " << cfg.model_path << "\n";
  return 0;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  LoadedModel m = load_model(cfg.model_path);
  const auto texts = split_whitespace(cfg.bag_text);
  if (texts.empty()) {
    throw std::invalid_argument("--bag must contain at least one token");
  }
  const Bag bag = Bag::from_tokens(intern_tokens(m.vocab, texts));
  const SearchResult r = generate(m.table, bag, cfg.search_approach());
  out << join_tokens(m.vocab, r.interior()) << "\n"
      << "log_score " << format_double(r.log_score) << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  LoadedModel m = load_model(cfg.model_path);
  const auto corpus = load_corpus(cfg.corpus_path, m.vocab);
  const auto extracted = filter_lengths(corpus, cfg.len_lo, cfg.len_hi);
  const RateReport r = evaluate_set(m.table, extracted, cfg.search_approach());
  out << "sentences  " << r.sentences_correct << "/" << r.sentences_total
      << "  sentence correct rate " << std::fixed << std::setprecision(2)
      << r.sentence_rate() << "%\n"
      << "words      " << r.words_correct << "/" << r.words_total
      << "  word correct rate " << r.word_rate() << "%\n";
  out.unsetf(std::ios::fixed);
  out << std::setprecision(6);
  if (!cfg.report_path.empty()) {
    emit_report(rate_report_json(r) + "\n", cfg.report_path, out);
  }
  return 0;
}

int cmd_train_corrective(const RunConfig& cfg, std::ostream& out) {
  LoadedModel m = load_model(cfg.model_path);
  const auto corpus = load_corpus(cfg.corpus_path, m.vocab);
  const auto extracted = filter_lengths(corpus, cfg.len_lo, cfg.len_hi);
  const TrainingResult tr =
      corrective_training(m.table, extracted, cfg.training_params());
  const std::string dest =
      cfg.model_out_path.empty() ? cfg.model_path : cfg.model_out_path;
  save_model(tr.table, m.vocab, dest);
  const EpochReport& last = tr.epochs.back();
  out << "trained on " << extracted.size() << " sentences for "
      << tr.epochs.size() << " epoch(s); final GE " << format_double(last.ge)
      << ", stop reason " << to_string(last.stop_reason) << "\n"
      << "model saved: " << dest << "\n";
  if (!cfg.report_path.empty()) {
    emit_report(epoch_reports_jsonl(tr.epochs), cfg.report_path, out);
  }
  return 0;
}

int cmd_experiment(const RunConfig& cfg, std::ostream& out,
                   std::ostream& err) {
  Vocabulary vocab;
  PairTable base(cfg.order, cfg.unseen_eps);
  std::vector<Sentence> corpus;
  if (!cfg.model_path.empty()) {
    LoadedModel m = load_model(cfg.model_path);
    vocab = std::move(m.vocab);
    base = std::move(m.table);
    corpus = load_corpus(cfg.corpus_path, vocab);
  } else {
    corpus = load_corpus(cfg.corpus_path, vocab);
    if (corpus.empty()) {
      throw std::runtime_error("corpus has no sentences: " + cfg.corpus_path);
    }
    base = estimate(count_pairs(corpus), cfg.order, cfg.unseen_eps);
  }
  const auto parts =
      partition_corpus(corpus, cfg.len_lo, cfg.len_hi, cfg.parts);
  std::ostream& info = cfg.report_path.empty() ? err : out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::uint64_t words = 0;
    for (const Sentence& s : parts[i]) words += s.length();
    info << "part " << (i + 1) << ": " << parts[i].size() << " sentences, "
         << words << " words\n";
  }
  const StageMatrix m = staged_experiment(
      base, parts, cfg.training_params(), cfg.search_approach());
  const std::string content =
      cfg.format == "json" ? stage_matrix_json(m) : stage_matrix_csv(m);
  emit_report(content, cfg.report_path.empty() ? "-" : cfg.report_path, out);
  return 0;
}

int cmd_correct(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  LoadedModel m = load_model(cfg.model_path);
  const CorrectionSessionResult session = interactive_correction_session(
      std::move(m.table), std::move(m.vocab), cfg.training_params(), in, out);
  const std::string dest =
      cfg.model_out_path.empty() ? cfg.model_path : cfg.model_out_path;
  save_model(session.table, session.vocab, dest);
  out << "model saved: " << dest << "\n";
  return 0;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const auto lines =
      synth_corpus_lines(cfg.synth_vocab, cfg.synth_sentences, cfg.len_lo,
                         cfg.len_hi, cfg.seed);
  std::string content;
  for (const std::string& l : lines) {
    content += l;
    content += '\n';
  }
  atomic_write_file(cfg.out_path, content);
  out << "wrote " << lines.size() << " sentences: " << cfg.out_path << "\n";
  return 0;
}

}  // namespace

std::string stage_matrix_csv(const StageMatrix& m) {
  std::string out = "stage,part,sentence_rate,word_rate\n";
  for (std::size_t stage = 0; stage < m.cells.size(); ++stage) {
    for (std::size_t part = 0; part < m.cells[stage].size(); ++part) {
      const RateReport& r = m.cells[stage][part];
      out += std::to_string(stage) + "," + std::to_string(part + 1) + "," +
             format_double(r.sentence_rate()) + "," +
             format_double(r.word_rate()) + "\n";
    }
    const RateReport& avg = m.averages[stage];
    out += std::to_string(stage) + ",average," +
           format_double(avg.sentence_rate()) + "," +
           format_double(avg.word_rate()) + "\n";
  }
  return out;
}

std::string stage_matrix_json(const StageMatrix& m) {
  std::string out = "[";
  bool first = true;
  auto row = [&](std::size_t stage, const std::string& part,
                 const RateReport& r) {
    if (!first) out += ",";
    first = false;
    out += "\n  {\"stage\":" + std::to_string(stage) + ",\"part\":" + part +
           ",\"sentence_rate\":" + format_double(r.sentence_rate()) +
           ",\"word_rate\":" + format_double(r.word_rate()) +
           ",\"sentences_correct\":" + std::to_string(r.sentences_correct) +
           ",\"sentences_total\":" + std::to_string(r.sentences_total) +
           ",\"words_correct\":" + std::to_string(r.words_correct) +
           ",\"words_total\":" + std::to_string(r.words_total) + "}";
  };
  for (std::size_t stage = 0; stage < m.cells.size(); ++stage) {
    for (std::size_t part = 0; part < m.cells[stage].size(); ++part) {
      row(stage, std::to_string(part + 1), m.cells[stage][part]);
    }
    row(stage, "\"average\"", m.averages[stage]);
  }
  out += "\n]\n";
  return out;
}

void emit_report(const std::string& content, const std::string& destination,
                 std::ostream& out) {
  if (destination == "-") {
    out << content;
  } else {
    atomic_write_file(destination, content);
  }
}

std::vector<std::string> synth_corpus_lines(std::size_t vocab_size,
                                            std::size_t sentences,
                                            std::size_t len_lo,
                                            std::size_t len_hi,
                                            std::uint32_t seed) {
  if (vocab_size < len_hi || len_lo < 1 || len_lo > len_hi) {
    throw std::invalid_argument("invalid synthetic corpus shape");
  }
  std::mt19937 rng(seed);
  auto below = [&](std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
  };

  // seed-derived global ranking: every sentence orders its tokens by it
  std::vector<std::size_t> rank(vocab_size);
  std::iota(rank.begin(), rank.end(), 0);
  for (std::size_t i = vocab_size - 1; i > 0; --i) {
    std::swap(rank[i], rank[below(i + 1)]);
  }

  const int width = vocab_size > 99 ? 3 : 2;
  auto token_text = [&](std::size_t idx) {
    std::ostringstream t;
    t << "w" << std::setw(width) << std::setfill('0') << (idx + 1);
    return t.str();
  };

  std::vector<std::string> lines;
  lines.reserve(sentences);
  std::vector<std::size_t> pool(vocab_size);
  for (std::size_t si = 0; si < sentences; ++si) {
    const std::size_t len = len_lo + below(len_hi - len_lo + 1);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < len; ++i) {
      std::swap(pool[i], pool[i + below(vocab_size - i)]);
    }
    std::vector<std::size_t> chosen(pool.begin(), pool.begin() + len);
    std::sort(chosen.begin(), chosen.end(),
              [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
    std::string line;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (i > 0) line += ' ';
      line += token_text(chosen[i]);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

CorrectionSessionResult interactive_correction_session(
    PairTable table, Vocabulary vocab, const TrainingParams& params,
    std::istream& in, std::ostream& out) {
  params.validate();
  CorrectionSessionResult session{std::move(table), std::move(vocab), 0};
  std::string line;

  auto read_line = [&](const char* prompt) -> bool {
    out << prompt;
    out.flush();
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  while (true) {
    if (!read_line("bag> ")) break;
    const auto bag_texts = split_whitespace(line);
    if (bag_texts.empty()) continue;
    if (bag_texts.size() == 1 && bag_texts[0] == "quit") break;

    Bag bag;
    try {
      bag = Bag::from_tokens(intern_tokens(session.vocab, bag_texts));
    } catch (const std::exception& e) {
      out << "invalid bag: " << e.what() << "\n";
      continue;
    }
    const SearchResult generated = generate(session.table, bag, params.approach);
    out << join_tokens(session.vocab, generated.interior()) << "\n";

    bool done = false;
    while (true) {
      if (!read_line("correction (or 'ok')> ")) {
        done = true;
        break;
      }
      const auto texts = split_whitespace(line);
      if (texts.empty()) continue;
      if (texts.size() == 1 && texts[0] == "ok") break;
      if (texts.size() == 1 && texts[0] == "quit") {
        done = true;
        break;
      }

      std::vector<TokenId> desired_interior;
      try {
        desired_interior = intern_tokens(session.vocab, texts);
        if (!(Bag::from_tokens(desired_interior) == bag)) {
          throw std::runtime_error("not a correction of this bag");
        }
      } catch (const std::exception& e) {
        out << "rejected: " << e.what()
            << " (expected the same words, reordered)\n";
        continue;
      }

      const std::vector<TokenId> desired = with_boundaries(desired_interior);
      if (desired == generated.sequence) {
        out << "already matches; nothing to adjust\n";
        break;
      }
      const auto tuples = find_pairs(desired, generated.sequence);
      AdjustmentLedger ledger;
      std::vector<PairAdjustment> raw;
      for (const SuspiciousTuple& t : tuples) {
        const double p_op =
            session.table.score(t.ordered.first, t.ordered.second);
        const double p_dp =
            session.table.score(t.disordered.first, t.disordered.second);
        const PairAdjustment adj = adjust_pair(params, p_op, p_dp);
        raw.push_back(adj);
        if (ledger.find(pack_pair(t.ordered)) == ledger.end()) {
          ledger[pack_pair(t.ordered)].push_back(adj.ordered_delta);
        }
        if (ledger.find(pack_pair(t.disordered)) == ledger.end()) {
          ledger[pack_pair(t.disordered)].push_back(adj.disordered_delta);
        }
      }
      const GeResult ge = gradient_of_error({raw});
      ApplyResult applied =
          apply_adjustments(std::move(session.table),
                            average_adjustments(ledger), params.pair_floor);
      session.table = std::move(applied.table);
      session.corrections += 1;
      out << tuples.size() << " suspicious tuples, applied "
          << applied.adjustments_applied << " pair adjustments, GE contribution "
          << format_double(ge.ge) << "\n";
      break;
    }
    if (done) break;
  }
  return session;
}

int run_command(const std::vector<std::string>& args, std::istream& in,
                std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"bag generation with run-time corrective training"};
  app.require_subcommand(1);

  auto add_lengths = [&](CLI::App* sub) {
    sub->add_option("--min-len", cfg.len_lo, "minimum sentence length");
    sub->add_option("--max-len", cfg.len_hi, "maximum sentence length");
  };
  auto add_training = [&](CLI::App* sub) {
    sub->add_option("--alpha", cfg.alpha, "scaling factor");
    sub->add_option("--beta1", cfg.beta1, "ordered-pair learning rate");
    sub->add_option("--beta2", cfg.beta2, "disordered-pair learning rate");
    sub->add_option("--floor-value", cfg.floor_value,
                    "nudge used when the two pair scores tie");
    sub->add_option("--pair-floor", cfg.pair_floor,
                    "value assigned to over-subtracted pairs");
    sub->add_option("--ge-threshold", cfg.ge_threshold,
                    "stop when GE falls to this value");
    sub->add_option("--max-epochs", cfg.max_epochs, "epoch cap");
    sub->add_option("--approach", cfg.approach, "exact | near")
        ->check(CLI::IsMember({"exact", "near"}));
  };

  CLI::App* stats = app.add_subcommand("stats", "corpus / model statistics");
  stats->add_option("--corpus", cfg.corpus_path, "corpus file");
  stats->add_option("--model", cfg.model_path, "model file");
  add_lengths(stats);

  CLI::App* train_lm =
      app.add_subcommand("train-lm", "estimate a pair model from a corpus");
  train_lm->add_option("--corpus", cfg.corpus_path, "corpus file")
      ->required();
  train_lm->add_option("--model", cfg.model_path, "output model file")
      ->required();
  train_lm->add_option("--order", cfg.order, "Markov order");
  train_lm->add_option("--unseen-eps", cfg.unseen_eps,
                       "score of pairs absent from the table");

  CLI::App* gen =
      app.add_subcommand("generate", "reorder a bag of words");
  gen->add_option("--model", cfg.model_path, "model file")->required();
  gen->add_option("--bag", cfg.bag_text, "whitespace-separated words")
      ->required();
  gen->add_option("--approach", cfg.approach, "exact | near")
      ->check(CLI::IsMember({"exact", "near"}));

  CLI::App* eval =
      app.add_subcommand("evaluate", "correct rates of a model on a corpus");
  eval->add_option("--model", cfg.model_path, "model file")->required();
  eval->add_option("--corpus", cfg.corpus_path, "corpus file")->required();
  eval->add_option("--approach", cfg.approach, "exact | near")
      ->check(CLI::IsMember({"exact", "near"}));
  eval->add_option("--report", cfg.report_path, "write a JSON report here");
  add_lengths(eval);

  CLI::App* train_c = app.add_subcommand(
      "train-corrective", "adapt a model to a corpus by corrective training");
  train_c->add_option("--model", cfg.model_path, "input model file")
      ->required();
  train_c->add_option("--corpus", cfg.corpus_path, "training corpus")
      ->required();
  train_c->add_option("--model-out", cfg.model_out_path,
                      "output model file (default: overwrite input)");
  train_c->add_option("--report", cfg.report_path,
                      "write epoch reports here as JSON lines");
  add_training(train_c);
  add_lengths(train_c);

  CLI::App* exp = app.add_subcommand(
      "experiment", "staged adaptation: train on one part, test on all");
  exp->add_option("--corpus", cfg.corpus_path, "corpus file")->required();
  exp->add_option("--model", cfg.model_path,
                  "base model (default: estimated from the corpus)");
  exp->add_option("--parts", cfg.parts, "number of parts");
  exp->add_option("--report", cfg.report_path,
                  "write the stage matrix here (default: stdout)");
  exp->add_option("--format", cfg.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  exp->add_option("--order", cfg.order, "Markov order");
  exp->add_option("--unseen-eps", cfg.unseen_eps,
                  "score of pairs absent from the table");
  add_training(exp);
  add_lengths(exp);

  CLI::App* correct = app.add_subcommand(
      "correct", "interactive session: generate, accept corrections, learn");
  correct->add_option("--model", cfg.model_path, "model file")->required();
  correct->add_option("--model-out", cfg.model_out_path,
                      "output model file (default: overwrite input)");
  add_training(correct);

  CLI::App* synth =
      app.add_subcommand("synth", "write a deterministic synthetic corpus");
  synth->add_option("--out", cfg.out_path, "output corpus file")->required();
  synth->add_option("--vocab", cfg.synth_vocab, "vocabulary size");
  synth->add_option("--sentences", cfg.synth_sentences, "sentence count");
  synth->add_option("--seed", cfg.seed,
                    "selects both the token draws and the ordering convention");
  add_lengths(synth);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (stats->parsed()) {
      if (cfg.corpus_path.empty() && cfg.model_path.empty()) {
        err << "error: stats needs --corpus and/or --model\n";
        return 1;
      }
      cfg.command = "stats";
      return cmd_stats(cfg, out);
    }
    if (train_lm->parsed()) {
      cfg.command = "train-lm";
      return cmd_train_lm(cfg, out);
    }
    if (gen->parsed()) {
      cfg.command = "generate";
      return cmd_generate(cfg, out);
    }
    if (eval->parsed()) {
      cfg.command = "evaluate";
      return cmd_evaluate(cfg, out);
    }
    if (train_c->parsed()) {
      cfg.command = "train-corrective";
      cfg.training_params().validate();
      return cmd_train_corrective(cfg, out);
    }
    if (exp->parsed()) {
      cfg.command = "experiment";
      cfg.training_params().validate();
      return cmd_experiment(cfg, out, err);
    }
    if (correct->parsed()) {
      cfg.command = "correct";
      cfg.training_params().validate();
      return cmd_correct(cfg, in, out);
    }
    if (synth->parsed()) {
      cfg.command = "synth";
      return cmd_synth(cfg, out);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 1;
}

}  // namespace bagforge
