#include "bagforge/eval.hpp"

#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace bagforge;

TEST_SUITE_BEGIN("eval");

TEST_CASE("sentence_correct compares position by position") {
  const Sentence ref{{1, 2, 3}};
  CHECK(sentence_correct(ref, {1, 2, 3}));
  CHECK(!sentence_correct(ref, {2, 1, 3}));
  CHECK(sentence_correct(Sentence{{4}}, {4}));
  CHECK_THROWS_AS(sentence_correct(ref, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(sentence_correct(ref, {1, 2, 4}), std::invalid_argument);
}

TEST_CASE("word_correct_count counts matching positions") {
  const Sentence ref{{1, 2, 3}};
  CHECK(word_correct_count(ref, {2, 1, 3}) == 1);
  CHECK(word_correct_count(ref, {1, 2, 3}) == 3);
  CHECK(word_correct_count(Sentence{{1, 2}}, {2, 1}) == 0);
  // correctness of the whole sentence and a full word count coincide
  CHECK(sentence_correct(ref, {1, 2, 3}) ==
        (word_correct_count(ref, {1, 2, 3}) == ref.length()));
}

TEST_CASE("evaluate_set on a memorizing table scores 100/100") {
  Vocabulary v;
  const auto corpus = tokenize_corpus({"a b", "b c", "c"}, v);
  const PairTable table = estimate(count_pairs(corpus));
  const RateReport r = evaluate_set(table, corpus, SearchApproach::exact);
  CHECK(r.sentences_total == 3);
  CHECK(r.words_total == 5);
  CHECK(r.sentence_rate() == 100.0);
  CHECK(r.word_rate() == 100.0);
}

TEST_CASE("evaluate_set arithmetic on a half-correct set") {
  // table prefers <b, a> and <a, c>; references say <a, b> and <a, c>
  Vocabulary v;
  const TokenId a = v.intern("a");
  const TokenId b = v.intern("b");
  const TokenId c = v.intern("c");
  PairTable t;
  t.set(kBoundary, b, 0.4);
  t.set(b, a, 0.4);
  t.set(a, kBoundary, 0.4);
  t.set(kBoundary, a, 0.3);
  t.set(a, c, 0.4);
  t.set(c, kBoundary, 0.4);

  const std::vector<Sentence> refs = {Sentence{{a, b}}, Sentence{{a, c}}};
  const RateReport r = evaluate_set(t, refs, SearchApproach::exact);
  CHECK(r.sentences_total == 2);
  CHECK(r.sentences_correct == 1);
  CHECK(r.sentence_rate() == 50.0);
  CHECK(r.words_total == 4);
  CHECK(r.words_correct == 2);  // <b,a> places neither word of <a,b>
  CHECK(r.word_rate() == 50.0);
}

TEST_CASE("partition_corpus filters lengths and balances sizes") {
  std::vector<Sentence> corpus;
  for (std::size_t i = 0; i < 229; ++i) {
    corpus.push_back(Sentence{{1, 2}});
  }
  const auto parts = partition_corpus(corpus, 1, 6, 3);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].size() == 76);
  CHECK(parts[1].size() == 76);
  CHECK(parts[2].size() == 77);

  const auto single = partition_corpus(corpus, 1, 6, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0].size() == 229);

  CHECK_THROWS_AS(partition_corpus(corpus, 1, 6, 0), std::invalid_argument);

  // filtering: drop everything longer than 1
  std::vector<Sentence> mixed = {Sentence{{1}}, Sentence{{1, 2}},
                                 Sentence{{1}}, Sentence{{1, 2, 3}}};
  const auto filtered = partition_corpus(mixed, 1, 1, 2);
  CHECK(filtered[0].size() == 1);
  CHECK(filtered[1].size() == 1);
  for (const auto& part : filtered) {
    for (const Sentence& s : part) {
      CHECK(s.length() == 1);
    }
  }
}

TEST_CASE("partition keeps input order across consecutive parts") {
  std::vector<Sentence> corpus;
  for (TokenId i = 1; i <= 7; ++i) {
    corpus.push_back(Sentence{{i}});
  }
  const auto parts = partition_corpus(corpus, 1, 6, 3);
  // 7 = 2 + 2 + 3: the extra sentence lands in the last part
  REQUIRE(parts[0].size() == 2);
  REQUIRE(parts[1].size() == 2);
  REQUIRE(parts[2].size() == 3);
  CHECK(parts[0][0].words[0] == 1);
  CHECK(parts[1][0].words[0] == 3);
  CHECK(parts[2][0].words[0] == 5);
  CHECK(parts[2][2].words[0] == 7);
}

TEST_CASE("staged_experiment walks stages and cumulative tables") {
  testutil::SyntheticSetup s =
      testutil::synthetic_setup(14, 60, 101, 24, 202, 2, 4);
  const PairTable base = estimate(count_pairs(s.generic));
  const auto parts = partition_corpus(s.domain, 1, 6, 3);
  TrainingParams params;
  const StageMatrix m =
      staged_experiment(base, parts, params, SearchApproach::exact);

  REQUIRE(m.cells.size() == 4);  // stage 0 plus one per part
  REQUIRE(m.averages.size() == 4);
  REQUIRE(m.training.size() == 3);
  for (const auto& row : m.cells) {
    REQUIRE(row.size() == 3);
  }

  // stage 0 equals a direct evaluation of each part on the base table
  for (std::size_t part = 0; part < parts.size(); ++part) {
    const RateReport direct =
        evaluate_set(base, parts[part], SearchApproach::exact);
    CHECK(m.cells[0][part].sentences_correct == direct.sentences_correct);
    CHECK(m.cells[0][part].words_correct == direct.words_correct);
  }

  // the micro-average pools sentences over the union of parts
  for (std::size_t stage = 0; stage < m.cells.size(); ++stage) {
    std::uint64_t sc = 0;
    std::uint64_t st = 0;
    for (const RateReport& r : m.cells[stage]) {
      sc += r.sentences_correct;
      st += r.sentences_total;
    }
    CHECK(m.averages[stage].sentences_correct == sc);
    CHECK(m.averages[stage].sentences_total == st);
  }

  // each stage's trained part is perfect right after its training
  for (std::size_t stage = 1; stage <= 3; ++stage) {
    CHECK(m.training[stage - 1].back().stop_reason == StopReason::all_correct);
    CHECK(m.cells[stage][stage - 1].sentence_rate() == 100.0);
  }

  CHECK_THROWS_AS(
      staged_experiment(base, {parts[0]}, params, SearchApproach::exact),
      std::invalid_argument);
}

TEST_CASE("stage-0 rates do not depend on the part split") {
  testutil::SyntheticSetup s =
      testutil::synthetic_setup(12, 40, 31, 18, 32, 2, 4);
  const PairTable base = estimate(count_pairs(s.generic));
  const auto parts2 = partition_corpus(s.domain, 1, 6, 2);
  const auto parts3 = partition_corpus(s.domain, 1, 6, 3);
  TrainingParams params;
  const StageMatrix m2 =
      staged_experiment(base, parts2, params, SearchApproach::exact);
  const StageMatrix m3 =
      staged_experiment(base, parts3, params, SearchApproach::exact);
  CHECK(m2.averages[0].sentences_correct == m3.averages[0].sentences_correct);
  CHECK(m2.averages[0].words_correct == m3.averages[0].words_correct);

  // permuting the parts permutes the stage-0 row and nothing else in it
  const std::vector<std::vector<Sentence>> reversed = {parts3[2], parts3[1],
                                                       parts3[0]};
  const StageMatrix mr =
      staged_experiment(base, reversed, params, SearchApproach::exact);
  CHECK(mr.averages[0].sentences_correct == m3.averages[0].sentences_correct);
  for (std::size_t p = 0; p < 3; ++p) {
    CHECK(mr.cells[0][p].sentences_correct ==
          m3.cells[0][2 - p].sentences_correct);
  }
}

TEST_SUITE_END();
