#include "bagforge/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace bagforge {

namespace {

void check_same_bag(const Sentence& ref, const std::vector<TokenId>& hyp) {
  if (!(bag_of(ref) == Bag::from_tokens(hyp))) {
    throw std::invalid_argument("hypothesis is not a permutation of the reference bag");
  }
}

}  // namespace

bool sentence_correct(const Sentence& ref, const std::vector<TokenId>& hyp) {
  check_same_bag(ref, hyp);
  return ref.words == hyp;
}

std::size_t word_correct_count(const Sentence& ref,
                               const std::vector<TokenId>& hyp) {
  check_same_bag(ref, hyp);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ref.words.size(); ++i) {
    if (ref.words[i] == hyp[i]) {
      ++correct;
    }
  }
  return correct;
}

RateReport evaluate_set(const PairTable& table,
                        const std::vector<Sentence>& sentences,
                        SearchApproach approach) {
  RateReport r;
  for (const Sentence& s : sentences) {
    const SearchResult res = generate(table, bag_of(s), approach);
    const std::vector<TokenId> hyp = res.interior();
    r.sentences_total += 1;
    r.words_total += s.length();
    if (sentence_correct(s, hyp)) {
      r.sentences_correct += 1;
    }
    r.words_correct += word_correct_count(s, hyp);
  }
  return r;
}

std::vector<std::vector<Sentence>> partition_corpus(
    const std::vector<Sentence>& sentences, std::size_t len_lo,
    std::size_t len_hi, std::size_t k) {
  if (k < 1) {
    throw std::invalid_argument("k must be at least 1");
  }
  std::vector<Sentence> extracted;
  for (const Sentence& s : sentences) {
    if (s.length() >= len_lo && s.length() <= len_hi) {
      extracted.push_back(s);
    }
  }
  const std::size_t n = extracted.size();
  const std::size_t base = n / k;
  const std::size_t rem = n % k;
  std::vector<std::vector<Sentence>> parts(k);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) {
    // later parts take the extra sentences: 229/3 -> 76, 76, 77
    const std::size_t size = base + (i >= k - rem ? 1 : 0);
    parts[i].assign(extracted.begin() + pos, extracted.begin() + pos + size);
    pos += size;
  }
  return parts;
}

StageMatrix staged_experiment(const PairTable& base,
                              const std::vector<std::vector<Sentence>>& parts,
                              const TrainingParams& params,
                              SearchApproach eval_approach) {
  if (parts.size() < 2) {
    throw std::invalid_argument("staged experiment needs at least 2 parts");
  }
  StageMatrix m;
  PairTable table = base;

  auto evaluate_stage = [&]() {
    std::vector<RateReport> row;
    RateReport average;
    for (const auto& part : parts) {
      RateReport r = evaluate_set(table, part, eval_approach);
      average.sentences_total += r.sentences_total;
      average.words_total += r.words_total;
      average.sentences_correct += r.sentences_correct;
      average.words_correct += r.words_correct;
      row.push_back(r);
    }
    m.cells.push_back(std::move(row));
    m.averages.push_back(average);
  };

  evaluate_stage();  // stage 0: untrained baseline
  for (const auto& part : parts) {
    TrainingResult tr = corrective_training(table, part, params);
    table = std::move(tr.table);
    m.training.push_back(std::move(tr.epochs));
    evaluate_stage();
  }
  return m;
}

}  // namespace bagforge
