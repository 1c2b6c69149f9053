#include "bagforge/bag_search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace bagforge {

namespace {

// Permutations of a bag with duplicate words can use the exact same multiset
// of pairs in different orders; summing their logs in a canonical order makes
// such sequences score bitwise-identically, so all solvers see the same ties.
double canonical_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) {
    sum += t;
  }
  return sum;
}

void insert_sorted(std::vector<double>& terms, double value) {
  terms.insert(std::upper_bound(terms.begin(), terms.end(), value), value);
}

double sum_terms(const std::vector<double>& terms) {
  double sum = 0.0;
  for (double t : terms) {
    sum += t;
  }
  return sum;
}

}  // namespace

double score_sequence(const PairTable& table,
                      const std::vector<TokenId>& interior) {
  std::vector<double> terms;
  terms.reserve(interior.size() + 1);
  TokenId prev = kBoundary;
  for (TokenId w : interior) {
    terms.push_back(std::log(table.score(prev, w)));
    prev = w;
  }
  terms.push_back(std::log(table.score(prev, kBoundary)));
  return canonical_sum(terms);
}

double score_sequence(const PairTable& table, const Sentence& s) {
  return score_sequence(table, s.words);
}

namespace {

// DP node: a Hypothesis plus its sorted log terms, kept so child scores can
// be re-summed canonically.
struct Node {
  Hypothesis hyp;
  std::vector<double> terms;  // ascending
};

// Survivor rule shared by all solvers: greater score wins, ties keep the
// lexicographically smaller emitted sequence.
bool beats(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_score != b.log_score) return a.log_score > b.log_score;
  return a.trace < b.trace;
}

std::vector<TokenId> extend_suffix(const std::vector<TokenId>& suffix,
                                   TokenId w, int order) {
  std::vector<TokenId> s;
  const std::size_t keep = static_cast<std::size_t>(order - 1);
  s.reserve(keep);
  if (suffix.size() >= keep) {
    s.assign(suffix.end() - (keep - 1), suffix.end());
  } else {
    s = suffix;
  }
  s.push_back(w);
  return s;
}

SearchResult run_dp(const PairTable& table, const Bag& bag,
                    bool coverage_in_key) {
  if (bag.total() == 0) {
    throw std::invalid_argument("empty bag");
  }
  const int order = table.order();
  const auto& items = bag.items();
  const std::size_t d = items.size();
  SearchStats stats;

  Node root;
  root.hyp.coverage.assign(d, 0);
  root.hyp.suffix = {kBoundary};

  using Key = std::vector<std::uint32_t>;
  auto key_of = [&](const Hypothesis& h) {
    Key k;
    k.reserve((coverage_in_key ? d : 0) + h.suffix.size());
    if (coverage_in_key) {
      k.insert(k.end(), h.coverage.begin(), h.coverage.end());
    }
    k.insert(k.end(), h.suffix.begin(), h.suffix.end());
    return k;
  };

  std::map<Key, Node> level;
  level.emplace(key_of(root.hyp), std::move(root));

  for (std::size_t step = 0; step < bag.total(); ++step) {
    std::map<Key, Node> next;
    for (const auto& [key, node] : level) {
      for (std::size_t i = 0; i < d; ++i) {
        if (node.hyp.coverage[i] >= items[i].second) {
          continue;
        }
        const TokenId w = items[i].first;
        Node child;
        child.hyp.coverage = node.hyp.coverage;
        child.hyp.coverage[i] += 1;
        child.hyp.suffix = extend_suffix(node.hyp.suffix, w, order);
        child.terms = node.terms;
        insert_sorted(child.terms,
                      std::log(table.score(node.hyp.suffix.back(), w)));
        child.hyp.log_score = sum_terms(child.terms);
        child.hyp.trace = node.hyp.trace;
        child.hyp.trace.push_back(w);
        ++stats.expanded;

        Key k = key_of(child.hyp);
        auto it = next.find(k);
        if (it == next.end()) {
          next.emplace(std::move(k), std::move(child));
        } else {
          ++stats.merges;
          if (beats(child.hyp, it->second.hyp)) {
            it->second = std::move(child);
          }
        }
      }
    }
    level = std::move(next);
  }

  const Node* best = nullptr;
  double best_score = 0.0;
  std::vector<double> closing;
  for (const auto& [key, node] : level) {
    closing = node.terms;
    insert_sorted(closing,
                  std::log(table.score(node.hyp.suffix.back(), kBoundary)));
    const double s = sum_terms(closing);
    if (best == nullptr || s > best_score ||
        (s == best_score && node.hyp.trace < best->hyp.trace)) {
      best = &node;
      best_score = s;
    }
  }

  SearchResult result;
  result.sequence = with_boundaries(best->hyp.trace);
  result.log_score = best_score;
  result.stats = stats;
  return result;
}

}  // namespace

const Hypothesis& merge_hypotheses(const Hypothesis& a, const Hypothesis& b,
                                   SearchApproach mode, int order) {
  const std::size_t min_len = static_cast<std::size_t>(order - 1);
  const bool mergeable =
      a.trace.size() > min_len && a.trace.size() == b.trace.size() &&
      a.suffix == b.suffix &&
      (mode == SearchApproach::near || a.coverage == b.coverage);
  if (!mergeable) {
    throw std::invalid_argument("not mergeable");
  }
  return beats(a, b) ? a : b;
}

SearchResult generate_exact(const PairTable& table, const Bag& bag) {
  return run_dp(table, bag, true);
}

SearchResult generate_near(const PairTable& table, const Bag& bag) {
  return run_dp(table, bag, false);
}

SearchResult generate_bruteforce(const PairTable& table, const Bag& bag) {
  if (bag.total() == 0) {
    throw std::invalid_argument("empty bag");
  }
  if (bag.total() > 9) {
    throw std::invalid_argument("oracle size limit");
  }
  std::vector<TokenId> perm;
  perm.reserve(bag.total());
  for (const auto& [token, count] : bag.items()) {
    perm.insert(perm.end(), count, token);
  }
  // items() is sorted, so next_permutation enumerates each distinct
  // permutation exactly once in lexicographic order; keeping the first
  // maximum implements the shared tie-break.
  SearchResult best;
  bool have = false;
  do {
    const double s = score_sequence(table, perm);
    ++best.stats.expanded;
    if (!have || s > best.log_score) {
      best.sequence = with_boundaries(perm);
      best.log_score = s;
      have = true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

SearchResult generate(const PairTable& table, const Bag& bag,
                      SearchApproach approach) {
  return approach == SearchApproach::exact ? generate_exact(table, bag)
                                           : generate_near(table, bag);
}

}  // namespace bagforge
