#include "bagforge/pair_model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "bagforge/text_io.hpp"

namespace bagforge {

PairTable::PairTable(int order, double unseen_eps)
    : order_(order), unseen_eps_(unseen_eps) {
  if (order < 2) {
    throw std::invalid_argument("Markov order must be at least 2");
  }
  if (!(unseen_eps > 0.0)) {
    throw std::invalid_argument("unseen_eps must be positive");
  }
}

double PairTable::score(TokenId a, TokenId b) const {
  auto it = scores_.find(pack_pair(a, b));
  return it == scores_.end() ? unseen_eps_ : it->second;
}

bool PairTable::contains(TokenId a, TokenId b) const {
  return scores_.count(pack_pair(a, b)) != 0;
}

void PairTable::set(TokenId a, TokenId b, double value) {
  if (!(value > 0.0)) {
    throw std::invalid_argument("pair scores must be positive");
  }
  scores_[pack_pair(a, b)] = value;
}

PairCounts count_pairs(const std::vector<Sentence>& corpus) {
  PairCounts c;
  for (const Sentence& s : corpus) {
    TokenId prev = kBoundary;
    for (TokenId w : s.words) {
      ++c.counts[pack_pair(prev, w)];
      prev = w;
    }
    ++c.counts[pack_pair(prev, kBoundary)];
    c.total_pairs += s.length() + 1;
  }
  return c;
}

PairTable estimate(const PairCounts& counts, int order, double unseen_eps) {
  if (counts.total_pairs == 0) {
    throw std::invalid_argument("empty counts");
  }
  PairTable t(order, unseen_eps);
  const double total = static_cast<double>(counts.total_pairs);
  for (const auto& [key, n] : counts.counts) {
    auto [a, b] = unpack_pair(key);
    t.set(a, b, static_cast<double>(n) / total);
  }
  return t;
}

double pair_score(const PairTable& table, TokenId a, TokenId b) {
  return table.score(a, b);
}

void save_model(const PairTable& table, const Vocabulary& vocab,
                std::ostream& out) {
  out << "bagforge-pairs v1 order=" << table.order()
      << " unseen_eps=" << format_double(table.unseen_eps()) << "\n";
  struct Row {
    const std::string* a;
    const std::string* b;
    double score;
  };
  std::vector<Row> rows;
  rows.reserve(table.entries());
  for (const auto& [key, score] : table.raw()) {
    auto [a, b] = unpack_pair(key);
    rows.push_back({&vocab.text(a), &vocab.text(b), score});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (*x.a != *y.a) return *x.a < *y.a;
    return *x.b < *y.b;
  });
  for (const Row& r : rows) {
    out << *r.a << '\t' << *r.b << '\t' << format_double(r.score) << "\n";
  }
}

void save_model(const PairTable& table, const Vocabulary& vocab,
                const std::string& path) {
  std::ostringstream buf;
  save_model(table, vocab, buf);
  atomic_write_file(path, buf.str());
}

LoadedModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("model file is empty");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const std::string magic = "bagforge-pairs v1 order=";
  if (line.rfind(magic, 0) != 0) {
    throw std::runtime_error("line 1: not a bagforge-pairs v1 model file");
  }
  std::string rest = line.substr(magic.size());
  std::size_t sep = rest.find(" unseen_eps=");
  if (sep == std::string::npos) {
    throw std::runtime_error("line 1: missing unseen_eps field");
  }
  long long order = 0;
  double unseen_eps = 0.0;
  try {
    order = parse_int(rest.substr(0, sep));
    unseen_eps = parse_double(rest.substr(sep + 12));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("line 1: ") + e.what());
  }
  if (order < 2 || !(unseen_eps > 0.0)) {
    throw std::runtime_error("line 1: invalid header values");
  }

  LoadedModel m{Vocabulary{}, PairTable(static_cast<int>(order), unseen_eps)};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos ||
        line.find('\t', t2 + 1) != std::string::npos) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected <a>\\t<b>\\t<score>");
    }
    std::string ta = line.substr(0, t1);
    std::string tb = line.substr(t1 + 1, t2 - t1 - 1);
    double score = 0.0;
    try {
      score = parse_double(line.substr(t2 + 1));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " +
                               e.what());
    }
    if (!(score > 0.0)) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": nonpositive score");
    }
    TokenId a = 0;
    TokenId b = 0;
    try {
      a = m.vocab.intern(ta);
      b = m.vocab.intern(tb);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " +
                               e.what());
    }
    if (m.table.contains(a, b)) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": duplicate pair \"" + ta + "\" \"" + tb +
                               "\"");
    }
    m.table.set(a, b, score);
  }
  return m;
}

LoadedModel load_model(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_model(in);
}

ModelStats model_stats(const PairCounts& counts, const Vocabulary& vocab) {
  return {counts.total_pairs, counts.distinct_pairs(), vocab.size()};
}

ModelStats model_stats(const PairTable& table, const Vocabulary& vocab) {
  return {std::nullopt, table.entries(), vocab.size()};
}

}  // namespace bagforge
