#include "bagforge/lexicon.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bagforge/text_io.hpp"

namespace bagforge {

namespace {

bool has_whitespace(const std::string& text) {
  return text.find_first_of(" \t\r\n\v\f") != std::string::npos;
}

}  // namespace

Vocabulary::Vocabulary() {
  texts_.emplace_back(kBoundaryText);
  index_.emplace(kBoundaryText, kBoundary);
}

TokenId Vocabulary::intern(const std::string& text) {
  if (text.empty()) {
    throw std::invalid_argument("cannot intern an empty token");
  }
  if (has_whitespace(text)) {
    throw std::invalid_argument("token contains whitespace: \"" + text + "\"");
  }
  auto it = index_.find(text);
  if (it != index_.end()) {
    return it->second;
  }
  TokenId id = static_cast<TokenId>(texts_.size());
  texts_.push_back(text);
  index_.emplace(text, id);
  return id;
}

std::optional<TokenId> Vocabulary::lookup(const std::string& text) const {
  auto it = index_.find(text);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

const std::string& Vocabulary::text(TokenId id) const {
  if (id >= texts_.size()) {
    throw std::out_of_range("unknown token id " + std::to_string(id));
  }
  return texts_[id];
}

std::vector<Sentence> tokenize_corpus(std::istream& in, Vocabulary& vocab) {
  std::vector<Sentence> sentences;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::vector<std::string> tokens = split_whitespace(line);
    if (tokens.empty()) {
      continue;
    }
    Sentence s;
    s.words.reserve(tokens.size());
    for (const std::string& tok : tokens) {
      if (tok == kBoundaryText) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": reserved token \"*\" in corpus");
      }
      s.words.push_back(vocab.intern(tok));
    }
    sentences.push_back(std::move(s));
  }
  return sentences;
}

std::vector<Sentence> tokenize_corpus(const std::vector<std::string>& lines,
                                      Vocabulary& vocab) {
  std::string joined;
  for (const std::string& l : lines) {
    joined += l;
    joined += '\n';
  }
  std::istringstream in(joined);
  return tokenize_corpus(in, vocab);
}

Bag Bag::from_tokens(const std::vector<TokenId>& tokens) {
  std::map<TokenId, std::uint32_t> counts;
  for (TokenId t : tokens) {
    if (t == kBoundary) {
      throw std::invalid_argument("boundary marker cannot appear in a bag");
    }
    ++counts[t];
  }
  Bag b;
  b.items_.assign(counts.begin(), counts.end());
  b.total_ = tokens.size();
  return b;
}

Bag bag_of(const Sentence& s) { return Bag::from_tokens(s.words); }

std::vector<TokenId> with_boundaries(const std::vector<TokenId>& interior) {
  std::vector<TokenId> seq;
  seq.reserve(interior.size() + 2);
  seq.push_back(kBoundary);
  seq.insert(seq.end(), interior.begin(), interior.end());
  seq.push_back(kBoundary);
  return seq;
}

std::vector<TokenId> with_boundaries(const Sentence& s) {
  return with_boundaries(s.words);
}

}  // namespace bagforge
