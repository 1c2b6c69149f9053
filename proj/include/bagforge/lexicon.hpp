#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bagforge {

using TokenId = std::uint32_t;

// Token id 0 is permanently bound to the sentence boundary marker "*",
// which is prepended and appended to every sentence when pairs are formed.
inline constexpr TokenId kBoundary = 0;
inline constexpr const char* kBoundaryText = "*";

/// Interned token texts with dense 0-based ids; id 0 is always "*".
class Vocabulary {
 public:
  Vocabulary();

  // Returns the existing id for known text, otherwise appends a new one.
  // "*" always resolves to the boundary id. Rejects empty text and text
  // containing whitespace.
  TokenId intern(const std::string& text);

  std::optional<TokenId> lookup(const std::string& text) const;
  const std::string& text(TokenId id) const;
  std::size_t size() const { return texts_.size(); }

 private:
  std::vector<std::string> texts_;
  std::unordered_map<std::string, TokenId> index_;
};

/// An ordered word sequence; boundary markers are excluded.
struct Sentence {
  std::vector<TokenId> words;

  std::size_t length() const { return words.size(); }
  bool operator==(const Sentence&) const = default;
};

/// A sentence's words with order discarded: sorted (token, multiplicity)
/// items. The search input.
class Bag {
 public:
  Bag() = default;
  static Bag from_tokens(const std::vector<TokenId>& tokens);

  std::size_t total() const { return total_; }
  std::size_t distinct() const { return items_.size(); }
  const std::vector<std::pair<TokenId, std::uint32_t>>& items() const {
    return items_;
  }
  bool operator==(const Bag&) const = default;

 private:
  std::vector<std::pair<TokenId, std::uint32_t>> items_;
  std::size_t total_ = 0;
};

// One sentence per line, tokens separated by runs of spaces/tabs; lines of
// only whitespace are skipped. A line containing the reserved token "*" is
// rejected with its line number.
std::vector<Sentence> tokenize_corpus(std::istream& in, Vocabulary& vocab);
std::vector<Sentence> tokenize_corpus(const std::vector<std::string>& lines,
                                      Vocabulary& vocab);

Bag bag_of(const Sentence& s);

// <*, w1, ..., wn, *>
std::vector<TokenId> with_boundaries(const std::vector<TokenId>& interior);
std::vector<TokenId> with_boundaries(const Sentence& s);

}  // namespace bagforge
