#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace textcls {

/// Text analysis settings shared by the featurizer and the corpus audit.
///
/// Tokens are runs of two or more word characters. Stop words are removed
/// from the unigram stream before n-grams are formed; n-gram terms join
/// their tokens with a single space.
struct TokenizerConfig {
  bool lowercase = true;
  std::vector<std::string> stop_words;  // sorted, unique; empty = none
  std::size_t ngram_min = 1;
  std::size_t ngram_max = 1;

  void validate() const;
  // Stable textual form used for hashing and persistence.
  std::string canonical() const;

  bool operator==(const TokenizerConfig&) const = default;
};

// scikit-learn's built-in English stop word list (318 words), sorted.
const std::vector<std::string>& english_stop_words();

/// Word tokens of `text` (lowercased when configured), stop words kept.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg);

/// Vocabulary terms of `text`: tokenize, drop stop words, form n-grams.
std::vector<std::string> analyze(std::string_view text, const TokenizerConfig& cfg);

/// Splits on ASCII whitespace. Used for word-level length statistics.
std::vector<std::string_view> split_words(std::string_view text);

bool is_valid_utf8(std::string_view text);

}  // namespace textcls
