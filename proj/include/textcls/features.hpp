#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "textcls/sparse.hpp"
#include "textcls/tokenizer.hpp"

namespace textcls {

/// Fitted term -> column map with document frequencies and IDF weights.
///
/// Columns are dense and follow sorted term order. idf(t) is the smoothed
/// ln((1 + N) / (1 + df(t))) + 1 with N the number of fitting documents.
struct Vocabulary {
  TokenizerConfig tokenizer;
  std::size_t min_df = 1;
  std::optional<std::size_t> max_features;
  std::size_t n_documents = 0;

  std::vector<std::string> terms;
  std::vector<std::uint32_t> df;
  std::vector<double> idf;

  std::size_t size() const { return terms.size(); }
  std::optional<std::uint32_t> find(const std::string& term) const;

  // Rebuilds the lookup table from `terms`; call after editing terms.
  void reindex();
  // FNV-1a over the tokenizer and filtering settings.
  std::uint64_t config_hash() const;

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Fits on the training texts: tokenize, drop stop words, form n-grams,
/// keep terms with df >= min_df, then keep the max_features terms with the
/// highest corpus-wide frequency (ties: lexicographically smaller first).
/// Throws DataError("empty vocabulary") when nothing survives.
Vocabulary fit_vocabulary(std::span<const std::string> texts, const TokenizerConfig& cfg,
                          std::size_t min_df = 1,
                          std::optional<std::size_t> max_features = std::nullopt);

/// Raw-count tf times idf, L2-normalized per row. Terms outside the
/// vocabulary are ignored and empty rows stay empty. Rows are independent,
/// so `threads` > 1 splits them across workers.
SparseMatrix transform_tfidf(std::span<const std::string> texts, const Vocabulary& vocab,
                             unsigned threads = 1);

void save_vocabulary(const Vocabulary& vocab, std::ostream& out);
Vocabulary load_vocabulary(std::istream& in);

}  // namespace textcls
