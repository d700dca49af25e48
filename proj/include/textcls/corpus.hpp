#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textcls/sparse.hpp"
#include "textcls/tokenizer.hpp"

namespace textcls {

enum class TaskKind { multi_class, multi_label };
enum class CorpusFormat { tsv, svmlight };

std::string to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view s);
std::string to_string(CorpusFormat format);
CorpusFormat parse_corpus_format(std::string_view s);

struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> labels;  // sorted, unique; empty = unlabeled
  // Pre-computed features for svmlight input (0-based columns).
  std::vector<SparseEntry> features;

  bool operator==(const Document& o) const;
};

struct Dataset {
  std::vector<Document> train;
  std::vector<Document> validation;
  std::vector<Document> test;
  TaskKind task_kind = TaskKind::multi_label;
  CorpusFormat format = CorpusFormat::tsv;

  /// Sorted union of the training labels.
  std::vector<std::string> label_universe() const;
};

/// Reads one split file. Malformed lines raise DataError naming the line.
///
/// tsv:      "label1 label2<TAB>text"; an empty label field is an unlabeled
///           document. Only the first TAB separates; the id is the 1-based
///           line number.
/// svmlight: "label1,label2 idx:val idx:val ..." with 1-based indices in
///           increasing order; the label field may be empty.
std::vector<Document> load_split(const std::filesystem::path& path, CorpusFormat format);

/// Loads a dataset.
///
/// A directory must contain train.<ext> and may contain valid.<ext> (or
/// validation.<ext> / dev.<ext>) and test.<ext>, where ext is "tsv" or
/// "svm". A plain file is loaded as the training split. Labels seen in
/// validation or test but never in train are rejected. The task kind is
/// inferred (multi-class iff every train document has exactly one label)
/// unless given.
Dataset load_corpus(const std::filesystem::path& path, CorpusFormat format,
                    std::optional<TaskKind> task_kind = std::nullopt);

void write_split(std::span<const Document> docs, const std::filesystem::path& path,
                 CorpusFormat format);

/// Train becomes train followed by validation; validation is emptied.
Dataset merge_train_validation(Dataset d);

struct CorpusStats {
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  std::size_t n_test = 0;
  std::size_t n_labels = 0;
  double mean_words = 0.0;
  std::size_t max_words = 0;
  std::size_t budget = 0;
  double fraction_over_budget = 0.0;  // token count > budget
  std::size_t n_unlabeled = 0;
};

/// Length audit over all splits. Word counts split on ASCII whitespace;
/// the over-budget fraction uses tokenize() with `tokenizer`.
CorpusStats corpus_stats(const Dataset& d, const TokenizerConfig& tokenizer, std::size_t budget);

/// Cuts a token stream into consecutive chunks of at most `max_tokens`,
/// keeping at most `max_segments` chunks; the rest is dropped.
std::vector<std::vector<std::string>> segment_tokens(std::span<const std::string> tokens,
                                                     std::size_t max_tokens,
                                                     std::size_t max_segments);

std::vector<std::vector<std::string>> segment_document(const Document& doc,
                                                       std::size_t max_tokens,
                                                       std::size_t max_segments,
                                                       const TokenizerConfig& tokenizer = {});

}  // namespace textcls
