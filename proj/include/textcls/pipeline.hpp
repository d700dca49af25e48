#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textcls/corpus.hpp"
#include "textcls/evaluation.hpp"
#include "textcls/features.hpp"
#include "textcls/strategies.hpp"

namespace textcls {

struct FeaturizerConfig {
  TokenizerConfig tokenizer;
  std::size_t min_df = 1;
  std::optional<std::size_t> max_features;
};

/// Everything a training run needs. One seed drives fold assignment and
/// solver coordinate order.
struct RunConfig {
  std::filesystem::path data;
  CorpusFormat format = CorpusFormat::tsv;
  std::optional<TaskKind> task_kind;
  Strategy strategy = Strategy::one_vs_rest;
  FeaturizerConfig featurizer;
  TrainOptions train;
  TuningConfig tuning;
  bool include_validation = true;
  std::uint64_t seed = 1;
  std::filesystem::path model_dir;

  // Throws ConfigError; called before any data is touched.
  void validate() const;
};

/// A trained model plus what is needed to featurize new text.
struct ModelBundle {
  LinearModel model;
  std::optional<Vocabulary> vocab;  // absent for svmlight input
  double training_seconds = 0.0;

  static constexpr const char* kModelFile = "model.txt";
  static constexpr const char* kVocabFile = "vocab.txt";
  static constexpr const char* kReportFile = "train_report.tsv";
  static constexpr const char* kTimingFile = "timing.tsv";

  void save(const std::filesystem::path& dir) const;
  static ModelBundle load(const std::filesystem::path& dir);
};

/// Maps label names to model indices; unknown names raise DataError.
LabelSets encode_labels(std::span<const Document> docs, std::span<const std::string> labels);

/// Builds the feature matrix for `docs` with `n_features` columns. tsv
/// documents go through the vocabulary; svmlight documents use their own
/// features and any column >= n_features is a dimension mismatch.
SparseMatrix featurize(std::span<const Document> docs, const std::optional<Vocabulary>& vocab,
                       std::size_t n_features, unsigned threads);

struct TrainSummary {
  TrainResult result;
  std::size_t n_train = 0;
  double featurize_seconds = 0.0;
  std::string report;  // contents of train_report.tsv
};

/// Loads data, merges validation into train when configured, fits the
/// vocabulary on the training split, trains per strategy, and writes the
/// model directory when cfg.model_dir is set.
TrainSummary cmd_train(const RunConfig& cfg, std::ostream& log);

/// Writes "id<TAB>label1 label2" per input document.
void cmd_predict(const std::filesystem::path& model_dir, const std::filesystem::path& input,
                 const std::filesystem::path& output, CorpusFormat format, unsigned threads = 0);

/// `test` is a split file or a dataset directory (its test split is used).
EvalReport cmd_eval(const std::filesystem::path& model_dir, const std::filesystem::path& test, CorpusFormat format,
                    const EvalOptions& options, unsigned threads = 0);

CorpusStats cmd_stats(const std::filesystem::path& data, CorpusFormat format, std::size_t budget,
                      const TokenizerConfig& tokenizer = {});

std::string format_stats(const CorpusStats& s);

}  // namespace textcls
