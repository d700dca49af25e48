#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "textcls/metrics.hpp"
#include "textcls/sparse.hpp"
#include "textcls/strategies.hpp"

namespace textcls {

struct EvalOptions {
  bool unlabeled_extension = false;
  // With the extension on, whether the extra class enters the Macro-F1 mean.
  bool macro_includes_unlabeled = true;
  // Recorded in the report: whether validation data was merged into training.
  bool include_validation = true;
};

struct EvalReport {
  std::size_t n_documents = 0;
  std::size_t n_labels = 0;  // evaluated label set, including U when active
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<std::string> labels;
  std::vector<double> per_label_f1;
  std::vector<LabelCounts> per_label_counts;
  std::size_t parameter_count = 0;
  double training_seconds = 0.0;
  double prediction_seconds = 0.0;
  bool unlabeled_extension = false;
  bool include_validation = true;

  // "key<TAB>value" lines, per-label lines last.
  std::string to_tsv() const;
  std::string to_json() const;
};

/// Predict, optionally apply the unlabeled-class extension, count, score.
EvalReport evaluate(const LinearModel& model, const SparseMatrix& X, const LabelSets& truth,
                    const EvalOptions& options, double training_seconds = 0.0);

/// Scores predictions that were already made.
EvalReport score_predictions(const LabelSets& truth, const LabelSets& pred, std::vector<std::string> labels,
                             TaskKind task_kind, const EvalOptions& options);

}  // namespace textcls
