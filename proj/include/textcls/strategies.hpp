#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textcls/corpus.hpp"
#include "textcls/linear.hpp"
#include "textcls/metrics.hpp"
#include "textcls/sparse.hpp"

namespace textcls {

enum class Strategy { one_vs_rest, thresholding, cost_sensitive };
enum class TargetMetric { micro_f1, macro_f1 };

std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view s);
std::string to_string(TargetMetric m);
TargetMetric parse_target_metric(std::string_view s);

struct TrainOptions {
  double C = 1.0;
  Loss loss = Loss::squared_hinge;
  SolverOptions solver;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct TuningConfig {
  std::size_t n_folds = 3;
  TargetMetric target = TargetMetric::macro_f1;
  std::vector<double> cost_grid{1, 2, 4, 8, 16, 32};
  std::uint64_t seed = 1;

  void validate() const;
};

/// One weight vector and one decision offset per label.
///
/// Multi-label prediction takes {l : w_l'x + threshold_l > 0}; multi-class
/// prediction takes argmax_l w_l'x and ignores thresholds.
struct LinearModel {
  std::vector<std::string> labels;
  std::size_t n_features = 0;
  TaskKind task_kind = TaskKind::multi_label;
  std::vector<WeightVector> weights;
  std::vector<double> thresholds;
  std::vector<double> positive_weights;

  std::size_t n_labels() const { return labels.size(); }
  std::size_t parameter_count() const { return n_features * labels.size(); }
  void validate() const;
};

struct TrainResult {
  LinearModel model;
  std::vector<ConvergenceReport> convergence;  // one per label, final fit
  std::vector<double> cv_scores;               // per label; empty for one-vs-rest
  std::vector<std::string> notes;              // warnings and tuning decisions
  double seconds = 0.0;
};

/// +1 where `label` is in Y[i], -1 elsewhere (so unlabeled rows are negative).
std::vector<std::int8_t> binary_labels(const LabelSets& Y, std::uint32_t label);

/// Trains one independent binary problem per label, concurrently over
/// labels. Every problem uses opts.solver.seed, so row l equals a direct
/// train_binary call for label l. `positive_weights` may be empty (all 1).
TrainResult train_one_vs_rest(const SparseMatrix& X, const LabelSets& Y, std::vector<std::string> labels,
                              TaskKind task_kind, const TrainOptions& opts,
                              std::span<const double> positive_weights = {});

// Row-major n_rows x n_labels matrix of w_l'x_i.
std::vector<double> decision_matrix(const LinearModel& m, const SparseMatrix& X);

LabelSets threshold_predictions(std::span<const double> scores, std::size_t n_labels,
                                std::span<const double> thresholds);
// Lowest label index wins ties.
std::vector<std::uint32_t> argmax_predictions(std::span<const double> scores, std::size_t n_labels);

LabelSets predict_multilabel(const LinearModel& m, const SparseMatrix& X);
std::vector<std::uint32_t> predict_multiclass(const LinearModel& m, const SparseMatrix& X);
// Dispatches on the model's task kind; multi-class rows are singletons.
LabelSets predict(const LinearModel& m, const SparseMatrix& X);

/// Fold id in [0, k) per row: a seeded shuffle dealt round-robin.
std::vector<std::size_t> make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

/// Held-out decision values: for each fold, one-vs-rest is trained on the
/// other folds and scored on this one. Row-major n x n_labels.
std::vector<double> cross_validated_scores(const SparseMatrix& X, const LabelSets& Y, std::size_t n_labels,
                                           std::span<const std::size_t> folds, std::size_t n_folds,
                                           const TrainOptions& opts);

struct ThresholdChoice {
  double delta = 0.0;
  double f1 = 0.0;
};

/// Best offset for one label from pooled scores. Candidates are the
/// midpoints between consecutive distinct sorted scores plus one sentinel
/// below the minimum and one above the maximum; delta = 0 is kept unless a
/// candidate is strictly better. `others` is added to this label's counts
/// before scoring (zero for per-label F1, the other labels' totals for
/// micro-F1).
ThresholdChoice sweep_threshold(std::span<const double> scores, std::span<const std::int8_t> y,
                                LabelCounts others = {});

struct ThresholdTuning {
  std::vector<double> thresholds;
  std::vector<double> cv_f1;  // per label, at the chosen threshold
  std::vector<std::string> notes;
};

ThresholdTuning tune_thresholds(const SparseMatrix& X, const LabelSets& Y, std::size_t n_labels,
                                const TuningConfig& cfg, const TrainOptions& opts);

struct CostTuning {
  std::vector<double> positive_weights;
  std::vector<double> cv_score;  // per label F1 (macro) or shared micro-F1
  std::vector<std::string> notes;
};

/// Macro target: each label picks the grid value with the best pooled CV
/// F1. Micro target: one grid value shared by all labels, chosen by pooled
/// CV micro-F1. Ties go to the smaller weight.
CostTuning tune_cost_weights(const SparseMatrix& X, const LabelSets& Y, std::size_t n_labels,
                             const TuningConfig& cfg, const TrainOptions& opts);

TrainResult train_model(Strategy strategy, const SparseMatrix& X, const LabelSets& Y,
                        std::vector<std::string> labels, TaskKind task_kind, const TrainOptions& opts,
                        const TuningConfig& tuning);

void save_model(const LinearModel& m, std::ostream& out);
LinearModel load_model(std::istream& in);

}  // namespace textcls
