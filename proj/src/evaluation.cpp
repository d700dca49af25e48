#include "textcls/evaluation.hpp"

#include <charconv>
#include <chrono>
#include <nlohmann/json.hpp>

#include "textcls/error.hpp"

namespace textcls {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

EvalReport score_predictions(const LabelSets& truth, const LabelSets& pred, std::vector<std::string> labels,
                             TaskKind task_kind, const EvalOptions& options) {
  EvalReport rep;
  rep.n_documents = truth.size();
  rep.unlabeled_extension = options.unlabeled_extension;
  rep.include_validation = options.include_validation;

  ConfusionCounts counts;
  if (options.unlabeled_extension) {
    if (task_kind != TaskKind::multi_label) {
      throw ConfigError("the unlabeled-class extension applies to multi-label tasks only");
    }
    auto ext = apply_unlabeled_extension(truth, pred, std::move(labels));
    counts = confusion_counts(ext.truth, ext.pred, ext.labels.size());
    rep.labels = std::move(ext.labels);
  } else {
    counts = confusion_counts(truth, pred, labels.size());
    rep.labels = std::move(labels);
  }
  rep.micro_f1 = micro_f1(counts);
  rep.per_label_f1 = per_label_f1(counts);
  rep.per_label_counts = counts.per_label;
  if (options.unlabeled_extension && !options.macro_includes_unlabeled) {
    ConfusionCounts without = counts;
    without.per_label.pop_back();
    rep.macro_f1 = macro_f1(without);
  } else {
    rep.macro_f1 = macro_f1(counts);
  }
  rep.n_labels = rep.labels.size();
  return rep;
}

EvalReport evaluate(const LinearModel& model, const SparseMatrix& X, const LabelSets& truth,
                    const EvalOptions& options, double training_seconds) {
  if (truth.size() != X.n_rows()) throw DataError("truth label sets and feature rows differ in count");
  const auto start = std::chrono::steady_clock::now();
  const LabelSets pred = predict(model, X);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EvalReport rep = score_predictions(truth, pred, model.labels, model.task_kind, options);
  rep.parameter_count = model.parameter_count();
  rep.training_seconds = training_seconds;
  rep.prediction_seconds = seconds;
  return rep;
}

std::string EvalReport::to_tsv() const {
  std::string s;
  auto kv = [&](const std::string& k, const std::string& v) { s += k + '\t' + v + '\n'; };
  kv("micro_f1", fmt(micro_f1));
  kv("macro_f1", fmt(macro_f1));
  kv("n_documents", std::to_string(n_documents));
  kv("n_labels", std::to_string(n_labels));
  kv("parameter_count", std::to_string(parameter_count));
  kv("training_seconds", fmt(training_seconds));
  kv("prediction_seconds", fmt(prediction_seconds));
  kv("unlabeled_extension", unlabeled_extension ? "true" : "false");
  kv("include_validation", include_validation ? "true" : "false");
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const auto& c = per_label_counts[l];
    kv("f1." + labels[l], fmt(per_label_f1[l]) + '\t' + std::to_string(c.tp) + '\t' + std::to_string(c.fp) + '\t' +
                             std::to_string(c.fn));
  }
  return s;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["micro_f1"] = micro_f1;
  j["macro_f1"] = macro_f1;
  j["n_documents"] = n_documents;
  j["n_labels"] = n_labels;
  j["parameter_count"] = parameter_count;
  j["training_seconds"] = training_seconds;
  j["prediction_seconds"] = prediction_seconds;
  j["unlabeled_extension"] = unlabeled_extension;
  j["include_validation"] = include_validation;
  auto& per = j["per_label"] = nlohmann::json::array();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const auto& c = per_label_counts[l];
    per.push_back({{"label", labels[l]}, {"f1", per_label_f1[l]}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}});
  }
  return j.dump(2) + "\n";
}

}  // namespace textcls
