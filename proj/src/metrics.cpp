#include "textcls/metrics.hpp"

#include <algorithm>

#include "textcls/error.hpp"

namespace textcls {

ExtendedLabels apply_unlabeled_extension(LabelSets truth, LabelSets pred, std::vector<std::string> labels) {
  if (std::find(labels.begin(), labels.end(), kUnlabeledLabel) != labels.end()) {
    throw ConfigError("label name '" + std::string(kUnlabeledLabel) + "' is reserved for unlabeled documents");
  }
  if (truth.size() != pred.size()) throw DataError("truth and prediction row counts differ");
  ExtendedLabels out;
  out.unlabeled_index = static_cast<std::uint32_t>(labels.size());
  labels.emplace_back(kUnlabeledLabel);
  out.labels = std::move(labels);
  for (auto& t : truth) {
    if (t.empty()) t.push_back(out.unlabeled_index);
  }
  for (auto& p : pred) {
    if (p.empty()) p.push_back(out.unlabeled_index);
  }
  out.truth = std::move(truth);
  out.pred = std::move(pred);
  return out;
}

ConfusionCounts confusion_counts(const LabelSets& truth, const LabelSets& pred, std::size_t n_labels) {
  if (truth.size() != pred.size()) throw DataError("truth and prediction row counts differ");
  ConfusionCounts c;
  c.per_label.resize(n_labels);
  auto check = [&](std::uint32_t l) {
    if (l >= n_labels) throw DataError("label index " + std::to_string(l) + " outside the label set");
  };
  for (std::size_t r = 0; r < truth.size(); ++r) {
    const auto& t = truth[r];
    const auto& p = pred[r];
    // Both sets are sorted: a merge walk classifies every label once.
    std::size_t i = 0, j = 0;
    while (i < t.size() || j < p.size()) {
      if (j == p.size() || (i < t.size() && t[i] < p[j])) {
        check(t[i]);
        ++c.per_label[t[i++]].fn;
      } else if (i == t.size() || p[j] < t[i]) {
        check(p[j]);
        ++c.per_label[p[j++]].fp;
      } else {
        check(t[i]);
        ++c.per_label[t[i]].tp;
        ++i;
        ++j;
      }
    }
  }
  return c;
}

double f1_score(const LabelCounts& c) {
  const double denom = 2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fp) + static_cast<double>(c.fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / denom;
}

std::vector<double> per_label_f1(const ConfusionCounts& c) {
  std::vector<double> out;
  out.reserve(c.per_label.size());
  for (const auto& l : c.per_label) out.push_back(f1_score(l));
  return out;
}

double micro_f1(const ConfusionCounts& c) {
  LabelCounts total;
  for (const auto& l : c.per_label) {
    total.tp += l.tp;
    total.fp += l.fp;
    total.fn += l.fn;
  }
  return f1_score(total);
}

double macro_f1(const ConfusionCounts& c) {
  if (c.per_label.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& l : c.per_label) sum += f1_score(l);
  return sum / static_cast<double>(c.per_label.size());
}

}  // namespace textcls
