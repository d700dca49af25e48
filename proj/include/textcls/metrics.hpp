#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textcls {

// Label-index sets per document, each sorted and unique.
using LabelSets = std::vector<std::vector<std::uint32_t>>;

// Name of the extra class given to unlabeled documents at evaluation time.
inline constexpr std::string_view kUnlabeledLabel = "<unlabeled>";

struct LabelCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  bool operator==(const LabelCounts&) const = default;
};

struct ConfusionCounts {
  std::vector<LabelCounts> per_label;
};

struct ExtendedLabels {
  LabelSets truth;
  LabelSets pred;
  std::vector<std::string> labels;  // input labels + kUnlabeledLabel
  std::uint32_t unlabeled_index = 0;
};

/// Appends the unlabeled class U: empty truth sets become {U} and empty
/// predictions become {U}; non-empty sets are untouched. Throws ConfigError
/// if a label is already named kUnlabeledLabel.
ExtendedLabels apply_unlabeled_extension(LabelSets truth, LabelSets pred, std::vector<std::string> labels);

/// Throws DataError if the row counts differ or an index is >= n_labels.
ConfusionCounts confusion_counts(const LabelSets& truth, const LabelSets& pred, std::size_t n_labels);

// 2TP / (2TP + FP + FN), and 0 when all three are zero.
double f1_score(const LabelCounts& c);
std::vector<double> per_label_f1(const ConfusionCounts& c);
double micro_f1(const ConfusionCounts& c);
double macro_f1(const ConfusionCounts& c);

}  // namespace textcls
