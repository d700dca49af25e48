#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "textcls/error.hpp"
#include "textcls/evaluation.hpp"
#include "textcls/metrics.hpp"

using namespace textcls;

TEST_CASE("confusion counts on the three-document example") {
  // d1: {A} vs {A}; d2: {A,B} vs {B}; d3: {} vs {A}
  const LabelSets truth{{0}, {0, 1}, {}};
  const LabelSets pred{{0}, {1}, {0}};
  const auto c = confusion_counts(truth, pred, 2);
  CHECK(c.per_label[0] == LabelCounts{1, 1, 1});
  CHECK(c.per_label[1] == LabelCounts{1, 0, 0});
  CHECK(micro_f1(c) == doctest::Approx(4.0 / 6.0));
  CHECK(macro_f1(c) == doctest::Approx(0.75));

  const auto perfect = confusion_counts(truth, truth, 2);
  CHECK(micro_f1(perfect) == 1.0);
  // Label with no occurrences anywhere scores 0 under the zero-division rule.
  CHECK(macro_f1(confusion_counts(truth, truth, 3)) == doctest::Approx(2.0 / 3.0));

  const auto none = confusion_counts(truth, LabelSets(3), 2);
  CHECK(none.per_label[0] == LabelCounts{0, 0, 2});
  CHECK(none.per_label[1] == LabelCounts{0, 0, 1});

  CHECK_THROWS_AS(confusion_counts(truth, pred, 1), DataError);
  CHECK_THROWS_AS(confusion_counts(truth, LabelSets(2), 2), DataError);
}

TEST_CASE("unlabeled extension") {
  auto ext = apply_unlabeled_extension({{}}, {{}}, {"A"});
  CHECK(ext.truth == LabelSets{{1}});
  CHECK(ext.pred == LabelSets{{1}});
  CHECK(confusion_counts(ext.truth, ext.pred, 2).per_label[1] == LabelCounts{1, 0, 0});

  ext = apply_unlabeled_extension({{0}}, {{0}}, {"A"});
  CHECK(ext.truth == LabelSets{{0}});
  CHECK(ext.pred == LabelSets{{0}});

  ext = apply_unlabeled_extension({{}}, {{0}}, {"A"});
  const auto c = confusion_counts(ext.truth, ext.pred, 2);
  CHECK(c.per_label[0] == LabelCounts{0, 1, 0});
  CHECK(c.per_label[1] == LabelCounts{0, 0, 1});
  CHECK(ext.labels.back() == kUnlabeledLabel);

  CHECK_THROWS_AS(apply_unlabeled_extension({{}}, {{}}, {std::string(kUnlabeledLabel)}), ConfigError);
}

TEST_CASE("metric properties on random instances") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> n_docs(1, 10), n_labels(1, 5);
  std::bernoulli_distribution coin(0.35);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = n_docs(rng), L = n_labels(rng);
    LabelSets truth(n), pred(n);
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < L; ++l) {
        if (coin(rng)) truth[i].push_back(static_cast<std::uint32_t>(l));
        if (coin(rng)) pred[i].push_back(static_cast<std::uint32_t>(l));
      }
    }
    const auto c = confusion_counts(truth, pred, static_cast<std::size_t>(L));
    const auto f = per_label_f1(c);
    const double macro = macro_f1(c);
    CHECK(macro >= *std::min_element(f.begin(), f.end()) - 1e-15);
    CHECK(macro <= *std::max_element(f.begin(), f.end()) + 1e-15);

    std::vector<std::string> names;
    for (int l = 0; l < L; ++l) names.push_back("L" + std::to_string(l));
    const auto ext = apply_unlabeled_extension(truth, pred, names);
    const auto ce = confusion_counts(ext.truth, ext.pred, ext.labels.size());
    std::size_t occurrences = 0;
    for (const auto& lc : ce.per_label) occurrences += lc.tp + lc.fn;
    CHECK(occurrences >= static_cast<std::size_t>(n));
  }
}

TEST_CASE("score_predictions honours the extension toggles") {
  const LabelSets truth{{0}, {}, {1}};
  const LabelSets pred{{0}, {}, {}};
  EvalOptions opts;
  auto plain = score_predictions(truth, pred, {"A", "B"}, TaskKind::multi_label, opts);
  CHECK(plain.n_labels == 2);
  CHECK(plain.micro_f1 == doctest::Approx(2.0 / 3.0));

  opts.unlabeled_extension = true;
  auto ext = score_predictions(truth, pred, {"A", "B"}, TaskKind::multi_label, opts);
  CHECK(ext.n_labels == 3);
  // A: 1/0/0, B: 0/0/1, U: 1/1/0
  CHECK(ext.micro_f1 == doctest::Approx(4.0 / 6.0));
  CHECK(ext.macro_f1 == doctest::Approx((1.0 + 0.0 + 2.0 / 3.0) / 3.0));
  opts.macro_includes_unlabeled = false;
  ext = score_predictions(truth, pred, {"A", "B"}, TaskKind::multi_label, opts);
  CHECK(ext.macro_f1 == doctest::Approx(0.5));
  CHECK_THROWS_AS(score_predictions(truth, pred, {"A", "B"}, TaskKind::multi_class, opts), ConfigError);

  const auto tsv = ext.to_tsv();
  CHECK(tsv.find("micro_f1\t") == 0);
  CHECK(tsv.find("f1.<unlabeled>\t") != std::string::npos);
  const auto json = ext.to_json();
  CHECK(json.find("\"per_label\"") != std::string::npos);
}

TEST_CASE("extension is the identity when nothing is unlabeled") {
  const LabelSets truth{{0}, {1}, {0, 1}};
  const LabelSets pred{{0}, {0}, {1}};
  EvalOptions opts;
  const auto plain = score_predictions(truth, pred, {"A", "B"}, TaskKind::multi_label, opts);
  opts.unlabeled_extension = true;
  opts.macro_includes_unlabeled = false;
  const auto ext = score_predictions(truth, pred, {"A", "B"}, TaskKind::multi_label, opts);
  CHECK(ext.micro_f1 == plain.micro_f1);
  CHECK(ext.macro_f1 == plain.macro_f1);
}
