#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "textcls/error.hpp"
#include "textcls/features.hpp"
#include "textcls/strategies.hpp"

using namespace textcls;

namespace {

struct Fixture {
  SparseMatrix X;
  LabelSets Y;
  std::vector<std::string> labels;
};

Fixture synthetic(std::uint64_t seed, std::size_t n, std::size_t L, bool multi_label) {
  std::mt19937_64 rng(seed);
  const auto docs = testing_support::synthetic_docs(rng, n, L, multi_label);
  std::vector<std::string> texts;
  for (const auto& d : docs) texts.push_back(d.text);
  Fixture f;
  const auto v = fit_vocabulary(texts, {});
  f.X = transform_tfidf(texts, v);
  for (std::size_t l = 0; l < L; ++l) f.labels.push_back("L" + std::to_string(l));
  for (const auto& d : docs) {
    std::vector<std::uint32_t> s;
    for (const auto& name : d.labels) s.push_back(static_cast<std::uint32_t>(std::stoul(name.substr(1))));
    f.Y.push_back(s);
  }
  return f;
}

SparseMatrix dense_rows(const std::vector<std::vector<double>>& rows) {
  SparseMatrix X(rows.empty() ? 0 : rows[0].size());
  for (const auto& r : rows) {
    std::vector<SparseEntry> e;
    for (std::size_t j = 0; j < r.size(); ++j) e.push_back({static_cast<std::uint32_t>(j), r[j]});
    X.push_row(e);
  }
  return X;
}

// Pooled-F1 brute force: evaluate every candidate cut directly.
ThresholdChoice brute_force_threshold(const std::vector<double>& s, const std::vector<std::int8_t>& y) {
  auto f1_at = [&](double delta) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool p = s[i] + delta > 0, t = y[i] > 0;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    const std::size_t d = 2 * tp + fp + fn;
    return d ? 2.0 * tp / d : 0.0;
  };
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts{sorted.front() - 1.0};
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k - 1] < sorted[k]) cuts.push_back((sorted[k - 1] + sorted[k]) / 2.0);
  cuts.push_back(sorted.back() + 1.0);
  ThresholdChoice best{0.0, f1_at(0.0)};
  for (double c : cuts) {
    if (f1_at(-c) > best.f1) best = {-c, f1_at(-c)};
  }
  return best;
}

}  // namespace

TEST_CASE("binary labels put unlabeled rows on the negative side") {
  const LabelSets Y{{0}, {}, {0, 1}, {1}};
  CHECK(binary_labels(Y, 0) == std::vector<std::int8_t>{1, -1, 1, -1});
  CHECK(binary_labels(Y, 1) == std::vector<std::int8_t>{-1, -1, 1, 1});
}

TEST_CASE("one-vs-rest rows equal independent binary solves") {
  const auto f = synthetic(1, 80, 4, true);
  TrainOptions opts;
  opts.threads = 3;
  const auto r = train_one_vs_rest(f.X, f.Y, f.labels, TaskKind::multi_label, opts);
  REQUIRE(r.model.weights.size() == 4);
  for (std::uint32_t l = 0; l < 4; ++l) {
    BinaryProblem p{f.X, binary_labels(f.Y, l), opts.C, 1.0, opts.loss};
    CHECK(train_binary(p, opts.solver).w == r.model.weights[l]);
  }
  CHECK(r.model.parameter_count() == f.X.n_cols() * 4);
  CHECK(r.model.thresholds == std::vector<double>(4, 0.0));
}

TEST_CASE("two disjoint labels on separable 2-D data") {
  const auto X = dense_rows({{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}, {0.1, 0.9}});
  const LabelSets Y{{0}, {0}, {1}, {1}};
  const auto r = train_one_vs_rest(X, Y, {"A", "B"}, TaskKind::multi_class, {});
  for (std::uint32_t l = 0; l < 2; ++l) {
    BinaryProblem p{X, binary_labels(Y, l)};
    CHECK(train_binary(p).w == r.model.weights[l]);
  }
  CHECK(predict_multiclass(r.model, X) == std::vector<std::uint32_t>{0, 0, 1, 1});
}

TEST_CASE("single all-positive label predicts positive on its training points") {
  const auto X = dense_rows({{1.0}, {0.5}, {2.0}});
  const LabelSets Y{{0}, {0}, {0}};
  const auto r = train_one_vs_rest(X, Y, {"A"}, TaskKind::multi_label, {});
  CHECK(predict_multilabel(r.model, X) == LabelSets{{0}, {0}, {0}});
}

TEST_CASE("labels without positives train with a warning") {
  const auto X = dense_rows({{1.0, 0.0}, {0.0, 1.0}});
  const auto r = train_one_vs_rest(X, {{0}, {0}}, {"A", "B"}, TaskKind::multi_label, {});
  REQUIRE(!r.notes.empty());
  CHECK(r.notes[0].find("'B'") != std::string::npos);
  CHECK_THROWS_AS(train_one_vs_rest(X, {{0}, {0}}, {}, TaskKind::multi_label, {}), DataError);
}

TEST_CASE("threshold and argmax prediction rules") {
  const std::vector<double> scores{0.2, -0.1};
  CHECK(threshold_predictions(scores, 2, std::vector<double>{0.0, 0.3}) == LabelSets{{0, 1}});
  CHECK(threshold_predictions(scores, 2, std::vector<double>{0.0, 0.0}) == LabelSets{{0}});
  CHECK(threshold_predictions(scores, 2, std::vector<double>{1e6, 1e6}) == LabelSets{{0, 1}});
  CHECK(argmax_predictions(std::vector<double>{0.1, 0.9, -0.3}, 3) == std::vector<std::uint32_t>{1});
  CHECK(argmax_predictions(std::vector<double>{0.0, 0.0, 0.0}, 3) == std::vector<std::uint32_t>{0});

  LinearModel zero;
  zero.labels = {"A", "B"};
  zero.n_features = 3;
  zero.weights.assign(2, WeightVector(3, 0.0));
  zero.thresholds.assign(2, 0.0);
  zero.positive_weights.assign(2, 1.0);
  const auto X = dense_rows({{1, 2, 3}, {0, 0, 1}});
  CHECK(predict_multilabel(zero, X) == LabelSets(2));
  CHECK_THROWS_AS(predict_multiclass(zero, X), ConfigError);
  CHECK_THROWS_AS(predict_multilabel(zero, dense_rows({{1, 2}})), DataError);

  zero.thresholds[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(zero.validate(), NumericError);
}

TEST_CASE("argmax is invariant to uniform shifts and thresholds are monotone") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t L = 1 + trial % 6, n = 1 + trial % 9;
    std::vector<double> s(n * L);
    for (auto& v : s) v = std::round(u(rng) * 8) / 8;  // force ties
    const double shift = std::round(u(rng) * 8) / 8;
    auto shifted = s;
    for (auto& v : shifted) v += shift;
    CHECK(argmax_predictions(s, L) == argmax_predictions(shifted, L));

    std::vector<double> delta(L);
    for (auto& d : delta) d = u(rng);
    const auto before = threshold_predictions(s, L, delta);
    const std::size_t bump = static_cast<std::size_t>(trial) % L;
    delta[bump] += std::abs(u(rng));
    const auto after = threshold_predictions(s, L, delta);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::binary_search(before[i].begin(), before[i].end(), bump)) {
        CHECK(std::binary_search(after[i].begin(), after[i].end(), bump));
      }
    }
  }
}

TEST_CASE("folds are balanced and seed-determined") {
  const auto a = make_folds(10, 3, 5);
  CHECK(a == make_folds(10, 3, 5));
  std::map<std::size_t, int> sizes;
  for (auto f : a) ++sizes[f];
  CHECK(sizes.size() == 3);
  for (auto& [f, c] : sizes) CHECK((c == 3 || c == 4));
  CHECK_THROWS_AS(make_folds(2, 3, 1), ConfigError);
  CHECK_THROWS_AS(make_folds(5, 1, 1), ConfigError);
}

TEST_CASE("threshold sweep matches exhaustive enumeration") {
  // Six points, one rare positive sitting below zero: needs delta > 0.
  const std::vector<double> s{-0.9, -0.7, -0.2, -0.5, -0.8, -0.95};
  const std::vector<std::int8_t> y{-1, -1, 1, -1, -1, -1};
  const auto got = sweep_threshold(s, y);
  const auto ref = brute_force_threshold(s, y);
  CHECK(got.delta == doctest::Approx(ref.delta).epsilon(1e-12));
  CHECK(got.f1 == ref.f1);
  CHECK(got.delta > 0.0);
  CHECK(got.f1 == 1.0);
  CHECK(got.delta == doctest::Approx(0.35));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 15;
    std::vector<double> sc(n);
    for (auto& v : sc) v = std::round(u(rng) * 10) / 10;
    const auto yy = testing_support::random_signs(rng, n);
    const auto a = sweep_threshold(sc, yy);
    const auto b = brute_force_threshold(sc, yy);
    CHECK(a.f1 == b.f1);
    CHECK(a.delta == doctest::Approx(b.delta).epsilon(1e-12));
  }
}

TEST_CASE("tune_thresholds on a toy problem equals the brute-force sweep over CV scores") {
  const auto X = dense_rows({{1.0, 0.1}, {0.9, 0.2}, {0.2, 0.3}, {0.8, 0.0}, {0.7, 0.1}, {0.95, 0.05}});
  const LabelSets Y{{}, {}, {0}, {}, {}, {}};
  TuningConfig cfg;
  cfg.n_folds = 2;
  cfg.seed = 3;
  TrainOptions opts;
  const auto tuned = tune_thresholds(X, Y, 1, cfg, opts);

  // Independent route: rebuild the held-out scores fold by fold.
  const auto folds = make_folds(6, 2, 3);
  std::vector<double> cv(6);
  for (std::size_t f = 0; f < 2; ++f) {
    std::vector<std::size_t> tr, held;
    for (std::size_t i = 0; i < 6; ++i) (folds[i] == f ? held : tr).push_back(i);
    const auto Xt = X.select_rows(tr);
    std::vector<std::int8_t> yt;
    for (auto i : tr) yt.push_back(Y[i].empty() ? -1 : 1);
    BinaryProblem p{Xt, yt};
    const auto w = train_binary(p).w;
    for (auto i : held) cv[i] = dot(X.row(i), w);
  }
  const auto ref = brute_force_threshold(cv, binary_labels(Y, 0));
  CHECK(tuned.thresholds[0] == doctest::Approx(ref.delta).epsilon(1e-12));
  CHECK(tuned.cv_f1[0] == ref.f1);
}

TEST_CASE("cost weight choice equals exhaustive grid and fold enumeration") {
  // 1-D: one positive among nine negatives.
  const auto X = dense_rows({{1.0}, {0.9}, {0.8}, {1.1}, {0.7}, {1.2}, {0.95}, {1.05}, {0.85}, {1.0}});
  LabelSets Y(10);
  Y[4] = {0};
  for (auto target : {TargetMetric::macro_f1, TargetMetric::micro_f1}) {
    TuningConfig cfg;
    cfg.n_folds = 3;
    cfg.seed = 1;
    cfg.target = target;
    cfg.cost_grid = {1, 2, 4, 8, 16, 32};
    TrainOptions opts;
    const auto tuned = tune_cost_weights(X, Y, 1, cfg, opts);

    const auto folds = make_folds(10, 3, 1);
    double best_f1 = -1.0, best_w = 0.0;
    for (double w : cfg.cost_grid) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (std::size_t f = 0; f < 3; ++f) {
        std::vector<std::size_t> tr, held;
        for (std::size_t i = 0; i < 10; ++i) (folds[i] == f ? held : tr).push_back(i);
        const auto Xt = X.select_rows(tr);
        std::vector<std::int8_t> yt;
        for (auto i : tr) yt.push_back(Y[i].empty() ? -1 : 1);
        BinaryProblem p{Xt, yt, 1.0, w};
        const auto model = train_binary(p).w;
        for (auto i : held) {
          const bool pred = dot(X.row(i), model) > 0, truth = !Y[i].empty();
          tp += pred && truth;
          fp += pred && !truth;
          fn += !pred && truth;
        }
      }
      const std::size_t d = 2 * tp + fp + fn;
      const double f1 = d ? 2.0 * tp / d : 0.0;
      if (f1 > best_f1) {
        best_f1 = f1;
        best_w = w;
      }
    }
    CHECK(tuned.positive_weights[0] == best_w);
    CHECK(tuned.cv_score[0] == best_f1);
  }
}

TEST_CASE("strategy identities") {
  const auto f = synthetic(2, 90, 4, true);
  TrainOptions opts;
  TuningConfig cfg;
  const auto ovr = train_model(Strategy::one_vs_rest, f.X, f.Y, f.labels, TaskKind::multi_label, opts, cfg);

  auto thr = train_model(Strategy::thresholding, f.X, f.Y, f.labels, TaskKind::multi_label, opts, cfg);
  CHECK(thr.model.weights == ovr.model.weights);
  thr.model.thresholds.assign(4, 0.0);
  CHECK(predict(thr.model, f.X) == predict(ovr.model, f.X));

  cfg.cost_grid = {1};
  const auto cs = train_model(Strategy::cost_sensitive, f.X, f.Y, f.labels, TaskKind::multi_label, opts, cfg);
  CHECK(cs.model.weights == ovr.model.weights);
  CHECK(predict(cs.model, f.X) == predict(ovr.model, f.X));
}

TEST_CASE("tuning is deterministic for a fixed seed and thread count independent") {
  const auto f = synthetic(3, 70, 3, true);
  TuningConfig cfg;
  cfg.seed = 99;
  TrainOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = tune_thresholds(f.X, f.Y, 3, cfg, one);
  const auto b = tune_thresholds(f.X, f.Y, 3, cfg, many);
  CHECK(a.thresholds == b.thresholds);
  const auto c = tune_cost_weights(f.X, f.Y, 3, cfg, one);
  const auto d = tune_cost_weights(f.X, f.Y, 3, cfg, many);
  CHECK(c.positive_weights == d.positive_weights);

  cfg.target = TargetMetric::micro_f1;
  const auto m1 = tune_thresholds(f.X, f.Y, 3, cfg, one);
  const auto m2 = tune_thresholds(f.X, f.Y, 3, cfg, many);
  CHECK(m1.thresholds == m2.thresholds);
  const auto shared = tune_cost_weights(f.X, f.Y, 3, cfg, one);
  CHECK(std::adjacent_find(shared.positive_weights.begin(), shared.positive_weights.end(),
                           std::not_equal_to<>()) == shared.positive_weights.end());

  TuningConfig bad;
  bad.cost_grid = {4, 2};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.cost_grid = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.cost_grid = {1};
  bad.n_folds = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("model file round trip is exact") {
  const auto f = synthetic(4, 60, 3, true);
  TuningConfig cfg;
  auto r = train_model(Strategy::thresholding, f.X, f.Y, f.labels, TaskKind::multi_label, {}, cfg);
  r.model.positive_weights[1] = 4.0;
  std::stringstream s;
  save_model(r.model, s);
  const auto back = load_model(s);
  CHECK(back.labels == r.model.labels);
  CHECK(back.weights == r.model.weights);
  CHECK(back.thresholds == r.model.thresholds);
  CHECK(back.positive_weights == r.model.positive_weights);
  CHECK(back.task_kind == r.model.task_kind);
  CHECK(predict(back, f.X) == predict(r.model, f.X));
  CHECK(decision_matrix(back, f.X) == decision_matrix(r.model, f.X));

  std::stringstream bad("textcls-model\t2\n");
  CHECK_THROWS_AS(load_model(bad), DataError);
  std::string text = s.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_model(truncated), DataError);
}
