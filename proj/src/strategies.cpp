#include "textcls/strategies.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "parallel.hpp"
#include "textcls/error.hpp"

namespace textcls {

namespace {

constexpr const char* kModelMagic = "textcls-model";
constexpr int kModelVersion = 1;

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void check_label_sets(const SparseMatrix& X, const LabelSets& Y, std::size_t n_labels) {
  if (Y.size() != X.n_rows()) throw DataError("label sets and feature rows differ in count");
  if (n_labels == 0) throw DataError("label universe is empty");
  for (const auto& s : Y) {
    for (auto l : s) {
      if (l >= n_labels) throw DataError("label index outside the label universe");
    }
  }
}

struct FoldSplit {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> held_rows;
};

FoldSplit split_fold(std::span<const std::size_t> folds, std::size_t fold) {
  FoldSplit s;
  for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == fold ? s.held_rows : s.train_rows).push_back(i);
  return s;
}

LabelSets select(const LabelSets& Y, std::span<const std::size_t> rows) {
  LabelSets out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(Y[r]);
  return out;
}

LabelCounts sign_counts(std::span<const double> scores, std::span<const std::int8_t> y) {
  LabelCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] > 0.0;
    const bool truth = y[i] > 0;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
  }
  return c;
}

LabelCounts add(LabelCounts a, const LabelCounts& b) {
  a.tp += b.tp;
  a.fp += b.fp;
  a.fn += b.fn;
  return a;
}

LabelCounts threshold_counts(std::span<const double> scores, std::span<const std::int8_t> y, double delta) {
  LabelCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] + delta > 0.0;
    const bool truth = y[i] > 0;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
  }
  return c;
}

std::vector<double> column(std::span<const double> scores, std::size_t n_labels, std::size_t l) {
  std::vector<double> out(scores.size() / n_labels);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scores[i * n_labels + l];
  return out;
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::one_vs_rest: return "one_vs_rest";
    case Strategy::thresholding: return "thresholding";
    case Strategy::cost_sensitive: return "cost_sensitive";
  }
  return "?";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "one_vs_rest" || s == "one-vs-rest" || s == "ovr") return Strategy::one_vs_rest;
  if (s == "thresholding") return Strategy::thresholding;
  if (s == "cost_sensitive" || s == "cost-sensitive") return Strategy::cost_sensitive;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

std::string to_string(TargetMetric m) { return m == TargetMetric::micro_f1 ? "micro_f1" : "macro_f1"; }

TargetMetric parse_target_metric(std::string_view s) {
  if (s == "micro_f1" || s == "micro-f1") return TargetMetric::micro_f1;
  if (s == "macro_f1" || s == "macro-f1") return TargetMetric::macro_f1;
  throw ConfigError("unknown target metric '" + std::string(s) + "'");
}

void TuningConfig::validate() const {
  if (n_folds < 2) throw ConfigError("n_folds must be >= 2");
  if (cost_grid.empty()) throw ConfigError("cost_grid must not be empty");
  if (!std::is_sorted(cost_grid.begin(), cost_grid.end())) throw ConfigError("cost_grid must be sorted ascending");
  for (double c : cost_grid) {
    if (!(c >= 1.0) || !std::isfinite(c)) throw ConfigError("cost_grid values must be finite and >= 1");
  }
}

void LinearModel::validate() const {
  const std::size_t L = labels.size();
  if (weights.size() != L || thresholds.size() != L || positive_weights.size() != L) {
    throw DataError("model has inconsistent per-label array sizes");
  }
  for (const auto& w : weights) {
    if (w.size() != n_features) throw DataError("model weight row has the wrong length");
    for (double v : w) {
      if (!std::isfinite(v)) throw NumericError("model weight is not finite");
    }
  }
  for (double t : thresholds) {
    if (!std::isfinite(t)) throw NumericError("model threshold must be finite");
  }
}

std::vector<std::int8_t> binary_labels(const LabelSets& Y, std::uint32_t label) {
  std::vector<std::int8_t> y(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) {
    y[i] = std::binary_search(Y[i].begin(), Y[i].end(), label) ? 1 : -1;
  }
  return y;
}

TrainResult train_one_vs_rest(const SparseMatrix& X, const LabelSets& Y, std::vector<std::string> labels,
                              TaskKind task_kind, const TrainOptions& opts,
                              std::span<const double> positive_weights) {
  const std::size_t L = labels.size();
  check_label_sets(X, Y, L);
  if (!positive_weights.empty() && positive_weights.size() != L) {
    throw ConfigError("positive_weights must have one entry per label");
  }
  const auto start = std::chrono::steady_clock::now();

  TrainResult r;
  r.model.labels = std::move(labels);
  r.model.n_features = X.n_cols();
  r.model.task_kind = task_kind;
  r.model.weights.resize(L);
  r.model.thresholds.assign(L, 0.0);
  r.model.positive_weights.assign(L, 1.0);
  if (!positive_weights.empty()) r.model.positive_weights.assign(positive_weights.begin(), positive_weights.end());
  r.convergence.resize(L);

  std::vector<std::size_t> n_positive(L, 0);
  detail::parallel_for(L, opts.threads, [&](std::size_t l) {
    BinaryProblem p{X, binary_labels(Y, static_cast<std::uint32_t>(l)), opts.C, r.model.positive_weights[l], opts.loss};
    n_positive[l] = static_cast<std::size_t>(std::count(p.y.begin(), p.y.end(), std::int8_t{1}));
    auto sol = train_binary(p, opts.solver);
    r.model.weights[l] = std::move(sol.w);
    r.convergence[l] = std::move(sol.report);
  });

  for (std::size_t l = 0; l < L; ++l) {
    if (n_positive[l] == 0) r.notes.push_back("warning: label '" + r.model.labels[l] + "' has no positive training rows");
    if (!r.convergence[l].converged) {
      r.notes.push_back("warning: label '" + r.model.labels[l] + "' stopped at max_iter with relative gap " +
                        format_double(r.convergence[l].relative_gap));
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<double> decision_matrix(const LinearModel& m, const SparseMatrix& X) {
  if (X.n_cols() != m.n_features) {
    throw DataError("dimension mismatch: model expects " + std::to_string(m.n_features) + " features, input has " +
                    std::to_string(X.n_cols()));
  }
  const std::size_t L = m.n_labels();
  std::vector<double> scores(X.n_rows() * L);
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    const auto x = X.row(i);
    for (std::size_t l = 0; l < L; ++l) scores[i * L + l] = dot(x, m.weights[l]);
  }
  return scores;
}

LabelSets threshold_predictions(std::span<const double> scores, std::size_t n_labels,
                                std::span<const double> thresholds) {
  if (thresholds.size() != n_labels) throw DataError("one threshold per label required");
  const std::size_t n = n_labels == 0 ? 0 : scores.size() / n_labels;
  LabelSets out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (scores[i * n_labels + l] + thresholds[l] > 0.0) out[i].push_back(static_cast<std::uint32_t>(l));
    }
  }
  return out;
}

std::vector<std::uint32_t> argmax_predictions(std::span<const double> scores, std::size_t n_labels) {
  if (n_labels == 0) throw DataError("argmax over an empty label set");
  const std::size_t n = scores.size() / n_labels;
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = scores.subspan(i * n_labels, n_labels);
    out[i] = static_cast<std::uint32_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

LabelSets predict_multilabel(const LinearModel& m, const SparseMatrix& X) {
  return threshold_predictions(decision_matrix(m, X), m.n_labels(), m.thresholds);
}

std::vector<std::uint32_t> predict_multiclass(const LinearModel& m, const SparseMatrix& X) {
  if (m.task_kind != TaskKind::multi_class) throw ConfigError("argmax prediction requires a multi-class model");
  return argmax_predictions(decision_matrix(m, X), m.n_labels());
}

LabelSets predict(const LinearModel& m, const SparseMatrix& X) {
  if (m.task_kind == TaskKind::multi_label) return predict_multilabel(m, X);
  LabelSets out;
  for (auto l : predict_multiclass(m, X)) out.push_back({l});
  return out;
}

std::vector<std::size_t> make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("n_folds must be >= 2");
  if (k > n) throw ConfigError("n_folds (" + std::to_string(k) + ") exceeds the number of documents (" +
                               std::to_string(n) + ")");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> folds(n);
  for (std::size_t j = 0; j < n; ++j) folds[perm[j]] = j % k;
  return folds;
}

std::vector<double> cross_validated_scores(const SparseMatrix& X, const LabelSets& Y, std::size_t n_labels,
                                           std::span<const std::size_t> folds, std::size_t n_folds,
                                           const TrainOptions& opts) {
  check_label_sets(X, Y, n_labels);
  if (folds.size() != X.n_rows()) throw DataError("fold assignment length does not match rows");
  std::vector<double> scores(X.n_rows() * n_labels, 0.0);
  for (std::size_t f = 0; f < n_folds; ++f) {
    const auto split = split_fold(folds, f);
    if (split.held_rows.empty() || split.train_rows.empty()) continue;
    const SparseMatrix X_train = X.select_rows(split.train_rows);
    const SparseMatrix X_held = X.select_rows(split.held_rows);
    const LabelSets Y_train = select(Y, split.train_rows);
    detail::parallel_for(n_labels, opts.threads, [&](std::size_t l) {
      BinaryProblem p{X_train, binary_labels(Y_train, static_cast<std::uint32_t>(l)), opts.C, 1.0, opts.loss};
      const auto sol = train_binary(p, opts.solver);
      const auto dv = decision_values(sol.w, X_held);
      for (std::size_t k = 0; k < dv.size(); ++k) scores[split.held_rows[k] * n_labels + l] = dv[k];
    });
  }
  return scores;
}

ThresholdChoice sweep_threshold(std::span<const double> scores, std::span<const std::int8_t> y, LabelCounts others) {
  if (scores.size() != y.size()) throw DataError("scores and labels differ in length");
  ThresholdChoice best{0.0, f1_score(add(threshold_counts(scores, y, 0.0), others))};
  const std::size_t n = scores.size();
  if (n == 0) return best;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::size_t total_pos = 0;
  for (auto v : y) total_pos += v > 0;

  // Cut t predicts rows with score > t. With k rows at or below the cut,
  // the predicted-positive set is order[k..n).
  auto consider = [&](double cut, std::size_t k, std::size_t pos_below) {
    LabelCounts c;
    c.tp = total_pos - pos_below;
    c.fp = (n - k) - c.tp;
    c.fn = pos_below;
    const double f1 = f1_score(add(c, others));
    if (f1 > best.f1) best = {-cut, f1};
  };

  const double lo = scores[order.front()];
  const double hi = scores[order.back()];
  consider(lo - 1.0, 0, 0);
  std::size_t pos_below = 0;
  for (std::size_t k = 1; k < n; ++k) {
    pos_below += y[order[k - 1]] > 0;
    const double a = scores[order[k - 1]];
    const double b = scores[order[k]];
    if (a < b) {
      double cut = a + (b - a) / 2.0;
      if (cut >= b) cut = a;  // adjacent doubles
      consider(cut, k, pos_below);
    }
  }
  consider(hi + 1.0, n, total_pos);
  return best;
}

ThresholdTuning tune_thresholds(const SparseMatrix& X, const LabelSets& Y, std::size_t n_labels,
                                const TuningConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  check_label_sets(X, Y, n_labels);
  const auto folds = make_folds(X.n_rows(), cfg.n_folds, cfg.seed);
  const auto scores = cross_validated_scores(X, Y, n_labels, folds, cfg.n_folds, opts);

  ThresholdTuning t;
  t.thresholds.assign(n_labels, 0.0);
  t.cv_f1.assign(n_labels, 0.0);
  std::vector<std::vector<double>> cols(n_labels);
  std::vector<std::vector<std::int8_t>> ys(n_labels);
  std::vector<LabelCounts> counts(n_labels);
  for (std::size_t l = 0; l < n_labels; ++l) {
    cols[l] = column(scores, n_labels, l);
    ys[l] = binary_labels(Y, static_cast<std::uint32_t>(l));
    counts[l] = threshold_counts(cols[l], ys[l], 0.0);
  }

  LabelCounts total;
  for (const auto& c : counts) total = add(total, c);
  for (std::size_t l = 0; l < n_labels; ++l) {
    LabelCounts others;
    if (cfg.target == TargetMetric::micro_f1) {
      others = {total.tp - counts[l].tp, total.fp - counts[l].fp, total.fn - counts[l].fn};
    }
    const auto choice = sweep_threshold(cols[l], ys[l], others);
    t.thresholds[l] = choice.delta;
    const LabelCounts chosen = threshold_counts(cols[l], ys[l], choice.delta);
    t.cv_f1[l] = f1_score(chosen);
    if (cfg.target == TargetMetric::micro_f1) {
      total = add(others, chosen);
      counts[l] = chosen;
    }
    if (t.cv_f1[l] == 0.0 && choice.delta == 0.0) {
      t.notes.push_back("label " + std::to_string(l) + ": cross-validated F1 is 0, threshold left at 0");
    }
  }
  return t;
}

CostTuning tune_cost_weights(const SparseMatrix& X, const LabelSets& Y, std::size_t n_labels,
                             const TuningConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  check_label_sets(X, Y, n_labels);
  const std::size_t G = cfg.cost_grid.size();
  const auto folds = make_folds(X.n_rows(), cfg.n_folds, cfg.seed);

  // counts[g * n_labels + l]: sign-prediction counts pooled over folds.
  std::vector<LabelCounts> counts(G * n_labels);
  for (std::size_t f = 0; f < cfg.n_folds; ++f) {
    const auto split = split_fold(folds, f);
    if (split.held_rows.empty() || split.train_rows.empty()) continue;
    const SparseMatrix X_train = X.select_rows(split.train_rows);
    const SparseMatrix X_held = X.select_rows(split.held_rows);
    const LabelSets Y_train = select(Y, split.train_rows);
    const LabelSets Y_held = select(Y, split.held_rows);
    detail::parallel_for(G * n_labels, opts.threads, [&](std::size_t task) {
      const std::size_t g = task / n_labels;
      const auto l = static_cast<std::uint32_t>(task % n_labels);
      BinaryProblem p{X_train, binary_labels(Y_train, l), opts.C, cfg.cost_grid[g], opts.loss};
      const auto sol = train_binary(p, opts.solver);
      const auto dv = decision_values(sol.w, X_held);
      counts[task] = add(counts[task], sign_counts(dv, binary_labels(Y_held, l)));
    });
  }

  CostTuning t;
  t.positive_weights.assign(n_labels, cfg.cost_grid.front());
  t.cv_score.assign(n_labels, 0.0);
  if (cfg.target == TargetMetric::macro_f1) {
    for (std::size_t l = 0; l < n_labels; ++l) {
      double best = -1.0;
      for (std::size_t g = 0; g < G; ++g) {
        const double f1 = f1_score(counts[g * n_labels + l]);
        if (f1 > best) {
          best = f1;
          t.positive_weights[l] = cfg.cost_grid[g];
        }
      }
      t.cv_score[l] = best;
    }
  } else {
    double best = -1.0;
    std::size_t best_g = 0;
    for (std::size_t g = 0; g < G; ++g) {
      LabelCounts total;
      for (std::size_t l = 0; l < n_labels; ++l) total = add(total, counts[g * n_labels + l]);
      const double f1 = f1_score(total);
      if (f1 > best) {
        best = f1;
        best_g = g;
      }
    }
    t.positive_weights.assign(n_labels, cfg.cost_grid[best_g]);
    t.cv_score.assign(n_labels, best);
    t.notes.push_back("shared positive weight " + format_double(cfg.cost_grid[best_g]) + " (cv micro-F1 " +
                      format_double(best) + ")");
  }
  return t;
}

TrainResult train_model(Strategy strategy, const SparseMatrix& X, const LabelSets& Y, std::vector<std::string> labels,
                        TaskKind task_kind, const TrainOptions& opts, const TuningConfig& tuning) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t L = labels.size();
  TrainResult r;
  switch (strategy) {
    case Strategy::one_vs_rest:
      r = train_one_vs_rest(X, Y, std::move(labels), task_kind, opts);
      break;
    case Strategy::thresholding: {
      auto tuned = tune_thresholds(X, Y, L, tuning, opts);
      r = train_one_vs_rest(X, Y, std::move(labels), task_kind, opts);
      r.model.thresholds = std::move(tuned.thresholds);
      r.cv_scores = std::move(tuned.cv_f1);
      r.notes.insert(r.notes.end(), tuned.notes.begin(), tuned.notes.end());
      break;
    }
    case Strategy::cost_sensitive: {
      auto tuned = tune_cost_weights(X, Y, L, tuning, opts);
      r = train_one_vs_rest(X, Y, std::move(labels), task_kind, opts, tuned.positive_weights);
      r.cv_scores = std::move(tuned.cv_score);
      r.notes.insert(r.notes.end(), tuned.notes.begin(), tuned.notes.end());
      break;
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void save_model(const LinearModel& m, std::ostream& out) {
  m.validate();
  out << kModelMagic << '\t' << kModelVersion << '\n';
  out << "task_kind\t" << to_string(m.task_kind) << '\n';
  out << "n_features\t" << m.n_features << '\n';
  out << "n_labels\t" << m.n_labels() << '\n';
  for (std::size_t l = 0; l < m.n_labels(); ++l) {
    const auto& w = m.weights[l];
    const auto nnz = static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double v) { return v != 0.0; }));
    out << "label\t" << l << '\t' << m.labels[l] << "\tthreshold\t" << format_double(m.thresholds[l])
        << "\tpositive_weight\t" << format_double(m.positive_weights[l]) << "\tnnz\t" << nnz << '\n';
    bool first = true;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] == 0.0) continue;
      out << (first ? "" : " ") << j << ':' << format_double(w[j]);
      first = false;
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  for (;;) {
    const std::size_t j = line.find(sep, i);
    out.push_back(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view s, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw DataError(std::string("model file: bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::string_view expect_key(std::istream& in, std::string& line, std::string_view key) {
  if (!std::getline(in, line)) throw DataError("model file: truncated before '" + std::string(key) + "'");
  const auto f = split_on(line, '\t');
  if (f.size() != 2 || f[0] != key) throw DataError("model file: expected '" + std::string(key) + "'");
  return std::string_view(line).substr(key.size() + 1);
}

}  // namespace

LinearModel load_model(std::istream& in) {
  std::string line;
  const auto version = expect_key(in, line, kModelMagic);
  if (parse_field<int>(version, "version") != kModelVersion) {
    throw DataError("model file: unsupported version " + std::string(version));
  }
  LinearModel m;
  m.task_kind = parse_task_kind(expect_key(in, line, "task_kind"));
  m.n_features = parse_field<std::size_t>(expect_key(in, line, "n_features"), "n_features");
  const auto L = parse_field<std::size_t>(expect_key(in, line, "n_labels"), "n_labels");
  for (std::size_t l = 0; l < L; ++l) {
    if (!std::getline(in, line)) throw DataError("model file: truncated at label " + std::to_string(l));
    const auto f = split_on(line, '\t');
    if (f.size() != 9 || f[0] != "label" || f[3] != "threshold" || f[5] != "positive_weight" || f[7] != "nnz" ||
        parse_field<std::size_t>(f[1], "label index") != l) {
      throw DataError("model file: malformed label header " + std::to_string(l));
    }
    m.labels.emplace_back(f[2]);
    m.thresholds.push_back(parse_field<double>(f[4], "threshold"));
    m.positive_weights.push_back(parse_field<double>(f[6], "positive_weight"));
    const auto nnz = parse_field<std::size_t>(f[8], "nnz");

    if (!std::getline(in, line)) throw DataError("model file: missing weights for label " + std::to_string(l));
    WeightVector w(m.n_features, 0.0);
    std::size_t seen = 0;
    if (!line.empty()) {
      for (auto tok : split_on(line, ' ')) {
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos) throw DataError("model file: bad weight entry");
        const auto j = parse_field<std::size_t>(tok.substr(0, colon), "weight index");
        if (j >= m.n_features) throw DataError("model file: weight index out of range");
        w[j] = parse_field<double>(tok.substr(colon + 1), "weight");
        ++seen;
      }
    }
    if (seen != nnz) throw DataError("model file: nnz mismatch for label " + std::to_string(l));
    m.weights.push_back(std::move(w));
  }
  m.validate();
  return m;
}

}  // namespace textcls
