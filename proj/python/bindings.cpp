#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "textcls/error.hpp"
#include "textcls/linear.hpp"
#include "textcls/metrics.hpp"
#include "textcls/pipeline.hpp"

namespace py = pybind11;
using namespace textcls;

namespace {

using Rows = std::vector<std::vector<std::pair<std::uint32_t, double>>>;

SparseMatrix matrix_from_rows(const Rows& rows, std::size_t n_cols) {
  SparseMatrix X(n_cols);
  std::vector<SparseEntry> buf;
  for (const auto& r : rows) {
    buf.clear();
    for (const auto& [c, v] : r) buf.push_back({c, v});
    X.push_row(buf);
  }
  return X;
}

Rows matrix_rows(const SparseMatrix& X) {
  Rows out(X.n_rows());
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    const auto r = X.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) out[i].emplace_back(r.cols[k], r.vals[k]);
  }
  return out;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["n_documents"] = r.n_documents;
  d["n_labels"] = r.n_labels;
  d["micro_f1"] = r.micro_f1;
  d["macro_f1"] = r.macro_f1;
  d["labels"] = r.labels;
  d["per_label_f1"] = r.per_label_f1;
  d["parameter_count"] = r.parameter_count;
  d["unlabeled_extension"] = r.unlabeled_extension;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "TF-IDF features and one-vs-rest linear SVMs";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  py::enum_<TaskKind>(m, "TaskKind")
      .value("multi_class", TaskKind::multi_class)
      .value("multi_label", TaskKind::multi_label);
  py::enum_<Loss>(m, "Loss").value("hinge", Loss::hinge).value("squared_hinge", Loss::squared_hinge);
  py::enum_<Strategy>(m, "Strategy")
      .value("one_vs_rest", Strategy::one_vs_rest)
      .value("thresholding", Strategy::thresholding)
      .value("cost_sensitive", Strategy::cost_sensitive);
  py::enum_<TargetMetric>(m, "TargetMetric")
      .value("micro_f1", TargetMetric::micro_f1)
      .value("macro_f1", TargetMetric::macro_f1);

  py::class_<TokenizerConfig>(m, "TokenizerConfig")
      .def(py::init([](bool lowercase, std::vector<std::string> stop_words, std::size_t ngram_min,
                       std::size_t ngram_max) {
             std::sort(stop_words.begin(), stop_words.end());
             stop_words.erase(std::unique(stop_words.begin(), stop_words.end()), stop_words.end());
             TokenizerConfig c{lowercase, std::move(stop_words), ngram_min, ngram_max};
             c.validate();
             return c;
           }),
           py::arg("lowercase") = true, py::arg("stop_words") = std::vector<std::string>{},
           py::arg("ngram_min") = 1, py::arg("ngram_max") = 1)
      .def_readonly("lowercase", &TokenizerConfig::lowercase)
      .def_readonly("stop_words", &TokenizerConfig::stop_words)
      .def_readonly("ngram_min", &TokenizerConfig::ngram_min)
      .def_readonly("ngram_max", &TokenizerConfig::ngram_max);

  m.def("english_stop_words", &english_stop_words);
  m.def("tokenize", &tokenize, py::arg("text"), py::arg("config") = TokenizerConfig{});
  m.def("analyze", &analyze, py::arg("text"), py::arg("config") = TokenizerConfig{});

  py::class_<SparseMatrix>(m, "SparseMatrix")
      .def(py::init(&matrix_from_rows), py::arg("rows"), py::arg("n_cols"),
           "Build from rows of (column, value) pairs with increasing columns.")
      .def_property_readonly("n_rows", &SparseMatrix::n_rows)
      .def_property_readonly("n_cols", &SparseMatrix::n_cols)
      .def_property_readonly("nnz", &SparseMatrix::nnz)
      .def("rows", &matrix_rows)
      .def("__len__", &SparseMatrix::n_rows);

  py::class_<Vocabulary>(m, "Vocabulary")
      .def_readonly("terms", &Vocabulary::terms)
      .def_readonly("df", &Vocabulary::df)
      .def_readonly("idf", &Vocabulary::idf)
      .def_readonly("n_documents", &Vocabulary::n_documents)
      .def("find", &Vocabulary::find)
      .def("__len__", &Vocabulary::size)
      .def("dumps", [](const Vocabulary& v) {
        std::ostringstream s;
        save_vocabulary(v, s);
        return s.str();
      })
      .def_static("loads", [](const std::string& text) {
        std::istringstream s(text);
        return load_vocabulary(s);
      });

  m.def(
      "fit_vocabulary",
      [](const std::vector<std::string>& texts, const TokenizerConfig& cfg, std::size_t min_df,
         std::optional<std::size_t> max_features) { return fit_vocabulary(texts, cfg, min_df, max_features); },
      py::arg("texts"), py::arg("config") = TokenizerConfig{}, py::arg("min_df") = 1,
      py::arg("max_features") = py::none());
  m.def(
      "transform_tfidf",
      [](const std::vector<std::string>& texts, const Vocabulary& v, unsigned threads) {
        py::gil_scoped_release release;
        return transform_tfidf(texts, v, threads);
      },
      py::arg("texts"), py::arg("vocab"), py::arg("threads") = 1);

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("epochs", &ConvergenceReport::epochs)
      .def_readonly("primal", &ConvergenceReport::primal)
      .def_readonly("dual", &ConvergenceReport::dual)
      .def_readonly("relative_gap", &ConvergenceReport::relative_gap)
      .def_readonly("converged", &ConvergenceReport::converged);

  py::class_<BinarySolution>(m, "BinarySolution")
      .def_readonly("w", &BinarySolution::w)
      .def_readonly("alpha", &BinarySolution::alpha)
      .def_readonly("report", &BinarySolution::report);

  m.def(
      "train_binary",
      [](const SparseMatrix& X, std::vector<std::int8_t> y, double C, double positive_weight, Loss loss, double tol,
         std::size_t max_iter, std::uint64_t seed) {
        BinaryProblem p{X, std::move(y), C, positive_weight, loss};
        SolverOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        opts.seed = seed;
        py::gil_scoped_release release;
        return train_binary(p, opts);
      },
      py::arg("X"), py::arg("y"), py::arg("C") = 1.0, py::arg("positive_weight") = 1.0,
      py::arg("loss") = Loss::squared_hinge, py::arg("tol") = 1e-4, py::arg("max_iter") = 1000,
      py::arg("seed") = 1);
  m.def(
      "duality_gap",
      [](const SparseMatrix& X, std::vector<std::int8_t> y, const std::vector<double>& alpha, double C,
         double positive_weight, Loss loss) {
        BinaryProblem p{X, std::move(y), C, positive_weight, loss};
        return duality_gap(p, alpha);
      },
      py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("C") = 1.0, py::arg("positive_weight") = 1.0,
      py::arg("loss") = Loss::squared_hinge);

  py::class_<LinearModel>(m, "LinearModel")
      .def_readonly("labels", &LinearModel::labels)
      .def_readonly("n_features", &LinearModel::n_features)
      .def_readonly("task_kind", &LinearModel::task_kind)
      .def_readonly("weights", &LinearModel::weights)
      .def_readonly("thresholds", &LinearModel::thresholds)
      .def_readonly("positive_weights", &LinearModel::positive_weights)
      .def("parameter_count", &LinearModel::parameter_count)
      .def("decision_function", [](const LinearModel& model, const SparseMatrix& X) { return decision_matrix(model, X); })
      .def("predict", [](const LinearModel& model, const SparseMatrix& X) { return predict(model, X); })
      .def("dumps", [](const LinearModel& model) {
        std::ostringstream s;
        save_model(model, s);
        return s.str();
      })
      .def_static("loads", [](const std::string& text) {
        std::istringstream s(text);
        return load_model(s);
      });

  m.def(
      "train_model",
      [](const SparseMatrix& X, const LabelSets& Y, std::vector<std::string> labels, Strategy strategy,
         TaskKind task_kind, double C, Loss loss, std::size_t n_folds, TargetMetric target,
         std::vector<double> cost_grid, std::uint64_t seed, unsigned threads) {
        TrainOptions opts;
        opts.C = C;
        opts.loss = loss;
        opts.solver.seed = seed;
        opts.threads = threads;
        TuningConfig tuning;
        tuning.n_folds = n_folds;
        tuning.target = target;
        tuning.cost_grid = std::move(cost_grid);
        tuning.seed = seed;
        py::gil_scoped_release release;
        return train_model(strategy, X, Y, std::move(labels), task_kind, opts, tuning).model;
      },
      py::arg("X"), py::arg("Y"), py::arg("labels"), py::arg("strategy") = Strategy::one_vs_rest,
      py::arg("task_kind") = TaskKind::multi_label, py::arg("C") = 1.0, py::arg("loss") = Loss::squared_hinge,
      py::arg("n_folds") = 3, py::arg("target") = TargetMetric::macro_f1,
      py::arg("cost_grid") = std::vector<double>{1, 2, 4, 8, 16, 32}, py::arg("seed") = 1, py::arg("threads") = 0);

  m.def(
      "f1_scores",
      [](const LabelSets& truth, const LabelSets& pred, std::vector<std::string> labels, bool unlabeled_extension,
         bool macro_includes_unlabeled) {
        EvalOptions opts;
        opts.unlabeled_extension = unlabeled_extension;
        opts.macro_includes_unlabeled = macro_includes_unlabeled;
        return report_dict(score_predictions(truth, pred, std::move(labels), TaskKind::multi_label, opts));
      },
      py::arg("truth"), py::arg("pred"), py::arg("labels"), py::arg("unlabeled_extension") = false,
      py::arg("macro_includes_unlabeled") = true);

  m.def(
      "train",
      [](const std::filesystem::path& data, const std::filesystem::path& model_dir, Strategy strategy, double C,
         std::size_t n_folds, bool include_validation, std::uint64_t seed, const std::string& format) {
        RunConfig cfg;
        cfg.data = data;
        cfg.model_dir = model_dir;
        cfg.strategy = strategy;
        cfg.train.C = C;
        cfg.tuning.n_folds = n_folds;
        cfg.include_validation = include_validation;
        cfg.seed = seed;
        cfg.format = parse_corpus_format(format);
        cfg.validate();
        std::ostringstream log;
        py::gil_scoped_release release;
        return cmd_train(cfg, log).report;
      },
      py::arg("data"), py::arg("model_dir"), py::arg("strategy") = Strategy::one_vs_rest, py::arg("C") = 1.0,
      py::arg("n_folds") = 3, py::arg("include_validation") = true, py::arg("seed") = 1,
      py::arg("format") = "tsv", "Train from a dataset directory and write the model directory; returns the report.");
  m.def(
      "evaluate",
      [](const std::filesystem::path& model_dir, const std::filesystem::path& test, bool unlabeled_extension,
         const std::string& format) {
        EvalOptions opts;
        opts.unlabeled_extension = unlabeled_extension;
        return report_dict(cmd_eval(model_dir, test, parse_corpus_format(format), opts));
      },
      py::arg("model_dir"), py::arg("test"), py::arg("unlabeled_extension") = false, py::arg("format") = "tsv");
  m.def(
      "predict_file",
      [](const std::filesystem::path& model_dir, const std::filesystem::path& input,
         const std::filesystem::path& output, const std::string& format) {
        cmd_predict(model_dir, input, output, parse_corpus_format(format));
      },
      py::arg("model_dir"), py::arg("input"), py::arg("output"), py::arg("format") = "tsv");
  m.def(
      "corpus_stats",
      [](const std::filesystem::path& data, std::size_t budget, const std::string& format) {
        const auto s = cmd_stats(data, parse_corpus_format(format), budget);
        py::dict d;
        d["n_train"] = s.n_train;
        d["n_validation"] = s.n_validation;
        d["n_test"] = s.n_test;
        d["n_labels"] = s.n_labels;
        d["mean_words"] = s.mean_words;
        d["max_words"] = s.max_words;
        d["fraction_over_budget"] = s.fraction_over_budget;
        d["n_unlabeled"] = s.n_unlabeled;
        return d;
      },
      py::arg("data"), py::arg("budget") = 512, py::arg("format") = "tsv");
}
