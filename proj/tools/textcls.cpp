// textcls: train, predict, eval and stats front end.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration error,
// 3 data error, 4 numeric error.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "textcls/error.hpp"
#include "textcls/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kNumeric = 4 };

std::vector<std::string> read_stop_words(const std::string& choice) {
  if (choice.empty() || choice == "none") return {};
  if (choice == "english") return textcls::english_stop_words();
  std::ifstream in(choice);
  if (!in) throw textcls::ConfigError("cannot read stop word file " + choice);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

void write_or_print(const std::string& text, const std::string& path) {
  std::cout << text;
  if (!path.empty()) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw textcls::DataError("cannot write " + path);
    out << text;
  }
}

// Appends "--key value" for every config-file key not already given as a
// flag, so command-line values win. Booleans become bare flags when true.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(),
                         [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (std::next(it) == args.end()) return args;
    path = *std::next(it);
    args.erase(it, std::next(it, 2));
  } else {
    path = it->substr(9);
    args.erase(it);
  }
  std::ifstream in(path);
  if (!in) throw textcls::ConfigError("cannot read config file " + path);
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return s;
  };
  std::vector<std::string> extra;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw textcls::ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") continue;
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    if (key == "no-include-validation" || key == "no-lowercase") {
      if (value == "true" || value == "1" || value == "yes") extra.push_back(flag);
    } else {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear text classification: TF-IDF features with one-vs-rest linear SVMs"};
  app.require_subcommand(1);

  std::string format = "tsv";
  unsigned threads = 0;

  // train
  auto* train = app.add_subcommand("train", "Fit the vocabulary and train a model");
  std::string config_file;
  train->add_option("--config", config_file, "Read 'key = value' options from a file; flags override it");
  textcls::RunConfig cfg;
  std::string data, model_dir, strategy = "one_vs_rest", loss = "squared_hinge", target = "macro_f1";
  std::string task_kind, stop_words;
  std::vector<std::size_t> ngram_range{1, 1};
  std::optional<std::size_t> max_features;
  std::vector<double> cost_grid{1, 2, 4, 8, 16, 32};
  bool no_include_validation = false, no_lowercase = false;
  train->add_option("--data", data, "Dataset directory (train/valid/test files) or a training file")->required();
  train->add_option("--model", model_dir, "Output model directory")->required();
  train->add_option("--format", format, "Input format")->check(CLI::IsMember({"tsv", "svmlight"}));
  train->add_option("--task", task_kind, "multi_class or multi_label (default: inferred)");
  train->add_option("--strategy", strategy, "one_vs_rest, thresholding or cost_sensitive")
      ->check(CLI::IsMember({"one_vs_rest", "thresholding", "cost_sensitive"}));
  train->add_option("--C", cfg.train.C, "Regularization trade-off");
  train->add_option("--loss", loss, "hinge or squared_hinge")->check(CLI::IsMember({"hinge", "squared_hinge"}));
  train->add_option("--tol", cfg.train.solver.tol, "Relative duality gap tolerance");
  train->add_option("--max-iter", cfg.train.solver.max_iter, "Maximum solver epochs");
  train->add_option("--folds", cfg.tuning.n_folds, "Cross-validation folds for tuning");
  train->add_option("--target", target, "Tuning target: micro_f1 or macro_f1")
      ->check(CLI::IsMember({"micro_f1", "macro_f1"}));
  train->add_option("--cost-grid", cost_grid, "Positive-weight grid for cost_sensitive")->delimiter(',');
  train->add_flag("--no-include-validation", no_include_validation, "Train on the train split only");
  train->add_option("--stop-words", stop_words, "none, english, or a file of words");
  train->add_option("--ngram-range", ngram_range, "Lower and upper n-gram size")->expected(2)->delimiter(',');
  train->add_option("--min-df", cfg.featurizer.min_df, "Minimum document frequency");
  train->add_option("--max-features", max_features, "Keep the most frequent terms only");
  train->add_flag("--no-lowercase", no_lowercase, "Keep case when tokenizing");
  train->add_option("--seed", cfg.seed, "Seed for folds and coordinate order");
  train->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // predict
  auto* predict = app.add_subcommand("predict", "Predict labels for documents");
  std::string input, output;
  predict->add_option("--model", model_dir, "Model directory")->required();
  predict->add_option("--input", input, "Documents to label")->required();
  predict->add_option("--output", output, "Predictions file")->required();
  predict->add_option("--format", format, "Input format")->check(CLI::IsMember({"tsv", "svmlight"}));
  predict->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // eval
  auto* eval = app.add_subcommand("eval", "Score a model on labeled data");
  std::string test, report_path;
  bool unlabeled_extension = false, macro_excludes_unlabeled = false, json = false;
  eval->add_option("--model", model_dir, "Model directory")->required();
  eval->add_option("--test", test, "Test file, or dataset directory (uses its test split)")->required();
  eval->add_option("--format", format, "Input format")->check(CLI::IsMember({"tsv", "svmlight"}));
  eval->add_flag("--unlabeled-extension", unlabeled_extension, "Score unlabeled documents as an extra class");
  eval->add_flag("--macro-excludes-unlabeled", macro_excludes_unlabeled,
                 "Leave the extra class out of the Macro-F1 mean");
  eval->add_flag("--no-include-validation", no_include_validation, "Record that validation data was not merged");
  eval->add_flag("--json", json, "Emit JSON instead of key/value lines");
  eval->add_option("--report", report_path, "Also write the report to this file");
  eval->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // stats
  auto* stats = app.add_subcommand("stats", "Document length audit");
  std::size_t budget = 512;
  stats->add_option("--data", data, "Dataset directory or a single split file")->required();
  stats->add_option("--budget", budget, "Token budget")->check(CLI::PositiveNumber);
  stats->add_option("--format", format, "Input format")->check(CLI::IsMember({"tsv", "svmlight"}));

  try {
    std::vector<std::string> args(argv, argv + argc);
    if (argc > 1 && args[1] == "train") args = expand_config(std::move(args));
    std::vector<char*> ptrs;
    for (auto& a : args) ptrs.push_back(a.data());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const textcls::ConfigError& e) {
    std::cerr << "error [config]: " << e.what() << '\n';
    return kConfig;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  const char* stage = "setup";
  try {
    const auto fmt = textcls::parse_corpus_format(format);
    if (*train) {
      stage = "config";
      cfg.data = data;
      cfg.model_dir = model_dir;
      cfg.format = fmt;
      if (!task_kind.empty()) cfg.task_kind = textcls::parse_task_kind(task_kind);
      cfg.strategy = textcls::parse_strategy(strategy);
      cfg.train.loss = textcls::parse_loss(loss);
      cfg.train.threads = threads;
      cfg.tuning.target = textcls::parse_target_metric(target);
      cfg.tuning.cost_grid = cost_grid;
      cfg.include_validation = !no_include_validation;
      cfg.featurizer.tokenizer.lowercase = !no_lowercase;
      cfg.featurizer.tokenizer.stop_words = read_stop_words(stop_words);
      cfg.featurizer.tokenizer.ngram_min = ngram_range.at(0);
      cfg.featurizer.tokenizer.ngram_max = ngram_range.at(1);
      cfg.featurizer.max_features = max_features;
      cfg.validate();
      stage = "train";
      const auto summary = textcls::cmd_train(cfg, std::cerr);
      std::cout << summary.report;
      std::cout << "training_seconds\t" << summary.result.seconds << '\n';
      std::cout << "featurize_seconds\t" << summary.featurize_seconds << '\n';
    } else if (*predict) {
      stage = "predict";
      textcls::cmd_predict(model_dir, input, output, fmt, threads);
    } else if (*eval) {
      stage = "eval";
      textcls::EvalOptions opts;
      opts.unlabeled_extension = unlabeled_extension;
      opts.macro_includes_unlabeled = !macro_excludes_unlabeled;
      opts.include_validation = !no_include_validation;
      const auto rep = textcls::cmd_eval(model_dir, test, fmt, opts, threads);
      write_or_print(json ? rep.to_json() : rep.to_tsv(), report_path);
    } else if (*stats) {
      stage = "stats";
      const auto s = textcls::cmd_stats(data, fmt, budget);
      const std::size_t n = s.n_train + s.n_validation + s.n_test;
      if (n == 0) std::cerr << "warning: no documents in " << data << '\n';
      std::cout << textcls::format_stats(s);
    }
  } catch (const textcls::ConfigError& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kConfig;
  } catch (const textcls::DataError& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kData;
  } catch (const textcls::NumericError& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
