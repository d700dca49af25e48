#include "textcls/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "textcls/error.hpp"

namespace textcls {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::vector<std::string> texts_of(std::span<const Document> docs) {
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.text);
  return out;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string build_report(const RunConfig& cfg, const TrainSummary& s, const LinearModel& m) {
  std::ostringstream o;
  o << "strategy\t" << to_string(cfg.strategy) << '\n';
  o << "task_kind\t" << to_string(m.task_kind) << '\n';
  o << "format\t" << to_string(cfg.format) << '\n';
  o << "n_train\t" << s.n_train << '\n';
  o << "n_features\t" << m.n_features << '\n';
  o << "n_labels\t" << m.n_labels() << '\n';
  o << "parameter_count\t" << m.parameter_count() << '\n';
  o << "C\t" << fmt(cfg.train.C) << '\n';
  o << "loss\t" << to_string(cfg.train.loss) << '\n';
  o << "tol\t" << fmt(cfg.train.solver.tol) << '\n';
  o << "max_iter\t" << cfg.train.solver.max_iter << '\n';
  o << "seed\t" << cfg.seed << '\n';
  o << "include_validation\t" << (cfg.include_validation ? "true" : "false") << '\n';
  if (cfg.strategy != Strategy::one_vs_rest) {
    o << "n_folds\t" << cfg.tuning.n_folds << '\n';
    o << "target_metric\t" << to_string(cfg.tuning.target) << '\n';
  }
  if (cfg.strategy == Strategy::cost_sensitive) {
    o << "cost_grid\t";
    for (std::size_t k = 0; k < cfg.tuning.cost_grid.size(); ++k) o << (k ? "," : "") << fmt(cfg.tuning.cost_grid[k]);
    o << '\n';
  }
  const auto& r = s.result;
  for (std::size_t l = 0; l < m.n_labels(); ++l) {
    const auto& c = r.convergence[l];
    o << "label." << m.labels[l] << "\tepochs=" << c.epochs << "\tconverged=" << (c.converged ? "true" : "false")
      << "\trelative_gap=" << fmt(c.relative_gap) << "\tthreshold=" << fmt(m.thresholds[l])
      << "\tpositive_weight=" << fmt(m.positive_weights[l]);
    if (!r.cv_scores.empty()) o << "\tcv_score=" << fmt(r.cv_scores[l]);
    o << '\n';
  }
  for (const auto& n : r.notes) o << "note\t" << n << '\n';
  return o.str();
}

}  // namespace

void RunConfig::validate() const {
  if (data.empty()) throw ConfigError("no data path given");
  featurizer.tokenizer.validate();
  if (featurizer.min_df < 1) throw ConfigError("min_df must be >= 1");
  if (featurizer.max_features && *featurizer.max_features < 1) throw ConfigError("max_features must be >= 1");
  if (!(train.C > 0.0)) throw ConfigError("C must be positive");
  if (!(train.solver.tol > 0.0)) throw ConfigError("tol must be positive");
  if (train.solver.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (strategy != Strategy::one_vs_rest) tuning.validate();
}

void ModelBundle::save(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  std::ostringstream m;
  save_model(model, m);
  write_file(dir / kModelFile, m.str());
  if (vocab) {
    std::ostringstream v;
    save_vocabulary(*vocab, v);
    write_file(dir / kVocabFile, v.str());
  } else {
    fs::remove(dir / kVocabFile, ec);
  }
  write_file(dir / kTimingFile, "training_seconds\t" + fmt(training_seconds) + "\n");
}

ModelBundle ModelBundle::load(const fs::path& dir) {
  ModelBundle b;
  std::ifstream m(dir / kModelFile, std::ios::binary);
  if (!m) throw DataError("cannot open model file in " + dir.string());
  b.model = load_model(m);
  if (std::ifstream v(dir / kVocabFile, std::ios::binary); v) {
    b.vocab = load_vocabulary(v);
    if (b.vocab->size() != b.model.n_features) {
      throw DataError("vocabulary size " + std::to_string(b.vocab->size()) + " does not match model features " +
                      std::to_string(b.model.n_features));
    }
  }
  if (std::ifstream t(dir / kTimingFile); t) {
    std::string key;
    double v = 0.0;
    if (t >> key >> v && key == "training_seconds") b.training_seconds = v;
  }
  return b;
}

LabelSets encode_labels(std::span<const Document> docs, std::span<const std::string> labels) {
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::size_t l = 0; l < labels.size(); ++l) index.emplace(labels[l], static_cast<std::uint32_t>(l));
  LabelSets Y;
  Y.reserve(docs.size());
  for (const auto& d : docs) {
    std::vector<std::uint32_t> s;
    for (const auto& name : d.labels) {
      auto it = index.find(name);
      if (it == index.end()) throw DataError("document " + d.id + ": label '" + name + "' unknown to the model");
      s.push_back(it->second);
    }
    std::sort(s.begin(), s.end());
    Y.push_back(std::move(s));
  }
  return Y;
}

SparseMatrix featurize(std::span<const Document> docs, const std::optional<Vocabulary>& vocab, std::size_t n_features,
                       unsigned threads) {
  if (vocab) {
    const auto texts = texts_of(docs);
    return transform_tfidf(texts, *vocab, threads);
  }
  SparseMatrix X(n_features);
  for (const auto& d : docs) {
    if (!d.features.empty() && d.features.back().col >= n_features) {
      throw DataError("dimension mismatch: document " + d.id + " uses feature " +
                      std::to_string(d.features.back().col + 1) + " but the model has " + std::to_string(n_features));
    }
    X.push_row(d.features);
  }
  return X;
}

TrainSummary cmd_train(const RunConfig& cfg_in, std::ostream& log) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  cfg.train.solver.seed = cfg.seed;
  cfg.tuning.seed = cfg.seed;

  Dataset d = load_corpus(cfg.data, cfg.format, cfg.task_kind);
  if (cfg.include_validation) d = merge_train_validation(std::move(d));
  if (d.train.empty()) throw DataError("training split is empty");
  auto labels = d.label_universe();
  if (labels.empty()) throw DataError("no labels in the training split");
  log << "loaded " << d.train.size() << " training documents, " << labels.size() << " labels ("
      << to_string(d.task_kind) << ")\n";

  TrainSummary s;
  s.n_train = d.train.size();
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Vocabulary> vocab;
  std::size_t n_features = 0;
  if (cfg.format == CorpusFormat::tsv) {
    const auto texts = texts_of(d.train);
    vocab = fit_vocabulary(texts, cfg.featurizer.tokenizer, cfg.featurizer.min_df, cfg.featurizer.max_features);
    n_features = vocab->size();
  } else {
    for (const auto& doc : d.train) {
      if (!doc.features.empty()) n_features = std::max<std::size_t>(n_features, doc.features.back().col + 1);
    }
  }
  const SparseMatrix X = featurize(d.train, vocab, n_features, cfg.train.threads);
  s.featurize_seconds = seconds_since(t0);
  log << "features: " << n_features << " columns, " << X.nnz() << " nonzeros (" << fmt(s.featurize_seconds) << "s)\n";

  const LabelSets Y = encode_labels(d.train, labels);
  s.result = train_model(cfg.strategy, X, Y, std::move(labels), d.task_kind, cfg.train, cfg.tuning);
  log << "trained " << to_string(cfg.strategy) << " in " << fmt(s.result.seconds) << "s\n";
  for (const auto& n : s.result.notes) log << n << '\n';

  s.report = build_report(cfg, s, s.result.model);
  if (!cfg.model_dir.empty()) {
    ModelBundle b{s.result.model, std::move(vocab), s.result.seconds};
    b.save(cfg.model_dir);
    write_file(cfg.model_dir / ModelBundle::kReportFile, s.report);
  }
  return s;
}

void cmd_predict(const fs::path& model_dir, const fs::path& input, const fs::path& output, CorpusFormat format,
                 unsigned threads) {
  const auto b = ModelBundle::load(model_dir);
  if (format == CorpusFormat::tsv && !b.vocab) throw DataError("model was trained on svmlight features; input must be svmlight");
  if (format == CorpusFormat::svmlight && b.vocab) throw DataError("model expects raw text (tsv) input");
  const auto docs = load_split(input, format);
  const SparseMatrix X = featurize(docs, b.vocab, b.model.n_features, threads);
  const LabelSets pred = predict(b.model, X);

  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out += docs[i].id;
    out += '\t';
    for (std::size_t k = 0; k < pred[i].size(); ++k) {
      if (k) out += ' ';
      out += b.model.labels[pred[i][k]];
    }
    out += '\n';
  }
  write_file(output, out);
}

EvalReport cmd_eval(const fs::path& model_dir, const fs::path& test, CorpusFormat format, const EvalOptions& options,
                    unsigned threads) {
  const auto b = ModelBundle::load(model_dir);
  std::vector<Document> docs;
  if (fs::is_directory(test)) {
    docs = load_corpus(test, format).test;
  } else {
    docs = load_split(test, format);
  }
  const SparseMatrix X = featurize(docs, b.vocab, b.model.n_features, threads);
  const LabelSets truth = encode_labels(docs, b.model.labels);
  return evaluate(b.model, X, truth, options, b.training_seconds);
}

CorpusStats cmd_stats(const fs::path& data, CorpusFormat format, std::size_t budget, const TokenizerConfig& tokenizer) {
  Dataset d;
  if (fs::is_directory(data)) {
    d = load_corpus(data, format);
  } else {
    d.train = load_split(data, format);
  }
  return corpus_stats(d, tokenizer, budget);
}

std::string format_stats(const CorpusStats& s) {
  std::ostringstream o;
  o << "n_train\t" << s.n_train << '\n'
    << "n_validation\t" << s.n_validation << '\n'
    << "n_test\t" << s.n_test << '\n'
    << "n_labels\t" << s.n_labels << '\n'
    << "n_unlabeled\t" << s.n_unlabeled << '\n'
    << "mean_words\t" << fmt(s.mean_words) << '\n'
    << "max_words\t" << s.max_words << '\n'
    << "budget\t" << s.budget << '\n'
    << "fraction_over_budget\t" << fmt(s.fraction_over_budget) << '\n';
  return o.str();
}

}  // namespace textcls
