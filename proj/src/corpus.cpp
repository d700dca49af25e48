#include "textcls/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "textcls/error.hpp"

namespace textcls {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void malformed(const fs::path& path, std::size_t line, const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_labels(std::string_view field, char sep) {
  std::vector<std::string> labels;
  std::size_t i = 0;
  while (i <= field.size()) {
    std::size_t j = field.find(sep, i);
    if (j == std::string_view::npos) j = field.size();
    if (j > i) labels.emplace_back(field.substr(i, j - i));
    i = j + 1;
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

Document parse_tsv_line(std::string_view line, const fs::path& path, std::size_t lineno) {
  if (!is_valid_utf8(line)) malformed(path, lineno, "invalid UTF-8");
  const std::size_t tab = line.find('\t');
  if (tab == std::string_view::npos) malformed(path, lineno, "missing TAB between labels and text");
  Document doc;
  doc.id = std::to_string(lineno);
  doc.labels = split_labels(line.substr(0, tab), ' ');
  doc.text = std::string(line.substr(tab + 1));
  return doc;
}

Document parse_svmlight_line(std::string_view line, const fs::path& path, std::size_t lineno) {
  Document doc;
  doc.id = std::to_string(lineno);
  // Leading label field ends at the first space; "" means unlabeled.
  std::size_t sp = line.find(' ');
  std::string_view label_field = line.substr(0, sp);
  if (label_field.find(':') != std::string_view::npos) {
    // Line starts directly with features.
    label_field = {};
    sp = static_cast<std::size_t>(-1);
  }
  doc.labels = split_labels(label_field, ',');
  if (sp == std::string_view::npos) return doc;

  std::size_t i = sp + 1;
  long long prev = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    const std::string_view tok = line.substr(i, j - i);
    i = j;
    if (tok.front() == '#') break;
    const std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos) malformed(path, lineno, "expected index:value, got '" + std::string(tok) + "'");
    long long index = 0;
    auto [p1, e1] = std::from_chars(tok.data(), tok.data() + colon, index);
    if (e1 != std::errc() || p1 != tok.data() + colon || index < 1 || index > 0xFFFFFFFFLL) {
      malformed(path, lineno, "bad feature index in '" + std::string(tok) + "'");
    }
    if (index <= prev) malformed(path, lineno, "feature indices must be strictly increasing");
    prev = index;
    double value = 0.0;
    auto [p2, e2] = std::from_chars(tok.data() + colon + 1, tok.data() + tok.size(), value);
    if (e2 != std::errc() || p2 != tok.data() + tok.size() || !std::isfinite(value)) {
      malformed(path, lineno, "bad feature value in '" + std::string(tok) + "'");
    }
    doc.features.push_back({static_cast<std::uint32_t>(index - 1), value});
  }
  return doc;
}

std::string extension(CorpusFormat format) { return format == CorpusFormat::tsv ? ".tsv" : ".svm"; }

std::optional<fs::path> find_split(const fs::path& dir, std::initializer_list<const char*> names,
                                   CorpusFormat format) {
  for (const char* n : names) {
    fs::path p = dir / (std::string(n) + extension(format));
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

void check_known_labels(const std::vector<Document>& docs, const std::set<std::string>& known,
                        const char* split) {
  for (const auto& d : docs) {
    for (const auto& l : d.labels) {
      if (!known.contains(l)) {
        throw DataError(std::string(split) + " document " + d.id + " has label '" + l +
                        "' that never appears in train");
      }
    }
  }
}

}  // namespace

std::string to_string(TaskKind kind) {
  return kind == TaskKind::multi_class ? "multi_class" : "multi_label";
}

TaskKind parse_task_kind(std::string_view s) {
  if (s == "multi_class" || s == "multi-class") return TaskKind::multi_class;
  if (s == "multi_label" || s == "multi-label") return TaskKind::multi_label;
  throw ConfigError("unknown task kind '" + std::string(s) + "'");
}

std::string to_string(CorpusFormat format) { return format == CorpusFormat::tsv ? "tsv" : "svmlight"; }

CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "tsv") return CorpusFormat::tsv;
  if (s == "svmlight" || s == "svm") return CorpusFormat::svmlight;
  throw ConfigError("unknown corpus format '" + std::string(s) + "'");
}

bool Document::operator==(const Document& o) const {
  if (id != o.id || text != o.text || labels != o.labels || features.size() != o.features.size()) {
    return false;
  }
  for (std::size_t k = 0; k < features.size(); ++k) {
    if (features[k].col != o.features[k].col || features[k].val != o.features[k].val) return false;
  }
  return true;
}

std::vector<std::string> Dataset::label_universe() const {
  std::set<std::string> all;
  for (const auto& d : train) all.insert(d.labels.begin(), d.labels.end());
  return {all.begin(), all.end()};
}

std::vector<Document> load_split(const fs::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (format == CorpusFormat::tsv) {
      docs.push_back(parse_tsv_line(line, path, lineno));
    } else {
      docs.push_back(parse_svmlight_line(line, path, lineno));
    }
  }
  return docs;
}

Dataset load_corpus(const fs::path& path, CorpusFormat format, std::optional<TaskKind> task_kind) {
  Dataset d;
  d.format = format;
  if (fs::is_directory(path)) {
    auto train = find_split(path, {"train"}, format);
    if (!train) throw DataError("no train" + extension(format) + " in " + path.string());
    d.train = load_split(*train, format);
    if (auto p = find_split(path, {"valid", "validation", "dev"}, format)) d.validation = load_split(*p, format);
    if (auto p = find_split(path, {"test"}, format)) d.test = load_split(*p, format);
  } else if (fs::is_regular_file(path)) {
    d.train = load_split(path, format);
  } else {
    throw DataError("no such file or directory: " + path.string());
  }

  const auto labels = d.label_universe();
  const std::set<std::string> known(labels.begin(), labels.end());
  check_known_labels(d.validation, known, "validation");
  check_known_labels(d.test, known, "test");

  const bool single = !d.train.empty() && std::all_of(d.train.begin(), d.train.end(), [](const Document& doc) {
    return doc.labels.size() == 1;
  });
  d.task_kind = task_kind.value_or(single ? TaskKind::multi_class : TaskKind::multi_label);
  if (d.task_kind == TaskKind::multi_class && !single && !d.train.empty()) {
    throw DataError("multi-class task requires exactly one label per training document");
  }
  return d;
}

void write_split(std::span<const Document> docs, const fs::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& d : docs) {
    for (const auto& l : d.labels) {
      if (l.find_first_of(" \t\n,") != std::string::npos) {
        throw DataError("label '" + l + "' contains a separator character");
      }
    }
    if (format == CorpusFormat::tsv) {
      if (d.text.find('\n') != std::string::npos) throw DataError("document " + d.id + " text contains a newline");
      for (std::size_t k = 0; k < d.labels.size(); ++k) out << (k ? " " : "") << d.labels[k];
      out << '\t' << d.text << '\n';
    } else {
      for (std::size_t k = 0; k < d.labels.size(); ++k) out << (k ? "," : "") << d.labels[k];
      char buf[64];
      for (const auto& e : d.features) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, e.val);
        out << ' ' << (e.col + 1) << ':' << std::string_view(buf, p - buf);
      }
      out << '\n';
    }
  }
  if (!out) throw DataError("write failed for " + path.string());
}

Dataset merge_train_validation(Dataset d) {
  d.train.insert(d.train.end(), std::make_move_iterator(d.validation.begin()),
                 std::make_move_iterator(d.validation.end()));
  d.validation.clear();
  return d;
}

CorpusStats corpus_stats(const Dataset& d, const TokenizerConfig& tokenizer, std::size_t budget) {
  if (budget < 1) throw ConfigError("token budget must be >= 1");
  CorpusStats s;
  s.n_train = d.train.size();
  s.n_validation = d.validation.size();
  s.n_test = d.test.size();
  s.n_labels = d.label_universe().size();
  s.budget = budget;

  std::size_t total_words = 0;
  std::size_t n_docs = 0;
  std::size_t over = 0;
  for (const auto* split : {&d.train, &d.validation, &d.test}) {
    for (const auto& doc : *split) {
      const std::size_t words = split_words(doc.text).size();
      total_words += words;
      s.max_words = std::max(s.max_words, words);
      if (tokenize(doc.text, tokenizer).size() > budget) ++over;
      if (doc.labels.empty()) ++s.n_unlabeled;
      ++n_docs;
    }
  }
  if (n_docs > 0) {
    s.mean_words = static_cast<double>(total_words) / static_cast<double>(n_docs);
    s.fraction_over_budget = static_cast<double>(over) / static_cast<double>(n_docs);
  }
  return s;
}

std::vector<std::vector<std::string>> segment_tokens(std::span<const std::string> tokens,
                                                     std::size_t max_tokens,
                                                     std::size_t max_segments) {
  if (max_tokens < 1 || max_segments < 1) throw ConfigError("segment sizes must be >= 1");
  std::vector<std::vector<std::string>> segments;
  for (std::size_t i = 0; i < tokens.size() && segments.size() < max_segments; i += max_tokens) {
    const std::size_t end = std::min(tokens.size(), i + max_tokens);
    segments.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                          tokens.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return segments;
}

std::vector<std::vector<std::string>> segment_document(const Document& doc, std::size_t max_tokens,
                                                       std::size_t max_segments,
                                                       const TokenizerConfig& tokenizer) {
  const auto tokens = tokenize(doc.text, tokenizer);
  return segment_tokens(tokens, max_tokens, max_segments);
}

}  // namespace textcls
