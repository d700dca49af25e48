#include "textcls/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "parallel.hpp"
#include "textcls/error.hpp"

namespace textcls {

namespace {

constexpr const char* kVocabMagic = "#textcls-vocab";
constexpr int kVocabVersion = 1;

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <typename T>
T parse_number(std::string_view s, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw DataError(std::string("vocabulary: bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  for (;;) {
    const std::size_t j = line.find('\t', i);
    fields.push_back(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return fields;
}

}  // namespace

std::optional<std::uint32_t> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::reindex() {
  index_.clear();
  index_.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) index_.emplace(terms[i], static_cast<std::uint32_t>(i));
}

std::uint64_t Vocabulary::config_hash() const {
  std::string key = tokenizer.canonical() + ";min_df=" + std::to_string(min_df) +
                    ";max_features=" + (max_features ? std::to_string(*max_features) : "none");
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Vocabulary fit_vocabulary(std::span<const std::string> texts, const TokenizerConfig& cfg,
                          std::size_t min_df, std::optional<std::size_t> max_features) {
  cfg.validate();
  if (texts.empty()) throw DataError("cannot fit a vocabulary on zero documents");
  if (min_df < 1) throw ConfigError("min_df must be >= 1");
  if (max_features && *max_features < 1) throw ConfigError("max_features must be >= 1");

  struct Counts {
    std::uint32_t df = 0;
    std::uint64_t tf = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
  };
  std::unordered_map<std::string, Counts> counts;
  for (std::size_t d = 0; d < texts.size(); ++d) {
    for (auto& term : analyze(texts[d], cfg)) {
      auto& c = counts[std::move(term)];
      c.tf += 1;
      if (c.last_doc != d) {
        c.last_doc = d;
        c.df += 1;
      }
    }
  }
  if (counts.empty()) throw DataError("empty vocabulary: no document contains any term");

  struct Entry {
    std::string term;
    std::uint32_t df;
    std::uint64_t tf;
  };
  std::vector<Entry> kept;
  kept.reserve(counts.size());
  for (auto& [term, c] : counts) {
    if (c.df >= min_df) kept.push_back({term, c.df, c.tf});
  }
  if (kept.empty()) throw DataError("empty vocabulary: no term reaches min_df");

  if (max_features && kept.size() > *max_features) {
    auto by_frequency = [](const Entry& a, const Entry& b) {
      return a.tf != b.tf ? a.tf > b.tf : a.term < b.term;
    };
    std::nth_element(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(*max_features), kept.end(),
                     by_frequency);
    kept.resize(*max_features);
  }
  std::sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) { return a.term < b.term; });

  Vocabulary v;
  v.tokenizer = cfg;
  v.min_df = min_df;
  v.max_features = max_features;
  v.n_documents = texts.size();
  v.terms.reserve(kept.size());
  v.df.reserve(kept.size());
  v.idf.reserve(kept.size());
  const double n = static_cast<double>(texts.size());
  for (auto& e : kept) {
    v.terms.push_back(std::move(e.term));
    v.df.push_back(e.df);
    v.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(e.df))) + 1.0);
  }
  v.reindex();
  return v;
}

SparseMatrix transform_tfidf(std::span<const std::string> texts, const Vocabulary& vocab, unsigned threads) {
  std::vector<std::vector<SparseEntry>> rows(texts.size());
  detail::parallel_for(texts.size(), threads, [&](std::size_t r) {
    std::vector<SparseEntry> entries;
    for (const auto& term : analyze(texts[r], vocab.tokenizer)) {
      if (auto col = vocab.find(term)) entries.push_back({*col, 1.0});
    }
    std::sort(entries.begin(), entries.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
    // Merge duplicate columns into raw counts.
    std::vector<SparseEntry> merged;
    for (const auto& e : entries) {
      if (!merged.empty() && merged.back().col == e.col) {
        merged.back().val += 1.0;
      } else {
        merged.push_back(e);
      }
    }
    double norm = 0.0;
    for (auto& e : merged) {
      e.val *= vocab.idf[e.col];
      norm += e.val * e.val;
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (auto& e : merged) e.val /= norm;
    }
    rows[r] = std::move(merged);
  });

  SparseMatrix X(vocab.size());
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.size();
  X.reserve(rows.size(), nnz);
  for (const auto& r : rows) X.push_row(r);
  return X;
}

void save_vocabulary(const Vocabulary& v, std::ostream& out) {
  char hash[17];
  auto [p, ec] = std::to_chars(hash, hash + 16, v.config_hash(), 16);
  out << kVocabMagic << '\t' << kVocabVersion << '\n';
  out << "#n_documents\t" << v.n_documents << '\n';
  out << "#config_hash\t" << std::string_view(hash, p - hash) << '\n';
  out << "#lowercase\t" << (v.tokenizer.lowercase ? 1 : 0) << '\n';
  out << "#ngram_range\t" << v.tokenizer.ngram_min << '\t' << v.tokenizer.ngram_max << '\n';
  out << "#min_df\t" << v.min_df << '\n';
  out << "#max_features\t" << (v.max_features ? std::to_string(*v.max_features) : "none") << '\n';
  out << "#stop_words";
  for (const auto& w : v.tokenizer.stop_words) out << '\t' << w;
  out << '\n';
  out << "#n_terms\t" << v.size() << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << v.terms[i] << '\t' << i << '\t' << v.df[i] << '\t' << format_double(v.idf[i]) << '\n';
  }
}

Vocabulary load_vocabulary(std::istream& in) {
  Vocabulary v;
  std::string line;
  if (!std::getline(in, line)) throw DataError("vocabulary: empty file");
  auto magic = split_tabs(line);
  if (magic.size() != 2 || magic[0] != kVocabMagic) throw DataError("vocabulary: bad header");
  if (parse_number<int>(magic[1], "version") != kVocabVersion) {
    throw DataError("vocabulary: unsupported version " + std::string(magic[1]));
  }
  std::optional<std::size_t> n_terms;
  std::string expected_hash;
  while (!n_terms && std::getline(in, line)) {
    auto f = split_tabs(line);
    const auto key = f[0];
    auto need = [&](std::size_t k) {
      if (f.size() != k) throw DataError("vocabulary: malformed header line '" + line + "'");
    };
    if (key == "#n_documents") {
      need(2);
      v.n_documents = parse_number<std::size_t>(f[1], "n_documents");
    } else if (key == "#config_hash") {
      need(2);
      expected_hash = std::string(f[1]);
    } else if (key == "#lowercase") {
      need(2);
      v.tokenizer.lowercase = f[1] == "1";
    } else if (key == "#ngram_range") {
      need(3);
      v.tokenizer.ngram_min = parse_number<std::size_t>(f[1], "ngram_min");
      v.tokenizer.ngram_max = parse_number<std::size_t>(f[2], "ngram_max");
    } else if (key == "#min_df") {
      need(2);
      v.min_df = parse_number<std::size_t>(f[1], "min_df");
    } else if (key == "#max_features") {
      need(2);
      if (f[1] != "none") v.max_features = parse_number<std::size_t>(f[1], "max_features");
    } else if (key == "#stop_words") {
      for (std::size_t k = 1; k < f.size(); ++k) v.tokenizer.stop_words.emplace_back(f[k]);
    } else if (key == "#n_terms") {
      need(2);
      n_terms = parse_number<std::size_t>(f[1], "n_terms");
    } else {
      throw DataError("vocabulary: unknown header '" + std::string(key) + "'");
    }
  }
  if (!n_terms) throw DataError("vocabulary: missing #n_terms");
  v.tokenizer.validate();

  v.terms.reserve(*n_terms);
  v.df.reserve(*n_terms);
  v.idf.reserve(*n_terms);
  for (std::size_t i = 0; i < *n_terms; ++i) {
    if (!std::getline(in, line)) throw DataError("vocabulary: truncated term list");
    auto f = split_tabs(line);
    if (f.size() != 4) throw DataError("vocabulary: malformed term line " + std::to_string(i));
    if (parse_number<std::size_t>(f[1], "index") != i) throw DataError("vocabulary: non-dense index at term " + std::to_string(i));
    if (i > 0 && !(v.terms.back() < f[0])) throw DataError("vocabulary: terms not sorted");
    v.terms.emplace_back(f[0]);
    v.df.push_back(parse_number<std::uint32_t>(f[2], "df"));
    v.idf.push_back(parse_number<double>(f[3], "idf"));
  }
  v.reindex();

  char hash[17];
  auto [p, ec] = std::to_chars(hash, hash + 16, v.config_hash(), 16);
  if (!expected_hash.empty() && expected_hash != std::string_view(hash, p - hash)) {
    throw DataError("vocabulary: config hash mismatch");
  }
  return v;
}

}  // namespace textcls
