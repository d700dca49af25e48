#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "textcls/corpus.hpp"
#include "textcls/sparse.hpp"

namespace testing_support {

// Random sparse matrix with about `density` of entries filled.
inline textcls::SparseMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d, double density = 0.5) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  textcls::SparseMatrix X(d);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<textcls::SparseEntry> row;
    for (std::size_t j = 0; j < d; ++j) {
      if (keep(rng)) row.push_back({static_cast<std::uint32_t>(j), val(rng)});
    }
    X.push_row(row);
  }
  return X;
}

inline std::vector<std::int8_t> random_signs(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution pos(0.4);
  std::vector<std::int8_t> y(n);
  for (auto& v : y) v = pos(rng) ? 1 : -1;
  return y;
}

// Topic-style synthetic documents: each label owns a block of words and a
// shared background vocabulary adds noise.
inline std::vector<textcls::Document> synthetic_docs(std::mt19937_64& rng, std::size_t n, std::size_t n_labels,
                                                     bool multi_label, std::size_t first_id = 1) {
  std::uniform_int_distribution<std::size_t> pick_label(0, n_labels - 1);
  std::uniform_int_distribution<int> word(0, 7);
  std::uniform_int_distribution<int> noise(0, 29);
  std::uniform_int_distribution<int> len(4, 12);
  std::bernoulli_distribution second(0.3), unlabeled(0.08);
  std::vector<textcls::Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    textcls::Document d;
    d.id = std::to_string(first_id + i);
    std::vector<std::size_t> ls{pick_label(rng)};
    if (multi_label && second(rng)) ls.push_back(pick_label(rng));
    if (multi_label && unlabeled(rng)) ls.clear();
    std::ostringstream text;
    for (auto l : ls) {
      for (int k = len(rng); k > 0; --k) text << "topic" << l << "w" << word(rng) << ' ';
    }
    for (int k = len(rng); k > 0; --k) text << "common" << noise(rng) << ' ';
    d.text = text.str();
    for (auto l : ls) d.labels.push_back("L" + std::to_string(l));
    std::sort(d.labels.begin(), d.labels.end());
    d.labels.erase(std::unique(d.labels.begin(), d.labels.end()), d.labels.end());
    docs.push_back(std::move(d));
  }
  return docs;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("textcls_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_support
