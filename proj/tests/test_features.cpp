#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "test_support.hpp"
#include "textcls/error.hpp"
#include "textcls/features.hpp"

using namespace textcls;

namespace {

std::map<std::string, double> row_map(const SparseMatrix& X, std::size_t r, const Vocabulary& v) {
  std::map<std::string, double> m;
  const auto row = X.row(r);
  for (std::size_t k = 0; k < row.size(); ++k) m[v.terms[row.cols[k]]] = row.vals[k];
  return m;
}

}  // namespace

TEST_CASE("tokenizer keeps runs of two or more word characters") {
  TokenizerConfig cfg;
  CHECK(tokenize("Hello, World! a b_c x1 I'm", cfg) == std::vector<std::string>{"hello", "world", "b_c", "x1"});
  CHECK(tokenize("\xc3\x89T\xc3\x89 caf\xc3\xa9\xe2\x80\x94ok", cfg) ==
        std::vector<std::string>{"\xc3\xa9t\xc3\xa9", "caf\xc3\xa9", "ok"});
  cfg.lowercase = false;
  CHECK(tokenize("ABC def", cfg) == std::vector<std::string>{"ABC", "def"});
}

TEST_CASE("analyze removes stop words before forming n-grams") {
  TokenizerConfig cfg;
  cfg.stop_words = {"the"};
  cfg.ngram_max = 2;
  CHECK(analyze("the cat sat the mat", cfg) ==
        std::vector<std::string>{"cat", "sat", "mat", "cat sat", "sat mat"});
  CHECK(english_stop_words().size() == 318);
  CHECK(std::is_sorted(english_stop_words().begin(), english_stop_words().end()));

  TokenizerConfig bad;
  bad.ngram_min = 2;
  bad.ngram_max = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.ngram_min = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

// The default token pattern drops one-character tokens, so the two-letter
// words aa/bb/cc stand in for a/b/c.
TEST_CASE("fit_vocabulary filters by min_df") {
  const std::vector<std::string> corpus{"aa bb aa", "bb cc"};
  auto v = fit_vocabulary(corpus, {});
  CHECK(v.terms == std::vector<std::string>{"aa", "bb", "cc"});
  CHECK(v.df == std::vector<std::uint32_t>{1, 2, 1});
  CHECK(v.n_documents == 2);

  v = fit_vocabulary(corpus, {}, 2);
  CHECK(v.terms == std::vector<std::string>{"bb"});

  v = fit_vocabulary(corpus, {}, 1, 2);
  // Term frequency: aa 2, bb 2, cc 1.
  CHECK(v.terms == std::vector<std::string>{"aa", "bb"});
  v = fit_vocabulary(corpus, {}, 1, 1);
  CHECK(v.terms == std::vector<std::string>{"aa"});

  CHECK_THROWS_AS(fit_vocabulary(std::vector<std::string>{"a b", "!"}, {}), DataError);
  CHECK_THROWS_AS(fit_vocabulary(corpus, {}, 3), DataError);
  CHECK_THROWS_AS(fit_vocabulary(std::vector<std::string>{}, {}), DataError);
}

TEST_CASE("transform_tfidf matches the hand-computed smoothed-idf example") {
  const std::vector<std::string> corpus{"aa bb aa", "bb cc"};
  const auto v = fit_vocabulary(corpus, {});
  const auto X = transform_tfidf(std::vector<std::string>{"aa bb aa", "", "zz qq", "cc"}, v);
  REQUIRE(X.n_rows() == 4);
  auto r0 = row_map(X, 0, v);
  CHECK(r0["aa"] == doctest::Approx(0.9421).epsilon(1e-4));
  CHECK(r0["bb"] == doctest::Approx(0.3352).epsilon(1e-4));
  CHECK(X.row(1).empty());
  CHECK(X.row(2).empty());
  CHECK(row_map(X, 3, v)["cc"] == doctest::Approx(1.0));
}

TEST_CASE("transform_tfidf agrees with an independent dense computation") {
  std::mt19937_64 rng(5);
  const auto docs = testing_support::synthetic_docs(rng, 60, 5, true);
  std::vector<std::string> texts;
  std::vector<std::vector<std::string>> split;
  for (const auto& d : docs) {
    texts.push_back(d.text);
    std::vector<std::string> words;
    for (auto w : split_words(d.text)) words.emplace_back(w);
    split.push_back(words);
  }
  const auto v = fit_vocabulary(texts, {});
  const auto X = transform_tfidf(texts, v, 3);
  const auto expected = oracle::tfidf(split, split);
  for (std::size_t r = 0; r < texts.size(); ++r) {
    const auto got = row_map(X, r, v);
    REQUIRE(got.size() == expected[r].size());
    double norm = 0.0;
    for (const auto& [t, x] : expected[r]) {
      CHECK(got.at(t) == doctest::Approx(x).epsilon(1e-12));
      norm += got.at(t) * got.at(t);
    }
    CHECK(std::abs(std::sqrt(norm) - 1.0) <= 1e-9);
  }
  // df re-derived from the transformed training matrix.
  std::vector<std::uint32_t> df(v.size(), 0);
  for (std::size_t r = 0; r < X.n_rows(); ++r)
    for (auto c : X.row(r).cols) ++df[c];
  CHECK(df == v.df);
}

TEST_CASE("fit and transform are deterministic and permutation-equivariant") {
  std::mt19937_64 rng(9);
  const auto docs = testing_support::synthetic_docs(rng, 40, 3, false);
  std::vector<std::string> texts;
  for (const auto& d : docs) texts.push_back(d.text);
  const auto v1 = fit_vocabulary(texts, {});
  const auto v2 = fit_vocabulary(texts, {});
  CHECK(v1.terms == v2.terms);
  CHECK(v1.idf == v2.idf);
  CHECK(transform_tfidf(texts, v1) == transform_tfidf(texts, v2, 4));

  std::vector<std::size_t> perm(texts.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::string> shuffled;
  for (auto p : perm) shuffled.push_back(texts[p]);
  const auto vs = fit_vocabulary(shuffled, {});
  CHECK(vs.terms == v1.terms);
  CHECK(vs.idf == v1.idf);
  CHECK(transform_tfidf(shuffled, vs) == transform_tfidf(texts, v1).select_rows(perm));
}

TEST_CASE("vocabulary file round trip") {
  TokenizerConfig cfg;
  cfg.stop_words = {"and", "the"};
  cfg.ngram_max = 2;
  const auto v = fit_vocabulary(std::vector<std::string>{"the cat and the dog", "dog days", "cat naps"}, cfg, 1, 5);
  std::stringstream s;
  save_vocabulary(v, s);
  const auto back = load_vocabulary(s);
  CHECK(back.terms == v.terms);
  CHECK(back.df == v.df);
  CHECK(back.idf == v.idf);
  CHECK(back.tokenizer == v.tokenizer);
  CHECK(back.max_features == v.max_features);
  CHECK(back.config_hash() == v.config_hash());
  CHECK(back.find("cat") == v.find("cat"));

  std::string text = s.str();
  std::stringstream tampered(text.replace(text.find("#min_df\t1"), 9, "#min_df\t2"));
  CHECK_THROWS_AS(load_vocabulary(tampered), DataError);
  std::stringstream garbage("nonsense\n");
  CHECK_THROWS_AS(load_vocabulary(garbage), DataError);
}

TEST_CASE("sparse rows enforce their invariants") {
  SparseMatrix X(4);
  std::vector<SparseEntry> ok{{0, 1.0}, {2, 0.0}, {3, -1.0}};
  X.push_row(ok);
  CHECK(X.row(0).size() == 2);  // explicit zero dropped
  std::vector<SparseEntry> unsorted{{2, 1.0}, {1, 1.0}};
  CHECK_THROWS_AS(X.push_row(unsorted), DataError);
  std::vector<SparseEntry> out_of_range{{4, 1.0}};
  CHECK_THROWS_AS(X.push_row(out_of_range), DataError);
  std::vector<SparseEntry> nan{{1, std::nan("")}};
  CHECK_THROWS_AS(X.push_row(nan), NumericError);
  CHECK(X.n_rows() == 1);
  CHECK(X.nnz() == 2);
}
