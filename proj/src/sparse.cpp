#include "textcls/sparse.hpp"

#include <cmath>
#include <string>

#include "textcls/error.hpp"

namespace textcls {

SparseRowView SparseMatrix::row(std::size_t i) const {
  const std::size_t begin = row_ptr_[i];
  const std::size_t len = row_ptr_[i + 1] - begin;
  return {std::span<const std::uint32_t>(cols_).subspan(begin, len),
          std::span<const double>(vals_).subspan(begin, len)};
}

void SparseMatrix::push_row(std::span<const SparseEntry> entries) {
  const std::size_t start = cols_.size();
  bool first = true;
  std::uint32_t prev = 0;
  for (const auto& e : entries) {
    auto fail = [&](auto&& err) {
      cols_.resize(start);
      vals_.resize(start);
      throw err;
    };
    if (!std::isfinite(e.val)) {
      fail(NumericError("non-finite feature value in row " + std::to_string(n_rows())));
    }
    if (e.col >= n_cols_) {
      fail(DataError("feature index " + std::to_string(e.col) + " out of range (n_cols " +
                     std::to_string(n_cols_) + ") in row " + std::to_string(n_rows())));
    }
    if (!first && e.col <= prev) {
      fail(DataError("feature indices not strictly increasing in row " +
                     std::to_string(n_rows())));
    }
    first = false;
    prev = e.col;
    if (e.val == 0.0) continue;
    cols_.push_back(e.col);
    vals_.push_back(e.val);
  }
  row_ptr_.push_back(cols_.size());
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> rows) const {
  SparseMatrix out(n_cols_);
  std::size_t total = 0;
  for (auto r : rows) total += row_ptr_[r + 1] - row_ptr_[r];
  out.reserve(rows.size(), total);
  for (auto r : rows) {
    const auto v = row(r);
    out.cols_.insert(out.cols_.end(), v.cols.begin(), v.cols.end());
    out.vals_.insert(out.vals_.end(), v.vals.begin(), v.vals.end());
    out.row_ptr_.push_back(out.cols_.size());
  }
  return out;
}

void SparseMatrix::reserve(std::size_t rows, std::size_t nnz) {
  row_ptr_.reserve(rows + 1);
  cols_.reserve(nnz);
  vals_.reserve(nnz);
}

double dot(SparseRowView x, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.cols.size(); ++k) s += w[x.cols[k]] * x.vals[k];
  return s;
}

double squared_norm(SparseRowView x) {
  double s = 0.0;
  for (double v : x.vals) s += v * v;
  return s;
}

void axpy(double a, SparseRowView x, std::span<double> w) {
  for (std::size_t k = 0; k < x.cols.size(); ++k) w[x.cols[k]] += a * x.vals[k];
}

}  // namespace textcls
