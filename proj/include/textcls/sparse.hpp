#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace textcls {

struct SparseEntry {
  std::uint32_t col;
  double val;
};

struct SparseRowView {
  std::span<const std::uint32_t> cols;
  std::span<const double> vals;

  std::size_t size() const { return cols.size(); }
  bool empty() const { return cols.empty(); }
};

/// Row-major (CSR) sparse matrix.
///
/// Within a row, columns are strictly increasing, values are finite and
/// explicit zeros are never stored. push_row enforces all three.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t n_cols) : n_cols_(n_cols) {}

  std::size_t n_rows() const { return row_ptr_.size() - 1; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return cols_.size(); }

  SparseRowView row(std::size_t i) const;

  /// Appends a row given in strictly increasing column order. Zero values
  /// are dropped. Throws DataError on ordering or range violations and
  /// NumericError on non-finite values.
  void push_row(std::span<const SparseEntry> entries);

  /// Copy of the given rows, in the given order.
  SparseMatrix select_rows(std::span<const std::size_t> rows) const;

  void reserve(std::size_t rows, std::size_t nnz);

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
};

double dot(SparseRowView x, std::span<const double> w);
double squared_norm(SparseRowView x);
// w += a * x
void axpy(double a, SparseRowView x, std::span<double> w);

}  // namespace textcls
