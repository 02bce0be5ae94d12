#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dgavg {

/// Symmetric matrix stored as its lower triangle in compressed rows. The
/// pattern is fixed at construction; values are set through add().
class SymSparseMatrix {
 public:
  SymSparseMatrix() = default;
  /// `lower_pattern[i]` lists the columns j <= i present in row i.
  SymSparseMatrix(std::size_t dim, const std::vector<std::vector<std::size_t>>& lower_pattern);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  /// Adds v at (i, j); either triangle may be addressed. Throws
  /// std::out_of_range if (i, j) is not in the pattern.
  void add(std::size_t i, std::size_t j, double v);
  double at(std::size_t i, std::size_t j) const;
  bool contains(std::size_t i, std::size_t j) const;
  /// Position of (i, j) in values(), or nonzeros() when absent.
  std::size_t entry_index(std::size_t i, std::size_t j) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double bilinear(std::span<const double> u, std::span<const double> v) const;
  std::vector<double> diagonal() const;
  /// Dense row-major copy of the full matrix.
  std::vector<double> to_dense() const;

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  void set_zero();

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> columns_;
  std::vector<double> values_;
};

/// Coordinate format: a `%` header line with the dimension, then
/// `dim dim nnz_full`, then `row col value` (1-based) for both triangles.
std::string write_matrix_market(const SymSparseMatrix& a, const std::string& comment);

}  // namespace dgavg
