#include <dgavg/sparse.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dgavg {

SymSparseMatrix::SymSparseMatrix(std::size_t dim,
                                 const std::vector<std::vector<std::size_t>>& lower_pattern)
    : dim_(dim) {
  if (lower_pattern.size() != dim) throw std::invalid_argument("pattern must have one row per dof");
  row_offsets_.assign(1, 0);
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<std::size_t> cols = lower_pattern[i];
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    for (std::size_t j : cols) {
      if (j > i) throw std::invalid_argument("pattern entry above the diagonal");
      columns_.push_back(j);
    }
    row_offsets_.push_back(columns_.size());
  }
  values_.assign(columns_.size(), 0.0);
}

std::size_t SymSparseMatrix::entry_index(std::size_t i, std::size_t j) const {
  if (j > i) std::swap(i, j);
  if (i >= dim_) return values_.size();
  const auto begin = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto end = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return values_.size();
  return static_cast<std::size_t>(it - columns_.begin());
}

bool SymSparseMatrix::contains(std::size_t i, std::size_t j) const {
  return entry_index(i, j) < values_.size();
}

void SymSparseMatrix::add(std::size_t i, std::size_t j, double v) {
  const std::size_t k = entry_index(i, j);
  if (k == values_.size()) {
    throw std::out_of_range("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") is outside the sparsity pattern");
  }
  values_[k] += v;
}

double SymSparseMatrix::at(std::size_t i, std::size_t j) const {
  const std::size_t k = entry_index(i, j);
  return k == values_.size() ? 0.0 : values_[k];
}

void SymSparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double yi = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t j = columns_[k];
      yi += values_[k] * x[j];
      if (j != i) y[j] += values_[k] * x[i];
    }
    y[i] += yi;
  }
}

std::vector<double> SymSparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(dim_);
  multiply(x, y);
  return y;
}

double SymSparseMatrix::bilinear(std::span<const double> u, std::span<const double> v) const {
  const std::vector<double> av = multiply(v);
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += u[i] * av[i];
  return s;
}

std::vector<double> SymSparseMatrix::diagonal() const {
  std::vector<double> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = at(i, i);
  return d;
}

std::vector<double> SymSparseMatrix::to_dense() const {
  std::vector<double> dense(dim_ * dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t j = columns_[k];
      dense[i * dim_ + j] = values_[k];
      dense[j * dim_ + i] = values_[k];
    }
  }
  return dense;
}

void SymSparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

std::string write_matrix_market(const SymSparseMatrix& a, const std::string& comment) {
  std::ostringstream os;
  os.precision(17);
  std::size_t full = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      full += a.columns()[k] == i ? 1 : 2;
    }
  }
  os << "%%MatrixMarket matrix coordinate real general\n";
  std::istringstream lines(comment);
  for (std::string line; std::getline(lines, line);) os << "% " << line << '\n';
  os << a.dim() << ' ' << a.dim() << ' ' << full << '\n';
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      const std::size_t j = a.columns()[k];
      os << i + 1 << ' ' << j + 1 << ' ' << a.values()[k] << '\n';
      if (j != i) os << j + 1 << ' ' << i + 1 << ' ' << a.values()[k] << '\n';
    }
  }
  return os.str();
}

}  // namespace dgavg
