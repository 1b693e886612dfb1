#include "voxquad/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "voxquad/error.hpp"

namespace voxquad {

SparseOperator::SparseOperator(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

SparseOperator SparseOperator::from_triplets(std::size_t rows, std::size_t cols,
                                             std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw InvalidArgument("triplet index out of range");
    if (!std::isfinite(t.value)) throw InvalidArgument("non-finite matrix entry");
  }
  // Stable sort keeps the summation order of duplicates deterministic.
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseOperator m(rows, cols);
  m.columns_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    while (k < triplets.size() && triplets[k].row == i) {
      const std::size_t j = triplets[k].col;
      double sum = 0.0;
      while (k < triplets.size() && triplets[k].row == i && triplets[k].col == j) {
        sum += triplets[k].value;
        ++k;
      }
      m.columns_.push_back(j);
      m.values_.push_back(sum);
    }
    m.offsets_[i + 1] = m.columns_.size();
  }
  return m;
}

SparseOperator SparseOperator::diagonal(std::span<const double> values) {
  const std::size_t n = values.size();
  SparseOperator m(n, n);
  m.columns_.resize(n);
  m.values_.assign(values.begin(), values.end());
  for (std::size_t i = 0; i < n; ++i) {
    m.columns_[i] = i;
    m.offsets_[i + 1] = i + 1;
  }
  return m;
}

SparseOperator SparseOperator::identity(std::size_t n) {
  const std::vector<double> ones(n, 1.0);
  return diagonal(ones);
}

double SparseOperator::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw InvalidArgument("matrix index out of range");
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

std::vector<double> SparseOperator::diagonal_values() const {
  const std::size_t n = std::min(rows_, cols_);
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i);
  return d;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw InvalidArgument("dimension mismatch in multiply");
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sum += values_[k] * x[columns_[k]];
    y[i] = sum;
  }
}

std::vector<double> SparseOperator::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  multiply(x, y);
  return y;
}

std::vector<double> SparseOperator::column_sums() const {
  std::vector<double> s(cols_, 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) s[columns_[k]] += values_[k];
  return s;
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) t.push_back({i, columns_[k], values_[k]});
  }
  return t;
}

SparseOperator SparseOperator::transpose() const {
  std::vector<Triplet> t = triplets();
  for (Triplet& x : t) std::swap(x.row, x.col);
  return from_triplets(cols_, rows_, std::move(t));
}

std::vector<double> SparseOperator::to_dense() const {
  std::vector<double> d(rows_ * cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) d[i * cols_ + columns_[k]] = values_[k];
  }
  return d;
}

void SparseOperator::write_coordinate(const std::filesystem::path& path) const {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      std::fprintf(f.get(), "%zu %zu %.17g\n", i, columns_[k], values_[k]);
    }
  }
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("dimension mismatch in sum");
  std::vector<Triplet> t = a.triplets();
  std::vector<Triplet> tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  return SparseOperator::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseOperator operator*(double s, const SparseOperator& a) {
  std::vector<Triplet> t = a.triplets();
  for (Triplet& x : t) x.value *= s;
  return SparseOperator::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseOperator kronecker(const SparseOperator& a, const SparseOperator& b) {
  const std::vector<Triplet> ta = a.triplets();
  const std::vector<Triplet> tb = b.triplets();
  std::vector<Triplet> t;
  t.reserve(ta.size() * tb.size());
  for (const Triplet& x : ta) {
    for (const Triplet& y : tb) {
      t.push_back({x.row * b.rows() + y.row, x.col * b.cols() + y.col, x.value * y.value});
    }
  }
  return SparseOperator::from_triplets(a.rows() * b.rows(), a.cols() * b.cols(), std::move(t));
}

}  // namespace voxquad
