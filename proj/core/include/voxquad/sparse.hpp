#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace voxquad {

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::size_t rows, std::size_t cols);
  /// Duplicate entries are summed. Explicit zeros are kept so the sparsity
  /// pattern reflects the assembly graph.
  static SparseOperator from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> triplets);
  static SparseOperator diagonal(std::span<const double> values);
  static SparseOperator identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const std::size_t> column_indices() const noexcept { return columns_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal_values() const;
  double max_abs() const;

  std::vector<double> multiply(std::span<const double> x) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// Column sums, i.e. 1^T A.
  std::vector<double> column_sums() const;
  std::vector<Triplet> triplets() const;

  SparseOperator transpose() const;
  /// Dense row-major copy.
  std::vector<double> to_dense() const;

  /// `row col value` per line, 0-based, 17 significant digits.
  void write_coordinate(const std::filesystem::path& path) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> columns_;
  std::vector<double> values_;
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(double s, const SparseOperator& a);

/// Kronecker product a ⊗ b.
SparseOperator kronecker(const SparseOperator& a, const SparseOperator& b);

}  // namespace voxquad
