#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dgair {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

  /// Duplicates are summed in insertion order, so the result does not depend
  /// on anything but the triplet sequence.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  /// y = A x
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

  /// Entry (i, j), zero when not stored.
  double coeff(std::size_t i, std::size_t j) const;
  double max_abs() const;
  Eigen::MatrixXd to_dense() const;
  /// Dense copy of the square block starting at (start, start).
  Eigen::MatrixXd diagonal_block(std::size_t start, std::size_t size) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<int> row_offsets_;
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

/// alpha * a + beta * b over the union of both patterns.
SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);

/// max |A - A^T| over all entries.
double max_asymmetry(const SparseMatrix& a);

/// v^T A v
double quadratic_form(const SparseMatrix& a, const Eigen::VectorXd& v);
/// v^T A w, i.e. the form a(w, v) for A_ij = a(phi_j, phi_i).
double bilinear_form(const SparseMatrix& a, const Eigen::VectorXd& w, const Eigen::VectorXd& v);

}  // namespace dgair
