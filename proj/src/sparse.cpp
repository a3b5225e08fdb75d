#include "dgair/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "dgair/error.hpp"

namespace dgair {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= rows || static_cast<std::size_t>(t.col) >= cols)
      throw InvalidArgument("triplet index out of range");
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  SparseMatrix m(rows, cols);
  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < triplets.size() && static_cast<std::size_t>(triplets[i].row) == r) {
      const int col = triplets[i].col;
      double sum = 0.0;
      while (i < triplets.size() && static_cast<std::size_t>(triplets[i].row) == r && triplets[i].col == col) {
        sum += triplets[i].value;
        ++i;
      }
      m.col_indices_.push_back(col);
      m.values_.push_back(sum);
    }
    m.row_offsets_[r + 1] = static_cast<int>(m.values_.size());
  }
  return m;
}

void SparseMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(x.size()) != cols_) throw InvalidArgument("matrix-vector dimension mismatch");
  y.resize(static_cast<Eigen::Index>(rows_));
  for (std::size_t r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) sum += values_[k] * x[col_indices_[k]];
    y[static_cast<Eigen::Index>(r)] = sum;
  }
}

Eigen::VectorXd SparseMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  multiply(x, y);
  return y;
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j)) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) d(static_cast<Eigen::Index>(r), col_indices_[k]) = values_[k];
  return d;
}

Eigen::MatrixXd SparseMatrix::diagonal_block(std::size_t start, std::size_t size) const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t r = start; r < start + size; ++r) {
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const auto c = static_cast<std::size_t>(col_indices_[k]);
      if (c >= start && c < start + size)
        b(static_cast<Eigen::Index>(r - start), static_cast<Eigen::Index>(c - start)) = values_[k];
    }
  }
  return b;
}

SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("matrix dimension mismatch");
  std::vector<Triplet> trips;
  trips.reserve(a.nnz() + b.nnz());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (int k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k)
      trips.push_back({static_cast<int>(r), a.col_indices()[k], alpha * a.values()[k]});
    for (int k = b.row_offsets()[r]; k < b.row_offsets()[r + 1]; ++k)
      trips.push_back({static_cast<int>(r), b.col_indices()[k], beta * b.values()[k]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(trips));
}

double max_asymmetry(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("asymmetry of a non-square matrix");
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (int k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k) {
      const auto c = static_cast<std::size_t>(a.col_indices()[k]);
      worst = std::max(worst, std::abs(a.values()[k] - a.coeff(c, r)));
    }
  }
  return worst;
}

double quadratic_form(const SparseMatrix& a, const Eigen::VectorXd& v) { return bilinear_form(a, v, v); }

double bilinear_form(const SparseMatrix& a, const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(w.size()) != a.cols() || static_cast<std::size_t>(v.size()) != a.rows())
    throw InvalidArgument("bilinear form dimension mismatch");
  return v.dot(a * w);
}

}  // namespace dgair
