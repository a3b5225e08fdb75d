#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dgair/sparse.hpp"

namespace dgair {

/// Cholesky factors of the diagonal blocks of a block-diagonal SPD matrix.
class BlockFactorization {
 public:
  BlockFactorization() = default;
  /// Throws NumericalError when a block is not symmetric positive definite.
  BlockFactorization(const SparseMatrix& matrix, std::size_t block_size);

  std::size_t block_size() const { return block_size_; }
  std::size_t num_blocks() const { return factors_.size(); }
  const Eigen::MatrixXd& block(std::size_t b) const { return blocks_[b]; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// Largest relative reconstruction error ||L L^T - M_b|| / ||M_b|| over all blocks.
  double max_reconstruction_error() const;
  /// Largest 2-norm condition number over all blocks.
  double max_condition_number() const;

 private:
  std::size_t block_size_ = 0;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
};

Eigen::VectorXd block_solve(const BlockFactorization& factorization, const Eigen::VectorXd& rhs);

/// Block-Jacobi preconditioner: LU factors of the diagonal blocks of a square matrix.
class BlockJacobi {
 public:
  BlockJacobi() = default;
  BlockJacobi(const SparseMatrix& matrix, std::size_t block_size);
  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;

 private:
  std::size_t block_size_ = 0;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> factors_;
};

enum class KrylovMethod { automatic, cg, bicgstab };

struct KrylovOptions {
  double tolerance = 1e-10;  ///< relative residual ||b - A x|| / ||b||
  KrylovMethod method = KrylovMethod::automatic;
  std::size_t max_iterations = 0;  ///< 0 selects 10 N
  /// When positive, convergence is ||b - A x|| <= tolerance * reference_norm
  /// (used when solving for a correction to a larger system).
  double reference_norm = 0.0;
};

struct KrylovResult {
  Eigen::VectorXd x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  KrylovMethod method = KrylovMethod::cg;
};

/// Preconditioned CG for symmetric systems, BiCGStab otherwise; `automatic`
/// checks symmetry of the matrix. `guess` is the starting iterate when given.
/// Throws NumericalError when the iteration cap is reached.
KrylovResult krylov_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, const BlockJacobi& preconditioner,
                          const KrylovOptions& options, const Eigen::VectorXd* guess = nullptr);

}  // namespace dgair
