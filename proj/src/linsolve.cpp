#include "dgair/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dgair/error.hpp"

namespace dgair {

BlockFactorization::BlockFactorization(const SparseMatrix& matrix, std::size_t block_size) : block_size_(block_size) {
  if (block_size == 0 || matrix.rows() % block_size != 0 || matrix.rows() != matrix.cols())
    throw InvalidArgument("matrix does not split into square blocks of the given size");
  const std::size_t nb = matrix.rows() / block_size;
  blocks_.reserve(nb);
  factors_.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    blocks_.push_back(matrix.diagonal_block(b * block_size, block_size));
    factors_.emplace_back(blocks_.back());
    if (factors_.back().info() != Eigen::Success)
      throw NumericalError("mass block " + std::to_string(b) + " is not symmetric positive definite");
  }
}

Eigen::VectorXd BlockFactorization::solve(const Eigen::VectorXd& rhs) const {
  if (static_cast<std::size_t>(rhs.size()) != block_size_ * factors_.size())
    throw InvalidArgument("right-hand side length does not match the factorization");
  Eigen::VectorXd x(rhs.size());
  const auto n = static_cast<Eigen::Index>(block_size_);
  for (std::size_t b = 0; b < factors_.size(); ++b) {
    const auto off = static_cast<Eigen::Index>(b * block_size_);
    x.segment(off, n) = factors_[b].solve(rhs.segment(off, n));
  }
  return x;
}

double BlockFactorization::max_reconstruction_error() const {
  double worst = 0.0;
  for (std::size_t b = 0; b < factors_.size(); ++b) {
    const Eigen::MatrixXd l = factors_[b].matrixL();
    worst = std::max(worst, (l * l.transpose() - blocks_[b]).norm() / blocks_[b].norm());
  }
  return worst;
}

double BlockFactorization::max_condition_number() const {
  double worst = 0.0;
  for (const auto& block : blocks_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    worst = std::max(worst, ev.maxCoeff() / ev.minCoeff());
  }
  return worst;
}

Eigen::VectorXd block_solve(const BlockFactorization& factorization, const Eigen::VectorXd& rhs) {
  return factorization.solve(rhs);
}

BlockJacobi::BlockJacobi(const SparseMatrix& matrix, std::size_t block_size) : block_size_(block_size) {
  if (block_size == 0 || matrix.rows() % block_size != 0 || matrix.rows() != matrix.cols())
    throw InvalidArgument("matrix does not split into square blocks of the given size");
  const std::size_t nb = matrix.rows() / block_size;
  factors_.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) factors_.emplace_back(matrix.diagonal_block(b * block_size, block_size));
}

Eigen::VectorXd BlockJacobi::apply(const Eigen::VectorXd& r) const {
  Eigen::VectorXd z(r.size());
  const auto n = static_cast<Eigen::Index>(block_size_);
  for (std::size_t b = 0; b < factors_.size(); ++b) {
    const auto off = static_cast<Eigen::Index>(b * block_size_);
    z.segment(off, n) = factors_[b].solve(r.segment(off, n));
  }
  return z;
}

namespace {

KrylovResult conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, const BlockJacobi& pc,
                                double tol, std::size_t cap, Eigen::VectorXd x, double bnorm) {
  KrylovResult res;
  res.method = KrylovMethod::cg;
  Eigen::VectorXd r, z, p;
  Eigen::VectorXd ap(b.size());
  std::size_t it = 0;
  double rel = 0.0;
  for (;;) {
    r = b - a * x;
    rel = r.norm() / bnorm;
    if (rel <= tol || it >= cap) break;
    z = pc.apply(r);
    p = z;
    double rz = r.dot(z);
    while (it < cap) {
      a.multiply(p, ap);
      const double alpha = rz / p.dot(ap);
      x += alpha * p;
      r -= alpha * ap;
      ++it;
      if (r.norm() / bnorm <= tol) break;
      z = pc.apply(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
  }
  res.x = std::move(x);
  res.iterations = it;
  res.relative_residual = rel;
  return res;
}

KrylovResult bicgstab(const SparseMatrix& a, const Eigen::VectorXd& b, const BlockJacobi& pc, double tol,
                      std::size_t cap, Eigen::VectorXd x, double bnorm) {
  KrylovResult res;
  res.method = KrylovMethod::bicgstab;
  Eigen::VectorXd r, r_hat, p, v;
  Eigen::VectorXd s(b.size()), t(b.size()), y(b.size()), zv(b.size());
  std::size_t it = 0;
  double rel = 0.0;
  // The outer loop restarts from the true residual whenever the recursively
  // updated one has drifted or the shadow residual broke down.
  for (;;) {
    r = b - a * x;
    rel = r.norm() / bnorm;
    if (rel <= tol || it >= cap) break;
    r_hat = r;
    p = Eigen::VectorXd::Zero(b.size());
    v = Eigen::VectorXd::Zero(b.size());
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    while (it < cap) {
      const double rho_next = r_hat.dot(r);
      if (std::abs(rho_next) < 1e-300 * bnorm * bnorm) break;
      const double beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
      p = r + beta * (p - omega * v);
      y = pc.apply(p);
      a.multiply(y, v);
      alpha = rho / r_hat.dot(v);
      s = r - alpha * v;
      x += alpha * y;
      ++it;
      if (s.norm() / bnorm <= tol) break;
      zv = pc.apply(s);
      a.multiply(zv, t);
      const double tt = t.dot(t);
      if (tt == 0.0) break;
      omega = t.dot(s) / tt;
      x += omega * zv;
      r = s - omega * t;
      if (r.norm() / bnorm <= tol || omega == 0.0) break;
    }
  }
  res.x = std::move(x);
  res.iterations = it;
  res.relative_residual = rel;
  return res;
}

bool is_symmetric(const SparseMatrix& a) { return max_asymmetry(a) <= 1e-12 * a.max_abs(); }

}  // namespace

KrylovResult krylov_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, const BlockJacobi& preconditioner,
                          const KrylovOptions& options, const Eigen::VectorXd* guess) {
  if (matrix.rows() != matrix.cols() || static_cast<std::size_t>(rhs.size()) != matrix.rows())
    throw InvalidArgument("Krylov solve needs a square system matching the right-hand side");
  if (!(options.tolerance > 0.0)) throw InvalidArgument("Krylov tolerance must be positive");
  const double bnorm = options.reference_norm > 0.0 ? options.reference_norm : rhs.norm();
  if (bnorm == 0.0 || (!guess && rhs.norm() <= options.tolerance * bnorm)) {
    KrylovResult zero;
    zero.x = Eigen::VectorXd::Zero(rhs.size());
    zero.relative_residual = bnorm == 0.0 ? 0.0 : rhs.norm() / bnorm;
    return zero;
  }
  const std::size_t cap = options.max_iterations > 0 ? options.max_iterations : 10 * matrix.rows();
  Eigen::VectorXd x0 = guess ? *guess : Eigen::VectorXd::Zero(rhs.size());
  KrylovMethod method = options.method;
  if (method == KrylovMethod::automatic) method = is_symmetric(matrix) ? KrylovMethod::cg : KrylovMethod::bicgstab;

  KrylovResult res = method == KrylovMethod::cg ? conjugate_gradient(matrix, rhs, preconditioner, options.tolerance, cap, x0, bnorm)
                                                : bicgstab(matrix, rhs, preconditioner, options.tolerance, cap, x0, bnorm);
  if (!(res.relative_residual <= options.tolerance)) {
    throw NumericalError("Krylov solve did not converge in " + std::to_string(res.iterations) +
                         " iterations (relative residual " + std::to_string(res.relative_residual) + ")");
  }
  return res;
}

}  // namespace dgair
