#pragma once

#include <memory>

#include "contopt/types.hpp"

namespace contopt {

// Sparse Cholesky with a preconditioned CG fallback. The symbolic analysis is
// reused while the sparsity pattern stays the same.
class SpdSolver {
 public:
  explicit SpdSolver(double tol = 1e-12, int cg_max_iters = 20000);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  // Throws SolverError when K is not positive definite.
  void factorize(const SparseMatrix& K);
  // Throws SolverError with the achieved residual when the tolerance is missed.
  Vector solve(const Vector& F) const;
  // Plain factor solve for many right-hand sides, no residual checks.
  Eigen::MatrixXd solve_columns(const Eigen::MatrixXd& B) const;

  bool used_fallback() const { return used_fallback_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double tol_;
  int cg_max_iters_;
  mutable bool used_fallback_ = false;
};

Vector solve_spd(const SparseMatrix& K, const Vector& F, double tol = 1e-12);

}  // namespace contopt
