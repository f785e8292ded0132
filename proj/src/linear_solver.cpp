#include "contopt/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <sstream>
#include <vector>

namespace contopt {

struct SpdSolver::Impl {
  Eigen::SimplicialLLT<SparseMatrix> llt;
  SparseMatrix K;
  bool ready = false;
  std::vector<SparseMatrix::StorageIndex> outer, inner;
  bool analyzed = false;
};

SpdSolver::SpdSolver(double tol, int cg_max_iters)
    : impl_(std::make_unique<Impl>()), tol_(tol), cg_max_iters_(cg_max_iters) {}
SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

void SpdSolver::factorize(const SparseMatrix& K_in) {
  if (K_in.rows() != K_in.cols()) throw SolverError("matrix is not square");
  impl_->ready = false;
  impl_->K = K_in;
  SparseMatrix& K = impl_->K;
  K.makeCompressed();
  const auto* o = K.outerIndexPtr();
  const auto* in = K.innerIndexPtr();
  const bool same = impl_->analyzed && impl_->outer.size() == static_cast<size_t>(K.outerSize() + 1) &&
                    impl_->inner.size() == static_cast<size_t>(K.nonZeros()) &&
                    std::equal(impl_->outer.begin(), impl_->outer.end(), o) &&
                    std::equal(impl_->inner.begin(), impl_->inner.end(), in);
  if (!same) {
    impl_->llt.analyzePattern(K);
    impl_->outer.assign(o, o + K.outerSize() + 1);
    impl_->inner.assign(in, in + K.nonZeros());
    impl_->analyzed = true;
  }
  impl_->llt.factorize(K);
  if (impl_->llt.info() != Eigen::Success) {
    throw SolverError("Cholesky factorization failed: matrix is not positive definite");
  }
  impl_->ready = true;
}

Vector SpdSolver::solve(const Vector& F) const {
  if (!impl_->ready) throw SolverError("solve called before factorize");
  const SparseMatrix& K = impl_->K;
  used_fallback_ = false;
  const double fnorm = F.norm();
  if (fnorm == 0.0) return Vector::Zero(F.size());
  Vector x = impl_->llt.solve(F);
  double res = (K * x - F).norm();
  if (res <= tol_ * fnorm) return x;
  // One step of iterative refinement usually recovers the lost digits.
  x += impl_->llt.solve(F - K * x);
  res = (K * x - F).norm();
  if (res <= tol_ * fnorm) return x;

  used_fallback_ = true;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(tol_);
  cg.setMaxIterations(cg_max_iters_);
  cg.compute(K);
  Vector y = cg.solveWithGuess(F, x);
  const double res_cg = (K * y - F).norm();
  if (res_cg <= tol_ * fnorm) return y;
  std::ostringstream os;
  os << "linear solve missed tolerance " << tol_ << ": relative residual " << std::min(res, res_cg) / fnorm
     << " after Cholesky and " << cg.iterations() << " CG iterations";
  throw SolverError(os.str());
}

Eigen::MatrixXd SpdSolver::solve_columns(const Eigen::MatrixXd& B) const {
  if (!impl_->ready) throw SolverError("solve called before factorize");
  return impl_->llt.solve(B);
}

Vector solve_spd(const SparseMatrix& K, const Vector& F, double tol) {
  SpdSolver s(tol);
  s.factorize(K);
  return s.solve(F);
}

}  // namespace contopt
