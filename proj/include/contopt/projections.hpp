#pragma once

// Projections onto R+ and onto the closed ball of radius alpha, with their
// generalized and directional derivatives.
//
// Tangent vectors are Eigen column vectors of size N = d - 1. The planar code
// only instantiates N = 1 (Tangent below), but the formulas are written for
// general N.

#include <cmath>

#include "contopt/types.hpp"

namespace contopt {

constexpr int kDim = 2;
constexpr int kTangentDim = kDim - 1;

template <int N>
using TangentVec = Eigen::Matrix<double, N, 1>;
using Tangent = TangentVec<kTangentDim>;

inline double pmax(double y) { return y > 0.0 ? y : 0.0; }

// Directional derivative of max(0, .) at u in direction v.
inline double dmax(double u, double v) {
  if (u < 0.0) return 0.0;
  if (u == 0.0) return pmax(v);
  return v;
}

// H(0) = 0: ties go to the inactive branch.
inline double heaviside(double y) { return y > 0.0 ? 1.0 : 0.0; }

namespace detail {
void require_positive_alpha(double alpha);
}

template <int N>
TangentVec<N> qproj(double alpha, const TangentVec<N>& z) {
  detail::require_positive_alpha(alpha);
  const double nz = z.norm();
  if (nz <= alpha) return z;
  return (alpha / nz) * z;
}

template <int N>
TangentVec<N> dq(double alpha, const TangentVec<N>& z, double beta, const TangentVec<N>& h) {
  detail::require_positive_alpha(alpha);
  const double nz = z.norm();
  if (nz < alpha) return h;
  const TangentVec<N> e = z / nz;
  if (nz == alpha) return h - pmax(h.dot(e) - beta) * e;
  return (alpha / nz) * (h - h.dot(e) * e) + beta * e;
}

enum class BallRegion { JMinus, JZero, JPlus };

template <int N>
struct BallJacobian {
  BallRegion region;
  TangentVec<N> d_alpha;
  Eigen::Matrix<double, N, N> d_z;
};

template <int N>
BallJacobian<N> ball_jacobian(double alpha, const TangentVec<N>& z, double tie_tol = 1e-12) {
  detail::require_positive_alpha(alpha);
  if (tie_tol < 0.0) throw DomainError("ball_jacobian: negative tie tolerance");
  const double nz = z.norm();
  BallJacobian<N> jac;
  if (std::abs(nz - alpha) <= tie_tol * alpha) {
    jac.region = BallRegion::JZero;
  } else {
    jac.region = nz < alpha ? BallRegion::JMinus : BallRegion::JPlus;
  }
  if (jac.region == BallRegion::JPlus) {
    const TangentVec<N> e = z / nz;
    jac.d_alpha = e;
    jac.d_z = (alpha / nz) * (Eigen::Matrix<double, N, N>::Identity() - e * e.transpose());
  } else {
    // J0 shares the sticking Jacobian.
    jac.d_alpha.setZero();
    jac.d_z.setIdentity();
  }
  return jac;
}

// Scalar conveniences for the planar tangent.
inline double qproj(double alpha, double z) { return qproj<1>(alpha, Tangent(z))(0); }
inline double dq(double alpha, double z, double beta, double h) {
  return dq<1>(alpha, Tangent(z), beta, Tangent(h))(0);
}
inline BallJacobian<1> ball_jacobian(double alpha, double z, double tie_tol = 1e-12) {
  return ball_jacobian<1>(alpha, Tangent(z), tie_tol);
}

const char* to_string(BallRegion r);

}  // namespace contopt
