#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <stdexcept>
#include <string>

namespace contopt {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Error families. Each carries a readable message; callers branch on type.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EvaluationBandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InadmissibleShape : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReinitializationRequired : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rotate by +90 degrees.
inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

}  // namespace contopt
