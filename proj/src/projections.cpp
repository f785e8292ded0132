#include "contopt/projections.hpp"

#include <string>

namespace contopt {

namespace detail {
void require_positive_alpha(double alpha) {
  if (!(alpha > 0.0)) {
    throw DomainError("ball projection radius must be positive, got " + std::to_string(alpha));
  }
}
}  // namespace detail

const char* to_string(BallRegion r) {
  switch (r) {
    case BallRegion::JMinus: return "J-";
    case BallRegion::JZero: return "J0";
    case BallRegion::JPlus: return "J+";
  }
  return "?";
}

}  // namespace contopt
