#pragma once

#include <array>
#include <vector>

namespace contopt {

// Points in barycentric coordinates, weights summing to 1 (multiply by area).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

// Points on [0,1], weights summing to 1 (multiply by length).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

// Smallest available symmetric rule exact for the given degree (max 5).
const TriangleRule& triangle_rule(int degree);
// Gauss-Legendre with the given number of points (1..5).
const LineRule& gauss_line_rule(int npoints);

}  // namespace contopt
