#include "contopt/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace contopt {

namespace {

TriangleRule make_deg1() { return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0}, 1}; }

TriangleRule make_deg2() {
  const double a = 2.0 / 3, b = 1.0 / 6;
  return {{{a, b, b}, {b, a, b}, {b, b, a}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2};
}

// Dunavant 6-point rule.
TriangleRule make_deg4() {
  const double a1 = 0.108103018168070, b1 = 0.445948490915965;
  const double a2 = 0.816847572980459, b2 = 0.091576213509771;
  const double w1 = 0.223381589678011, w2 = 0.109951743655322;
  return {{{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1}, {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}},
          {w1, w1, w1, w2, w2, w2},
          4};
}

// Radon 7-point rule.
TriangleRule make_deg5() {
  const double s = std::sqrt(15.0);
  const double a1 = (9.0 - 2 * s) / 21, b1 = (6.0 + s) / 21;
  const double a2 = (9.0 + 2 * s) / 21, b2 = (6.0 - s) / 21;
  const double w1 = (155.0 + s) / 1200, w2 = (155.0 - s) / 1200;
  return {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
           {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
           {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}},
          {9.0 / 40, w1, w1, w1, w2, w2, w2},
          5};
}

LineRule gauss(int n) {
  static const double x2 = 1.0 / std::sqrt(3.0);
  static const double x3 = std::sqrt(0.6);
  const double x4a = std::sqrt(3.0 / 7 - 2.0 / 7 * std::sqrt(1.2));
  const double x4b = std::sqrt(3.0 / 7 + 2.0 / 7 * std::sqrt(1.2));
  const double w4a = (18.0 + std::sqrt(30.0)) / 36, w4b = (18.0 - std::sqrt(30.0)) / 36;
  const double x5a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7)) / 3;
  const double x5b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7)) / 3;
  const double w5a = (322.0 + 13 * std::sqrt(70.0)) / 900, w5b = (322.0 - 13 * std::sqrt(70.0)) / 900;
  std::vector<double> xs, ws;
  switch (n) {
    case 1: xs = {0.0}; ws = {2.0}; break;
    case 2: xs = {-x2, x2}; ws = {1.0, 1.0}; break;
    case 3: xs = {-x3, 0.0, x3}; ws = {5.0 / 9, 8.0 / 9, 5.0 / 9}; break;
    case 4: xs = {-x4b, -x4a, x4a, x4b}; ws = {w4b, w4a, w4a, w4b}; break;
    case 5: xs = {-x5b, -x5a, 0.0, x5a, x5b}; ws = {w5b, w5a, 128.0 / 225, w5a, w5b}; break;
    default: throw std::invalid_argument("Gauss-Legendre rule supports 1..5 points");
  }
  LineRule r;
  r.degree = 2 * n - 1;
  for (size_t i = 0; i < xs.size(); ++i) {
    r.points.push_back(0.5 * (xs[i] + 1.0));
    r.weights.push_back(0.5 * ws[i]);
  }
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const TriangleRule r1 = make_deg1(), r2 = make_deg2(), r4 = make_deg4(), r5 = make_deg5();
  if (degree <= 1) return r1;
  if (degree == 2) return r2;
  if (degree <= 4) return r4;
  if (degree == 5) return r5;
  throw std::invalid_argument("no triangle rule above degree 5");
}

const LineRule& gauss_line_rule(int npoints) {
  static const LineRule rules[5] = {gauss(1), gauss(2), gauss(3), gauss(4), gauss(5)};
  if (npoints < 1 || npoints > 5) throw std::invalid_argument("Gauss-Legendre rule supports 1..5 points");
  return rules[npoints - 1];
}

}  // namespace contopt
