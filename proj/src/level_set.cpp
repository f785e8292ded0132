#include "contopt/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace contopt {

GridSpec GridSpec::covering(double x0, double y0, double x1, double y1, int cells_x, int cells_y) {
  if (cells_x < 2 || cells_y < 2 || !(x1 > x0) || !(y1 > y0)) throw DomainError("grid needs at least 2x2 cells");
  const double hx = (x1 - x0) / cells_x, hy = (y1 - y0) / cells_y;
  if (std::abs(hx - hy) > 1e-9 * std::max(hx, hy)) throw DomainError("grid cells must be square");
  GridSpec g;
  g.nx = cells_x + 1;
  g.ny = cells_y + 1;
  g.origin = Vec2(x0, y0);
  g.spacing = hx;
  return g;
}

LevelSetField::LevelSetField(const GridSpec& grid, std::vector<double> values) : grid_(grid), phi_(std::move(values)) {
  if (static_cast<int>(phi_.size()) != grid_.size()) throw DomainError("level-set values do not match the grid");
}

namespace {

int mirror_index(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

double LevelSetField::mirrored(int i, int j) const {
  return phi_[grid_.index(mirror_index(i, grid_.nx), mirror_index(j, grid_.ny))];
}

double LevelSetField::value(const Vec2& x) const {
  const double h = grid_.spacing;
  const double fx = std::clamp((x.x() - grid_.origin.x()) / h, 0.0, static_cast<double>(grid_.nx - 1));
  const double fy = std::clamp((x.y() - grid_.origin.y()) / h, 0.0, static_cast<double>(grid_.ny - 1));
  const int i = std::min(static_cast<int>(fx), grid_.nx - 2);
  const int j = std::min(static_cast<int>(fy), grid_.ny - 2);
  const double s = fx - i, t = fy - j;
  return (1 - s) * (1 - t) * at(i, j) + s * (1 - t) * at(i + 1, j) + (1 - s) * t * at(i, j + 1) + s * t * at(i + 1, j + 1);
}

Vec2 LevelSetField::node_gradient(int i, int j) const {
  const double h2 = 2.0 * grid_.spacing;
  return Vec2((mirrored(i + 1, j) - mirrored(i - 1, j)) / h2, (mirrored(i, j + 1) - mirrored(i, j - 1)) / h2);
}

Vec2 LevelSetField::gradient(const Vec2& x) const {
  const double h = grid_.spacing;
  const double fx = std::clamp((x.x() - grid_.origin.x()) / h, 0.0, static_cast<double>(grid_.nx - 1));
  const double fy = std::clamp((x.y() - grid_.origin.y()) / h, 0.0, static_cast<double>(grid_.ny - 1));
  const int i = std::min(static_cast<int>(fx), grid_.nx - 2);
  const int j = std::min(static_cast<int>(fy), grid_.ny - 2);
  const double s = fx - i, t = fy - j;
  return (1 - s) * (1 - t) * node_gradient(i, j) + s * (1 - t) * node_gradient(i + 1, j) +
         (1 - s) * t * node_gradient(i, j + 1) + s * t * node_gradient(i + 1, j + 1);
}

double LevelSetField::node_curvature(int i, int j) const {
  const double h = grid_.spacing;
  const double c = at(i, j);
  const double px = (mirrored(i + 1, j) - mirrored(i - 1, j)) / (2 * h);
  const double py = (mirrored(i, j + 1) - mirrored(i, j - 1)) / (2 * h);
  const double pxx = (mirrored(i + 1, j) - 2 * c + mirrored(i - 1, j)) / (h * h);
  const double pyy = (mirrored(i, j + 1) - 2 * c + mirrored(i, j - 1)) / (h * h);
  const double pxy = (mirrored(i + 1, j + 1) - mirrored(i + 1, j - 1) - mirrored(i - 1, j + 1) +
                      mirrored(i - 1, j - 1)) / (4 * h * h);
  const double g2 = px * px + py * py;
  if (g2 < 1e-16) {
    std::ostringstream os;
    os << "vanishing level-set gradient at node (" << i << "," << j << ")";
    throw ReinitializationRequired(os.str());
  }
  return (pxx * py * py - 2 * px * py * pxy + pyy * px * px) / std::pow(g2, 1.5);
}

double LevelSetField::curvature(const Vec2& x) const {
  if (gradient(x).norm() < 1e-8) throw ReinitializationRequired("vanishing level-set gradient");
  const double h = grid_.spacing;
  const double fx = std::clamp((x.x() - grid_.origin.x()) / h, 0.0, static_cast<double>(grid_.nx - 1));
  const double fy = std::clamp((x.y() - grid_.origin.y()) / h, 0.0, static_cast<double>(grid_.ny - 1));
  const int i = std::min(static_cast<int>(fx), grid_.nx - 2);
  const int j = std::min(static_cast<int>(fy), grid_.ny - 2);
  const double s = fx - i, t = fy - j;
  return (1 - s) * (1 - t) * node_curvature(i, j) + s * (1 - t) * node_curvature(i + 1, j) +
         (1 - s) * t * node_curvature(i, j + 1) + s * t * node_curvature(i + 1, j + 1);
}

bool LevelSetField::has_inside() const {
  return std::any_of(phi_.begin(), phi_.end(), [](double v) { return v < 0.0; });
}

bool LevelSetField::has_outside() const {
  return std::any_of(phi_.begin(), phi_.end(), [](double v) { return v > 0.0; });
}

std::pair<double, double> LevelSetField::band_gradient_range(double band) const {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  // Border nodes are skipped: the mirror condition forces a zero normal
  // derivative there.
  for (int j = 1; j < grid_.ny - 1; ++j) {
    for (int i = 1; i < grid_.nx - 1; ++i) {
      if (std::abs(at(i, j)) > band) continue;
      const double g = node_gradient(i, j).norm();
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
  }
  if (hi == 0.0 && lo == std::numeric_limits<double>::infinity()) return {1.0, 1.0};
  return {lo, hi};
}

double LevelSetField::band_gradient_deviation(double band) const {
  const auto [lo, hi] = band_gradient_range(band);
  return std::max(std::abs(lo - 1.0), std::abs(hi - 1.0));
}

ShapeDescription perforated_box(const Vec2& lower, const Vec2& upper, int rows, int cols, double radius) {
  ShapeDescription s;
  s.has_box = true;
  s.box_lower = lower;
  s.box_upper = upper;
  const Vec2 size = upper - lower;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      s.holes.push_back({lower + Vec2((c + 0.5) * size.x() / cols, (r + 0.5) * size.y() / rows), radius});
    }
  }
  return s;
}

double shape_distance(const ShapeDescription& shape, const GridSpec& grid, const Vec2& x) {
  const double h = grid.spacing;
  Vec2 lo = shape.has_box ? shape.box_lower : grid.origin;
  Vec2 hi = shape.has_box ? shape.box_upper : grid.upper();
  const double tol = 1e-9 * h;
  if (lo.x() <= grid.origin.x() + tol) lo.x() -= h;
  if (lo.y() <= grid.origin.y() + tol) lo.y() -= h;
  if (hi.x() >= grid.upper().x() - tol) hi.x() += h;
  if (hi.y() >= grid.upper().y() - tol) hi.y() += h;
  const Vec2 c = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const Vec2 q = (x - c).cwiseAbs() - half;
  double phi = q.cwiseMax(0.0).norm() + std::min(std::max(q.x(), q.y()), 0.0);
  for (const auto& hole : shape.holes) phi = std::max(phi, hole.radius - (x - hole.center).norm());
  return phi;
}

LevelSetField init_signed_distance(const ShapeDescription& shape, const GridSpec& grid, int reinit_iters) {
  for (const auto& hole : shape.holes) {
    if (!(hole.radius > 0.0)) throw DomainError("hole radius must be positive");
  }
  std::vector<double> v(grid.size());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) v[grid.index(i, j)] = shape_distance(shape, grid, grid.node(i, j));
  }
  LevelSetField phi(grid, std::move(v));
  if (!phi.has_inside()) throw DomainError("degenerate shape: no material node");
  if (reinit_iters > 0 && phi.has_outside()) reinitialize(phi, reinit_iters);
  return phi;
}

namespace {

struct OneSided {
  double xm, xp, ym, yp;  // backward and forward differences
};

OneSided eno2(int i, int j, double h, auto&& get) {
  auto d2 = [&](int a, int b, int da, int db) {
    return (get(a + da, b + db) - 2 * get(a, b) + get(a - da, b - db)) / (h * h);
  };
  OneSided o;
  const double c = get(i, j);
  o.xm = (c - get(i - 1, j)) / h + 0.5 * h * minmod(d2(i - 1, j, 1, 0), d2(i, j, 1, 0));
  o.xp = (get(i + 1, j) - c) / h - 0.5 * h * minmod(d2(i, j, 1, 0), d2(i + 1, j, 1, 0));
  o.ym = (c - get(i, j - 1)) / h + 0.5 * h * minmod(d2(i, j - 1, 0, 1), d2(i, j, 0, 1));
  o.yp = (get(i, j + 1) - c) / h - 0.5 * h * minmod(d2(i, j, 0, 1), d2(i, j + 1, 0, 1));
  return o;
}

// Godunov approximation of |grad phi| for a front moving with speed sign s.
double godunov_norm(const OneSided& d, double s) {
  double gx, gy;
  if (s > 0.0) {
    gx = std::max(std::pow(std::max(d.xm, 0.0), 2), std::pow(std::min(d.xp, 0.0), 2));
    gy = std::max(std::pow(std::max(d.ym, 0.0), 2), std::pow(std::min(d.yp, 0.0), 2));
  } else {
    gx = std::max(std::pow(std::min(d.xm, 0.0), 2), std::pow(std::max(d.xp, 0.0), 2));
    gy = std::max(std::pow(std::min(d.ym, 0.0), 2), std::pow(std::max(d.yp, 0.0), 2));
  }
  return std::sqrt(gx + gy);
}

template <class Rate>
void heun_step(LevelSetField& phi, double dt, const Rate& rate) {
  const GridSpec& g = phi.grid();
  std::vector<double> r(g.size());
  const std::vector<double> start = phi.values();
  for (int stage = 0; stage < 2; ++stage) {
    const LevelSetField& cur = phi;
    auto get = [&](int a, int b) {
      return cur.values()[g.index(mirror_index(a, g.nx), mirror_index(b, g.ny))];
    };
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) r[g.index(i, j)] = rate(i, j, eno2(i, j, g.spacing, get), get);
    }
    auto& v = phi.values();
    for (int k = 0; k < g.size(); ++k) v[k] += dt * r[k];
    if (stage == 1) {
      for (int k = 0; k < g.size(); ++k) v[k] = 0.5 * (start[k] + v[k]);
    }
  }
  for (double v : phi.values()) {
    if (!std::isfinite(v)) throw NumericalError("level-set update produced a non-finite value");
  }
}

}  // namespace

int advect(LevelSetField& phi, const std::vector<double>& theta, double T, double cfl) {
  const GridSpec& g = phi.grid();
  if (static_cast<int>(theta.size()) != g.size()) throw DomainError("velocity does not match the level-set grid");
  if (!(T >= 0.0)) throw DomainError("advection time must be nonnegative");
  double vmax = 0.0;
  for (double v : theta) {
    if (!std::isfinite(v)) throw NumericalError("non-finite velocity");
    vmax = std::max(vmax, std::abs(v));
  }
  if (vmax == 0.0 || T == 0.0) return 0;
  const double dt_max = cfl * g.spacing / vmax;
  const int steps = static_cast<int>(std::ceil(T / dt_max - 1e-12));
  const double dt = T / steps;
  for (int n = 0; n < steps; ++n) {
    heun_step(phi, dt, [&](int i, int j, const OneSided& d, auto&&) {
      const double v = theta[g.index(i, j)];
      return v == 0.0 ? 0.0 : -v * godunov_norm(d, v);
    });
  }
  return steps;
}

double zero_level_drift(const LevelSetField& before, const LevelSetField& after) {
  const GridSpec& g = before.grid();
  double drift = 0.0;
  auto edge = [&](int a, int b) {
    const double p0 = before.values()[a], p1 = before.values()[b];
    const double q0 = after.values()[a], q1 = after.values()[b];
    if ((p0 < 0.0) == (p1 < 0.0) || (q0 < 0.0) == (q1 < 0.0)) return;
    drift = std::max(drift, std::abs(p0 / (p0 - p1) - q0 / (q0 - q1)));
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i + 1 < g.nx) edge(g.index(i, j), g.index(i + 1, j));
      if (j + 1 < g.ny) edge(g.index(i, j), g.index(i, j + 1));
    }
  }
  return drift;
}

ReinitReport reinitialize(LevelSetField& phi, int iterations, double max_drift) {
  const GridSpec& g = phi.grid();
  const double h = g.spacing;
  if (!phi.has_inside() || !phi.has_outside()) throw DomainError("reinitialization needs a non-degenerate field");
  const LevelSetField phi0 = phi;
  auto p0 = [&](int a, int b) { return phi0.values()[g.index(mirror_index(a, g.nx), mirror_index(b, g.ny))]; };

  // Nodes next to the interface keep the distance estimate of phi0.
  std::vector<char> near(g.size(), 0);
  std::vector<double> D(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = p0(i, j);
      const double l = p0(i - 1, j), r = p0(i + 1, j), b = p0(i, j - 1), t = p0(i, j + 1);
      if (c * l > 0 && c * r > 0 && c * b > 0 && c * t > 0) continue;
      const double dx = std::max({std::abs(r - l) / 2, std::abs(r - c), std::abs(c - l), 1e-12 * h});
      const double dy = std::max({std::abs(t - b) / 2, std::abs(t - c), std::abs(c - b), 1e-12 * h});
      near[g.index(i, j)] = 1;
      D[g.index(i, j)] = h * c / std::sqrt(dx * dx + dy * dy);
    }
  }
  const double dtau = 0.5 * h;
  for (int n = 0; n < iterations; ++n) {
    heun_step(phi, dtau, [&](int i, int j, const OneSided& d, auto&& get) {
      const int k = g.index(i, j);
      const double c0 = phi0.values()[k];
      if (near[k]) {
        const double sgn = (c0 > 0.0) - (c0 < 0.0);
        return -(sgn * std::abs(get(i, j)) - D[k]) / h;
      }
      const double S = c0 / std::sqrt(c0 * c0 + h * h);
      return -S * (godunov_norm(d, S) - 1.0);
    });
  }
  ReinitReport rep;
  rep.iterations = iterations;
  rep.max_drift = zero_level_drift(phi0, phi);
  if (rep.max_drift > max_drift) {
    std::ostringstream os;
    os << "reinitialization moved the zero level by " << rep.max_drift << " cells";
    throw NumericalError(os.str());
  }
  return rep;
}

}  // namespace contopt
