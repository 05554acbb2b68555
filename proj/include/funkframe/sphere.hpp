#pragma once

// Coordinates, antipodal symmetry, quadrature grids, and great-circle
// parameterization on the unit sphere S^2.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace funkframe {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

/// Thrown when a computation degenerates numerically (as opposed to a
/// validation failure on inputs). The CLI maps this to exit code 2.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cartesian point, claimed to lie on S^2 (unit norm within 1e-12).
struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;

  friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(double s, Point3 p) { return {s * p.x, s * p.y, s * p.z}; }
  friend Point3 operator-(Point3 p) { return {-p.x, -p.y, -p.z}; }
};

inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(Point3 a, Point3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Point3 p) { return std::sqrt(dot(p, p)); }
inline Point3 normalized(Point3 p) {
  double n = norm(p);
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return (1.0 / n) * p;
}

/// Spherical coordinates: lambda in [0, 2pi) (2pi-periodic), theta in [0, pi].
struct SphCoord {
  double lambda = 0.0;
  double theta = 0.0;
};

/// (lambda, theta) -> (cos lambda sin theta, sin lambda sin theta, cos theta).
inline Point3 sph_to_cart(SphCoord c) {
  double st = std::sin(c.theta);
  return {std::cos(c.lambda) * st, std::sin(c.lambda) * st, std::cos(c.theta)};
}

/// Inverse coordinate map; poles return lambda = 0 by convention.
inline SphCoord cart_to_sph(Point3 p) {
  double n = norm(p);
  if (std::abs(n - 1.0) > 1e-8)
    throw std::invalid_argument("cart_to_sph: point is not on the unit sphere (|norm-1| = " +
                                std::to_string(std::abs(n - 1.0)) + ")");
  double z = p.z;
  if (z > 1.0) z = 1.0;
  if (z < -1.0) z = -1.0;
  double theta = std::acos(z);
  double lambda = 0.0;
  if (p.x != 0.0 || p.y != 0.0) {
    lambda = std::atan2(p.y, p.x);
    if (lambda < 0.0) lambda += two_pi;
    if (lambda >= two_pi) lambda = 0.0;
  }
  return {lambda, theta};
}

/// Antipodal map: (lambda, theta) -> (lambda + pi mod 2pi, pi - theta).
inline SphCoord antipode(SphCoord c) {
  double lambda = c.lambda + pi;
  if (lambda >= two_pi) lambda -= two_pi;
  return {lambda, pi - c.theta};
}

/// Orthonormal right-handed frame {u, v, xi} with u, v spanning the plane of
/// the great circle perpendicular to xi.
struct GreatCircleFrame {
  Point3 xi, u, v;
};

/// Deterministic tangent frame: project out xi from the coordinate axis least
/// aligned with it, then v = xi x u.
inline GreatCircleFrame tangent_frame(Point3 xi) {
  double ax = std::abs(xi.x), ay = std::abs(xi.y), az = std::abs(xi.z);
  Point3 e{1.0, 0.0, 0.0};
  if (ay <= ax && ay <= az)
    e = {0.0, 1.0, 0.0};
  else if (az <= ax && az <= ay)
    e = {0.0, 0.0, 1.0};
  Point3 u = normalized(e - dot(e, xi) * xi);
  Point3 v = cross(xi, u);
  return {xi, u, v};
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
/// Newton iteration on the three-term recurrence; no tables.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Initial guess (Chebyshev-like, ascending), then Newton on P_n.
    double t = std::cos(pi * (n - i - 0.25) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int l = 2; l <= n; ++l) {
      double p2 = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

/// Sphere quadrature: nodes, positive weights summing to 4pi, and a
/// polynomial-exactness claim. Product grids keep their separable structure
/// (theta-major node ordering: node i = i_theta * n_lambda + i_lambda) so
/// transforms can use per-order reductions.
struct QuadratureGrid {
  std::vector<Point3> nodes;
  std::vector<SphCoord> sph;
  std::vector<double> weights;
  int exact_degree = 0;

  bool is_product = false;
  int n_theta = 0, n_lambda = 0;
  std::vector<double> gl_x, gl_w;  // cos(theta) rule backing a product grid

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre in cos(theta) tensored with uniform lambda.
/// exact_degree = min(2 n_theta - 1, n_lambda - 1).
inline QuadratureGrid product_grid(int n_theta, int n_lambda) {
  if (n_theta < 1 || n_lambda < 1)
    throw std::invalid_argument("product_grid: n_theta and n_lambda must be >= 1");
  QuadratureGrid g;
  g.is_product = true;
  g.n_theta = n_theta;
  g.n_lambda = n_lambda;
  gauss_legendre(n_theta, g.gl_x, g.gl_w);
  g.exact_degree = std::min(2 * n_theta - 1, n_lambda - 1);
  g.nodes.reserve(std::size_t(n_theta) * n_lambda);
  g.sph.reserve(std::size_t(n_theta) * n_lambda);
  g.weights.reserve(std::size_t(n_theta) * n_lambda);
  double wl = two_pi / n_lambda;
  for (int it = 0; it < n_theta; ++it) {
    double theta = std::acos(g.gl_x[it]);
    for (int il = 0; il < n_lambda; ++il) {
      SphCoord c{two_pi * il / n_lambda, theta};
      g.sph.push_back(c);
      g.nodes.push_back(sph_to_cart(c));
      g.weights.push_back(g.gl_w[it] * wl);
    }
  }
  return g;
}

/// Point-set file: header `design M D`, then M lines `x y z`.
/// Loaded as an equal-weight (Chebyshev-type) grid with weights 4pi/M.
inline QuadratureGrid load_design(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_design: cannot open " + path);
  std::string tag;
  std::size_t m = 0;
  int degree = 0;
  if (!(in >> tag >> m >> degree) || tag != "design")
    throw std::runtime_error("load_design: bad header in " + path +
                             " (expected `design M D`)");
  if (m == 0) throw std::runtime_error("load_design: empty design in " + path);
  QuadratureGrid g;
  g.exact_degree = degree;
  g.nodes.reserve(m);
  g.sph.reserve(m);
  g.weights.assign(m, four_pi / double(m));
  for (std::size_t i = 0; i < m; ++i) {
    Point3 p;
    if (!(in >> p.x >> p.y >> p.z))
      throw std::runtime_error("load_design: truncated node list in " + path);
    if (std::abs(norm(p) - 1.0) > 1e-8)
      throw std::runtime_error("load_design: node " + std::to_string(i) + " in " + path +
                               " is not on the unit sphere");
    g.nodes.push_back(p);
    g.sph.push_back(cart_to_sph(p));
  }
  return g;
}

/// Writes the point-set format above; shortest round-trippable decimals, so a
/// save-then-load cycle reproduces the nodes bit-exactly.
inline void save_design(const QuadratureGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_design: cannot open " + path);
  out << "design " << g.size() << " " << g.exact_degree << "\n";
  char buf[96];
  for (const Point3& p : g.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
    out << buf;
  }
  if (!out) throw std::runtime_error("save_design: write failure on " + path);
}

}  // namespace funkframe
