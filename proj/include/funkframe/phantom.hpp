#pragma once

// Ground-truth phantoms (radially symmetric quadratic spline caps,
// symmetrized to even functions), inverse-crime-free forward data via the
// direct great-circle transform, noise injection, and error metrics.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "funkframe/funk_radon.hpp"
#include "funkframe/harmonics.hpp"
#include "funkframe/sphere.hpp"

namespace funkframe {

/// One spherical cap: quadratic spline in t = xi . center, opening h
/// (cos-distance), scaled by amplitude.
struct SplineCap {
  Point3 center;
  double h = 0.0;
  double amplitude = 1.0;
};

struct Phantom {
  std::vector<SplineCap> caps;
  bool evenized = true;  // always true in the pipeline
};

inline void validate(const Phantom& p) {
  if (p.caps.empty()) throw std::invalid_argument("phantom: needs at least one cap");
  for (const SplineCap& c : p.caps) {
    if (std::abs(norm(c.center) - 1.0) > 1e-8)
      throw std::invalid_argument("phantom: cap center is not on the unit sphere");
    if (!(c.h > -1.0 && c.h < 1.0))
      throw std::invalid_argument("phantom: cap opening h must lie strictly inside (-1, 1)");
    if (!std::isfinite(c.amplitude))
      throw std::invalid_argument("phantom: cap amplitude must be finite");
  }
}

/// Quadratic cap profile: s(t) = ((t-h)/(1-h))^2 for t > h, else 0.
/// Continuous with continuous first derivative at t = h.
inline double cap_profile(double t, double h) {
  if (t <= h) return 0.0;
  double u = (t - h) / (1.0 - h);
  return u * u;
}

/// sum over caps of a [s(xi.c) + s(-xi.c)] / 2 (the symmetrization makes the
/// phantom even; without the flag the raw one-sided caps are returned).
inline double phantom_eval(const Phantom& p, Point3 xi) {
  double acc = 0.0;
  for (const SplineCap& c : p.caps) {
    double t = dot(xi, c.center);
    if (p.evenized)
      acc += c.amplitude * 0.5 * (cap_profile(t, c.h) + cap_profile(-t, c.h));
    else
      acc += c.amplitude * cap_profile(t, c.h);
  }
  return acc;
}

/// Four caps at tetrahedral directions: smooth, even, multi-bump.
inline Phantom default_phantom() {
  const double r = 1.0 / std::sqrt(3.0);
  Phantom p;
  p.caps = {
      {{r, r, r}, 0.7, 1.0},
      {{r, -r, -r}, 0.7, 0.8},
      {{-r, r, -r}, 0.7, 0.6},
      {{-r, -r, r}, 0.7, 0.9},
  };
  return p;
}

/// Phantom definition file: one cap per line, `cx cy cz h amplitude`.
inline Phantom load_phantom(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_phantom: cannot open " + path);
  Phantom p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    SplineCap c;
    if (!(ls >> c.center.x >> c.center.y >> c.center.z >> c.h >> c.amplitude))
      throw std::runtime_error("load_phantom: bad line " + std::to_string(lineno) + " in " +
                               path);
    p.caps.push_back(c);
  }
  validate(p);
  return p;
}

inline void save_phantom(const Phantom& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_phantom: cannot open " + path);
  char buf[160];
  for (const SplineCap& c : p.caps) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g\n", c.center.x, c.center.y,
                  c.center.z, c.h, c.amplitude);
    out << buf;
  }
  if (!out) throw std::runtime_error("save_phantom: write failure on " + path);
}

/// Simulated data: the direct great-circle transform of the phantom. This is
/// the quadrature-based forward oracle; the reconstruction pipeline never
/// reuses it, which keeps the validation free of inverse crimes.
inline NodeFunction forward_data(const Phantom& p, const QuadratureGrid& grid, int m_circle) {
  validate(p);
  return fr_direct([&p](Point3 eta) { return phantom_eval(p, eta); }, grid, m_circle);
}

struct NoiseSpec {
  double level = 0.0;  // relative weighted-L2 noise level, e.g. 0.20
  std::uint64_t seed = 1;
};

/// Adds white Gaussian noise in node space, rescaled after the fact so the
/// relative weighted-L2 level is met exactly; deterministic per seed.
inline NodeFunction add_noise(const NodeFunction& g, const NoiseSpec& spec) {
  if (spec.level < 0.0) throw std::invalid_argument("add_noise: level must be >= 0");
  NodeFunction out = g;
  if (spec.level == 0.0) return out;
  double gnorm = node_norm(g);
  if (gnorm == 0.0)
    throw std::invalid_argument("add_noise: relative level undefined for zero data");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> nd;
  std::vector<double> delta(g.samples.size());
  double dnorm_sq = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = nd(rng);
    dnorm_sq += g.grid->weights[i] * delta[i] * delta[i];
  }
  if (dnorm_sq == 0.0) throw numerical_error("add_noise: degenerate noise draw");
  double scale = spec.level * gnorm / std::sqrt(dnorm_sq);
  for (std::size_t i = 0; i < delta.size(); ++i) out.samples[i] += scale * delta[i];
  return out;
}

/// Weighted discrete L2 quotient ||f_true - f_rec|| / ||f_true||.
inline double relative_error(const NodeFunction& f_true, const NodeFunction& f_rec) {
  if (f_true.samples.size() != f_rec.samples.size())
    throw std::invalid_argument("relative_error: functions live on different grids");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f_true.samples.size(); ++i) {
    num += f_true.grid->weights[i] * std::norm(f_true.samples[i] - f_rec.samples[i]);
    den += f_true.grid->weights[i] * std::norm(f_true.samples[i]);
  }
  if (den == 0.0) throw std::invalid_argument("relative_error: reference function is zero");
  return std::sqrt(num / den);
}

}  // namespace funkframe
