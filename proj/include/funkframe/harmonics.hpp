#pragma once

// Spherical harmonics Y_l^m, discrete analysis/synthesis via quadrature,
// Sobolev norms, and parity projection.
//
// Convention: orthonormal (unit L^2) harmonics with Condon-Shortley phase,
//   Y_l^m(lambda, theta) = T_l^m(cos theta) * e^{i m lambda},
// where T_l^m is the normalized associated Legendre function and
// T_l^{-m} = (-1)^m T_l^m. Transforms are direct summations; product grids
// take a separable (azimuthal DFT + colatitude sum) path.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "funkframe/sphere.hpp"

namespace funkframe {

using cplx = std::complex<double>;

/// Triangular array of spherical-harmonic coefficients, 0 <= l <= l_max,
/// -l <= m <= l, stored densely with index l^2 + l + m.
struct HarmonicCoeffs {
  int l_max = 0;
  std::vector<cplx> v;

  HarmonicCoeffs() = default;
  explicit HarmonicCoeffs(int lmax) : l_max(lmax), v(std::size_t(lmax + 1) * (lmax + 1)) {
    if (lmax < 0) throw std::invalid_argument("HarmonicCoeffs: l_max must be >= 0");
  }

  static std::size_t index(int l, int m) { return std::size_t(l) * l + l + m; }

  cplx& at(int l, int m) {
    if (l < 0 || l > l_max || m < -l || m > l)
      throw std::invalid_argument("HarmonicCoeffs: index (l,m) out of range");
    return v[index(l, m)];
  }
  cplx at(int l, int m) const {
    if (l < 0 || l > l_max || m < -l || m > l)
      throw std::invalid_argument("HarmonicCoeffs: index (l,m) out of range");
    return v[index(l, m)];
  }

  double norm() const {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
  }
};

/// Complex samples of a sphere function on a quadrature grid.
struct NodeFunction {
  const QuadratureGrid* grid = nullptr;
  std::vector<cplx> samples;

  NodeFunction() = default;
  explicit NodeFunction(const QuadratureGrid& g) : grid(&g), samples(g.size()) {}
};

inline cplx node_inner(const NodeFunction& f, const NodeFunction& g) {
  if (f.grid != g.grid && f.samples.size() != g.samples.size())
    throw std::invalid_argument("node_inner: functions live on different grids");
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    s += f.grid->weights[i] * f.samples[i] * std::conj(g.samples[i]);
  return s;
}

inline double node_norm(const NodeFunction& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    s += f.grid->weights[i] * std::norm(f.samples[i]);
  return std::sqrt(s);
}

/// Fills table[l*(l_max+1)+m] = T_l^m(x) for 0 <= m <= l <= l_max, where
/// x = cos(theta). Stable per-order normalized recurrence, no raw factorials.
inline void legendre_table(double x, int l_max, std::vector<double>& table) {
  if (l_max < 0) throw std::invalid_argument("legendre_table: l_max must be >= 0");
  const std::size_t stride = l_max + 1;
  table.assign(stride * stride, 0.0);
  double s = std::sqrt(std::max(0.0, 1.0 - x * x));  // sin(theta) >= 0
  // Diagonal T_m^m, starting from T_0^0 = 1/sqrt(4 pi).
  double tmm = 1.0 / std::sqrt(four_pi);
  for (int m = 0; m <= l_max; ++m) {
    table[std::size_t(m) * stride + m] = tmm;
    if (m == l_max) break;
    // First off-diagonal T_{m+1}^m.
    double t1 = std::sqrt(2.0 * m + 3.0) * x * tmm;
    table[std::size_t(m + 1) * stride + m] = t1;
    double t0 = tmm;
    for (int l = m + 2; l <= l_max; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                           (4.0 * double(l - 1) * (l - 1) - 1.0));
      double t2 = a * (x * t1 - b * t0);
      table[std::size_t(l) * stride + m] = t2;
      t0 = t1;
      t1 = t2;
    }
    tmm *= -std::sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * s;  // Condon-Shortley
  }
}

/// Single Y_l^m value; O(l) per-order recurrence chain.
inline cplx eval_ylm(int l, int m, SphCoord c) {
  if (l < 0 || std::abs(m) > l) throw std::invalid_argument("eval_ylm: need 0 <= |m| <= l");
  int ma = std::abs(m);
  double x = std::cos(c.theta);
  double s = std::sin(c.theta);
  double tmm = 1.0 / std::sqrt(four_pi);
  for (int mm = 1; mm <= ma; ++mm) tmm *= -std::sqrt((2.0 * mm + 1.0) / (2.0 * mm)) * s;
  double t = tmm;
  if (l > ma) {
    double t1 = std::sqrt(2.0 * ma + 3.0) * x * tmm;
    double t0 = tmm;
    t = t1;
    for (int ll = ma + 2; ll <= l; ++ll) {
      double a = std::sqrt((4.0 * ll * ll - 1.0) / (double(ll) * ll - double(ma) * ma));
      double b = std::sqrt((double(ll - 1) * (ll - 1) - double(ma) * ma) /
                           (4.0 * double(ll - 1) * (ll - 1) - 1.0));
      t = a * (x * t1 - b * t0);
      t0 = t1;
      t1 = t;
    }
  }
  if (m < 0 && (ma % 2)) t = -t;
  return t * std::polar(1.0, m * c.lambda);
}

namespace detail {

/// Azimuthal DFT of one theta-row: out[m + l_max] = sum_il in[il] e^{-i m lambda_il}.
inline void row_dft(const cplx* in, int n_lambda, int l_max, std::vector<cplx>& out) {
  out.assign(2 * std::size_t(l_max) + 1, cplx(0.0));
  // m = 0
  cplx s0 = 0.0;
  for (int il = 0; il < n_lambda; ++il) s0 += in[il];
  out[l_max] = s0;
  // phase[il] tracks e^{-i m lambda_il}; its conjugate serves m < 0.
  std::vector<cplx> phase(n_lambda, cplx(1.0));
  std::vector<cplx> unit(n_lambda);
  for (int il = 0; il < n_lambda; ++il) unit[il] = std::polar(1.0, -two_pi * il / n_lambda);
  for (int m = 1; m <= l_max; ++m) {
    cplx sp = 0.0, sm = 0.0;
    for (int il = 0; il < n_lambda; ++il) {
      phase[il] *= unit[il];
      sp += in[il] * phase[il];
      sm += in[il] * std::conj(phase[il]);
    }
    out[std::size_t(l_max) + m] = sp;
    out[std::size_t(l_max) - m] = sm;
  }
}

}  // namespace detail

/// Discrete analysis: coeff(l,m) = sum_i w_i f(xi_i) conj(Y_l^m(xi_i)).
/// Warns when the grid's exactness claim is below 2*l_max.
inline HarmonicCoeffs analysis(const NodeFunction& f, int l_max) {
  if (l_max < 0) throw std::invalid_argument("analysis: l_max must be >= 0");
  const QuadratureGrid& g = *f.grid;
  if (g.exact_degree < 2 * l_max)
    std::cerr << "warning: analysis on a grid with exactness degree " << g.exact_degree
              << " < 2*l_max = " << 2 * l_max << "\n";
  HarmonicCoeffs c(l_max);
  const std::size_t stride = l_max + 1;
  std::vector<double> table;
  if (g.is_product) {
    std::vector<cplx> fw(g.n_lambda), fhat;
    for (int it = 0; it < g.n_theta; ++it) {
      const std::size_t base = std::size_t(it) * g.n_lambda;
      for (int il = 0; il < g.n_lambda; ++il)
        fw[il] = g.weights[base + il] * f.samples[base + il];
      detail::row_dft(fw.data(), g.n_lambda, l_max, fhat);
      legendre_table(g.gl_x[it], l_max, table);
      for (int m = -l_max; m <= l_max; ++m) {
        int ma = std::abs(m);
        cplx fm = fhat[std::size_t(l_max) + m];
        if (m < 0 && (ma % 2)) fm = -fm;  // T_l^{-m} = (-1)^m T_l^m
        for (int l = ma; l <= l_max; ++l)
          c.v[HarmonicCoeffs::index(l, m)] += table[std::size_t(l) * stride + ma] * fm;
      }
    }
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) {
      cplx fw = g.weights[i] * f.samples[i];
      legendre_table(std::cos(g.sph[i].theta), l_max, table);
      cplx e1 = std::polar(1.0, -g.sph[i].lambda);
      cplx em(1.0);  // e^{-i m lambda}
      for (int m = 0; m <= l_max; ++m) {
        double sgn = (m % 2) ? -1.0 : 1.0;
        for (int l = m; l <= l_max; ++l) {
          double t = table[std::size_t(l) * stride + m];
          c.v[HarmonicCoeffs::index(l, m)] += t * fw * em;
          if (m > 0) c.v[HarmonicCoeffs::index(l, -m)] += sgn * t * fw * std::conj(em);
        }
        em *= e1;
      }
    }
  }
  return c;
}

/// Discrete synthesis: samples(xi_i) = sum_{l,m} c(l,m) Y_l^m(xi_i).
inline NodeFunction synthesis(const HarmonicCoeffs& c, const QuadratureGrid& g) {
  NodeFunction f(g);
  const int l_max = c.l_max;
  const std::size_t stride = l_max + 1;
  std::vector<double> table;
  if (g.is_product) {
    std::vector<cplx> gm(2 * std::size_t(l_max) + 1);
    std::vector<cplx> unit(g.n_lambda), phase(g.n_lambda);
    for (int il = 0; il < g.n_lambda; ++il)
      unit[il] = std::polar(1.0, two_pi * il / g.n_lambda);
    for (int it = 0; it < g.n_theta; ++it) {
      legendre_table(g.gl_x[it], l_max, table);
      for (int m = -l_max; m <= l_max; ++m) {
        int ma = std::abs(m);
        cplx s = 0.0;
        for (int l = ma; l <= l_max; ++l)
          s += c.v[HarmonicCoeffs::index(l, m)] * table[std::size_t(l) * stride + ma];
        if (m < 0 && (ma % 2)) s = -s;
        gm[std::size_t(l_max) + m] = s;
      }
      const std::size_t base = std::size_t(it) * g.n_lambda;
      for (int il = 0; il < g.n_lambda; ++il) {
        phase[il] = cplx(1.0);
        f.samples[base + il] = gm[l_max];
      }
      for (int m = 1; m <= l_max; ++m) {
        const cplx gp = gm[std::size_t(l_max) + m], gn = gm[std::size_t(l_max) - m];
        for (int il = 0; il < g.n_lambda; ++il) {
          phase[il] *= unit[il];  // e^{+i m lambda_il}
          f.samples[base + il] += gp * phase[il] + gn * std::conj(phase[il]);
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) {
      legendre_table(std::cos(g.sph[i].theta), l_max, table);
      cplx e1 = std::polar(1.0, g.sph[i].lambda);
      cplx em(1.0);  // e^{+i m lambda}
      cplx s = 0.0;
      for (int m = 0; m <= l_max; ++m) {
        double sgn = (m % 2) ? -1.0 : 1.0;
        for (int l = m; l <= l_max; ++l) {
          double t = table[std::size_t(l) * stride + m];
          s += c.v[HarmonicCoeffs::index(l, m)] * t * em;
          if (m > 0) s += c.v[HarmonicCoeffs::index(l, -m)] * sgn * t * std::conj(em);
        }
        em *= e1;
      }
      f.samples[i] = s;
    }
  }
  return f;
}

/// Sobolev norm: sqrt(sum (l+1/2)^{2s} |c(l,m)|^2); s = 0 is the L^2 norm.
inline double sobolev_norm(const HarmonicCoeffs& c, double s) {
  double acc = 0.0;
  for (int l = 0; l <= c.l_max; ++l) {
    double wl = std::pow(l + 0.5, 2.0 * s);
    for (int m = -l; m <= l; ++m) acc += wl * std::norm(c.v[HarmonicCoeffs::index(l, m)]);
  }
  return std::sqrt(acc);
}

/// Zeroes all odd-degree coefficients; idempotent.
inline HarmonicCoeffs even_projection(HarmonicCoeffs c) {
  for (int l = 1; l <= c.l_max; l += 2)
    for (int m = -l; m <= l; ++m) c.v[HarmonicCoeffs::index(l, m)] = 0.0;
  return c;
}

// ---------------------------------------------------------------------------
// File formats

/// Coefficient dump: CSV lines `l,m,re,im`.
inline void write_coeffs_csv(const HarmonicCoeffs& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_coeffs_csv: cannot open " + path);
  char buf[128];
  for (int l = 0; l <= c.l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      cplx z = c.v[HarmonicCoeffs::index(l, m)];
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", l, m, z.real(), z.imag());
      out << buf;
    }
  if (!out) throw std::runtime_error("write_coeffs_csv: write failure on " + path);
}

inline HarmonicCoeffs read_coeffs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_coeffs_csv: cannot open " + path);
  struct Entry {
    int l, m;
    cplx z;
  };
  std::vector<Entry> entries;
  int l_max = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    int l, m;
    double re, im;
    if (!(ls >> l >> m >> re >> im))
      throw std::runtime_error("read_coeffs_csv: bad line in " + path + ": " + line);
    if (l < 0 || std::abs(m) > l)
      throw std::runtime_error("read_coeffs_csv: invalid (l,m) in " + path);
    entries.push_back({l, m, cplx(re, im)});
    l_max = std::max(l_max, l);
  }
  HarmonicCoeffs c(l_max);
  for (const Entry& e : entries) c.at(e.l, e.m) = e.z;
  return c;
}

/// Node-sample dump: CSV with header `lambda,theta,weight,value_re,value_im`.
inline void write_node_csv(const NodeFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_node_csv: cannot open " + path);
  out << "lambda,theta,weight,value_re,value_im\n";
  char buf[192];
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", f.grid->sph[i].lambda,
                  f.grid->sph[i].theta, f.grid->weights[i], f.samples[i].real(),
                  f.samples[i].imag());
    out << buf;
  }
  if (!out) throw std::runtime_error("write_node_csv: write failure on " + path);
}

/// Reads node samples written by write_node_csv and validates that the rows
/// match the supplied grid (same node order, coordinates, weights).
inline NodeFunction read_node_csv(const std::string& path, const QuadratureGrid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_node_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "lambda,theta,weight,value_re,value_im")
    throw std::runtime_error("read_node_csv: missing/incorrect header in " + path);
  NodeFunction f(grid);
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= grid.size())
      throw std::runtime_error("read_node_csv: more rows than grid nodes in " + path);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double lambda, theta, weight, re, im;
    if (!(ls >> lambda >> theta >> weight >> re >> im))
      throw std::runtime_error("read_node_csv: bad line in " + path + ": " + line);
    if (std::abs(lambda - grid.sph[i].lambda) > 1e-9 ||
        std::abs(theta - grid.sph[i].theta) > 1e-9 ||
        std::abs(weight - grid.weights[i]) > 1e-9)
      throw std::runtime_error("read_node_csv: row " + std::to_string(i) +
                               " does not match the expected grid");
    f.samples[i++] = cplx(re, im);
  }
  if (i != grid.size())
    throw std::runtime_error("read_node_csv: fewer rows than grid nodes in " + path);
  return f;
}

}  // namespace funkframe
