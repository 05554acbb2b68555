#pragma once

// The Funk-Radon transform R: spectral implementation (eigenvalue
// multiplication by P_l(0)) and direct great-circle quadrature, plus the
// eigenvalue table and stability ratios.

#include <cmath>
#include <vector>

#include "funkframe/harmonics.hpp"
#include "funkframe/sphere.hpp"

namespace funkframe {

/// P_l(0) for even l via the stable ratio recurrence r_l = -r_{l-2} (l-1)/l,
/// r_0 = 1; no explicit double factorials.
inline double legendre_p0(int l) {
  if (l < 0 || (l % 2) != 0)
    throw std::invalid_argument("legendre_p0: degree must be even and nonnegative");
  double r = 1.0;
  for (int j = 2; j <= l; j += 2) r *= -double(j - 1) / j;
  return r;
}

/// values[l] = P_l(0) for all 0 <= l <= l_max (zero at odd l).
struct LegendreZeroTable {
  int l_max = 0;
  std::vector<double> values;

  explicit LegendreZeroTable(int lmax) : l_max(lmax), values(lmax + 1, 0.0) {
    if (lmax < 0) throw std::invalid_argument("LegendreZeroTable: l_max must be >= 0");
    double r = 1.0;
    values[0] = r;
    for (int l = 2; l <= lmax; l += 2) {
      r *= -double(l - 1) / l;
      values[l] = r;
    }
  }
};

/// Spectral Funk-Radon transform: coeff(l,m) -> P_l(0) coeff(l,m); odd
/// degrees are annihilated.
inline HarmonicCoeffs fr_spectral(const HarmonicCoeffs& c) {
  LegendreZeroTable p0(c.l_max);
  HarmonicCoeffs out(c.l_max);
  for (int l = 0; l <= c.l_max; ++l) {
    double p = p0.values[l];
    if (p == 0.0) continue;
    for (int m = -l; m <= l; ++m)
      out.v[HarmonicCoeffs::index(l, m)] = p * c.v[HarmonicCoeffs::index(l, m)];
  }
  return out;
}

/// Direct transform: for each grid node xi, the trapezoidal mean of f over
/// the great circle perpendicular to xi,
///   value = (1/m_circle) sum_j f(cos(t_j) u + sin(t_j) v),  t_j = 2 pi j / m.
/// F maps Point3 to a value convertible to complex<double>.
template <class F>
NodeFunction fr_direct(F&& f, const QuadratureGrid& grid, int m_circle) {
  if (m_circle < 4) throw std::invalid_argument("fr_direct: m_circle must be >= 4");
  NodeFunction out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    GreatCircleFrame fr = tangent_frame(grid.nodes[i]);
    cplx acc = 0.0;
    for (int j = 0; j < m_circle; ++j) {
      double t = two_pi * j / m_circle;
      Point3 eta = std::cos(t) * fr.u + std::sin(t) * fr.v;
      acc += cplx(f(eta));
    }
    out.samples[i] = acc / double(m_circle);
  }
  return out;
}

/// Direct transform of every Y_l^m (l <= l_max) at once: row i of the result
/// holds the great-circle means at node i, laid out like HarmonicCoeffs
/// storage ((l_max+1)^2 values per node). Shares the circle rule with
/// fr_direct; one Legendre table per circle point instead of one full pass
/// per harmonic.
inline std::vector<cplx> fr_direct_all_ylm(const QuadratureGrid& grid, int l_max,
                                           int m_circle) {
  if (m_circle < 4)
    throw std::invalid_argument("fr_direct_all_ylm: m_circle must be >= 4");
  if (l_max < 0) throw std::invalid_argument("fr_direct_all_ylm: l_max must be >= 0");
  const std::size_t ncoef = std::size_t(l_max + 1) * (l_max + 1);
  const std::size_t stride = l_max + 1;
  std::vector<cplx> out(grid.size() * ncoef, cplx(0.0));
  std::vector<double> table;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    GreatCircleFrame fr = tangent_frame(grid.nodes[i]);
    cplx* row = out.data() + i * ncoef;
    for (int j = 0; j < m_circle; ++j) {
      double t = two_pi * j / m_circle;
      Point3 eta = std::cos(t) * fr.u + std::sin(t) * fr.v;
      double lambda = std::atan2(eta.y, eta.x);
      legendre_table(eta.z, l_max, table);
      cplx e1 = std::polar(1.0, lambda);
      cplx em(1.0);  // e^{+i m lambda}
      for (int m = 0; m <= l_max; ++m) {
        double sgn = (m % 2) ? -1.0 : 1.0;
        for (int l = m; l <= l_max; ++l) {
          double tv = table[std::size_t(l) * stride + m];
          row[HarmonicCoeffs::index(l, m)] += tv * em;
          if (m > 0) row[HarmonicCoeffs::index(l, -m)] += sgn * tv * std::conj(em);
        }
        em *= e1;
      }
    }
    for (std::size_t q = 0; q < ncoef; ++q) row[q] /= double(m_circle);
  }
  return out;
}

/// (l + 1/2)^{1/2} |P_l(0)|: lies in [sqrt(1/2), sqrt(2/pi)] and is
/// nondecreasing over even degrees.
inline double stability_ratio(int l) {
  return std::sqrt(l + 0.5) * std::abs(legendre_p0(l));
}

}  // namespace funkframe
