#pragma once

// The half-order smoothing scale: L = diagonal multiplication by
// (l+1/2)^{1/2} on spherical-harmonic coefficients, its inverse, and the
// regularization filters U_alpha applied through sigma_l = (l+1/2)^{-1/2}.

#include <cmath>
#include <vector>

#include "funkframe/harmonics.hpp"

namespace funkframe {

/// sigma_l = (l+1/2)^{-1/2}: sigma_0 = sqrt(2), strictly decreasing, positive.
struct SobolevScale {
  int l_max = 0;
  std::vector<double> sigma;

  explicit SobolevScale(int lmax) : l_max(lmax), sigma(lmax + 1) {
    if (lmax < 0) throw std::invalid_argument("SobolevScale: l_max must be >= 0");
    for (int l = 0; l <= lmax; ++l) sigma[l] = 1.0 / std::sqrt(l + 0.5);
  }
};

/// Regularization filter h_alpha applied through the coefficients of L.
/// exact_inverse is h(s) = 1/sqrt(s) (so U = L^{-1}); tikhonov is
/// h_alpha(s) = 1/(alpha + s).
struct FilterSpec {
  enum class Kind { exact_inverse, tikhonov };
  Kind kind = Kind::exact_inverse;
  double alpha = 0.0;  // tikhonov only

  static FilterSpec exact() { return {Kind::exact_inverse, 0.0}; }
  static FilterSpec tikhonov(double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("FilterSpec: tikhonov alpha must be >= 0");
    return {Kind::tikhonov, alpha};
  }

  /// The diagonal factor sigma_l h_alpha(sigma_l^2) at degree l.
  double factor(int l) const {
    double sigma = 1.0 / std::sqrt(l + 0.5);
    switch (kind) {
      case Kind::exact_inverse:
        return 1.0;  // sigma * (1/sigma)
      case Kind::tikhonov:
        return sigma / (alpha + sigma * sigma);
    }
    return 0.0;  // unreachable
  }
};

namespace detail {

inline HarmonicCoeffs scale_by_degree(const HarmonicCoeffs& c, auto&& factor) {
  HarmonicCoeffs out(c.l_max);
  for (int l = 0; l <= c.l_max; ++l) {
    double f = factor(l);
    for (int m = -l; m <= l; ++m)
      out.v[HarmonicCoeffs::index(l, m)] = f * c.v[HarmonicCoeffs::index(l, m)];
  }
  return out;
}

}  // namespace detail

/// coeff(l,m) -> (l+1/2)^{1/2} coeff(l,m).
inline HarmonicCoeffs apply_L(const HarmonicCoeffs& c) {
  return detail::scale_by_degree(c, [](int l) { return std::sqrt(l + 0.5); });
}

/// coeff(l,m) -> (l+1/2)^{-1/2} coeff(l,m); inverse of apply_L.
inline HarmonicCoeffs apply_L_inv(const HarmonicCoeffs& c) {
  return detail::scale_by_degree(c, [](int l) { return 1.0 / std::sqrt(l + 0.5); });
}

/// coeff(l,m) -> sigma_l h_alpha(sigma_l^2) coeff(l,m): the filtered version
/// of L U_alpha applied to data coefficients. With kind=exact_inverse this is
/// the identity; with tikhonov alpha=0 it equals apply_L.
inline HarmonicCoeffs apply_filtered(const HarmonicCoeffs& c, const FilterSpec& spec) {
  if (spec.kind == FilterSpec::Kind::tikhonov && spec.alpha < 0.0)
    throw std::invalid_argument("apply_filtered: tikhonov alpha must be >= 0");
  return detail::scale_by_degree(c, [&spec](int l) { return spec.factor(l); });
}

}  // namespace funkframe
