#pragma once

// Trigonometric basis b_{n,k}, the frame functions e_{n,k} = R L b_{n,k},
// the frame operator matrix, dual frames via a truncated-SVD pseudo-inverse,
// and the inversion formula with optional filtering.
//
// Structure exploited throughout: b_{n,k} has a single azimuthal frequency n,
// so its harmonic expansion lives on the column m = n only and is described
// by a real degree profile B[l]. The frame matrix C[j][i] = <e_j, b_i> is
// therefore block-diagonal over n, with real symmetric blocks
//   C_n = B_n diag(mu) B_n^T,  mu_l = P_l(0) (l+1/2)^{1/2}.

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <vector>
#include <zlib.h>

#include "funkframe/funk_radon.hpp"
#include "funkframe/harmonics.hpp"
#include "funkframe/sobolev.hpp"
#include "funkframe/sphere.hpp"

namespace funkframe {

/// Frame bounds of the great-circle frame over the orthonormal basis b.
struct StabilityConstants {
  static constexpr double c1 = 0.70710678118654752;  // sqrt(1/2)
  static constexpr double c2 = 0.79788456080286536;  // sqrt(2/pi)
  static constexpr double C1 = 1.0, C2 = 1.0;
  static constexpr double B1 = 0.5;
  static constexpr double B2 = 0.63661977236758134;  // 2/pi
};

/// Index (n, k) with n + k odd (the even-function half of the basis).
struct FrameIndex {
  int n = 0;
  int k = 1;

  bool operator==(const FrameIndex&) const = default;
};

inline bool is_member(FrameIndex idx) { return idx.k >= 1 && ((idx.n + idx.k) % 2 != 0); }

/// The box truncation J_N = {(n,k) : |n| <= N, 1 <= k <= N, n+k odd},
/// ordered k-major with n ascending (deterministic, so persisted tables are
/// reproducible byte for byte).
struct IndexSetJ {
  int N = 0;
  std::vector<FrameIndex> members;
};

inline IndexSetJ index_set(int N) {
  if (N < 1) throw std::invalid_argument("index_set: N must be >= 1");
  IndexSetJ J;
  J.N = N;
  for (int k = 1; k <= N; ++k)
    for (int n = -N; n <= N; ++n)
      if ((n + k) % 2 != 0) J.members.push_back({n, k});
  return J;
}

/// b_{n,k}(lambda, theta) = e^{i n lambda} sin(k theta) / (pi sqrt(sin theta)),
/// continuously extended by 0 at the poles.
inline cplx basis_b(FrameIndex idx, SphCoord c) {
  double st = std::sin(c.theta);
  if (st <= 0.0) return 0.0;
  double radial = std::sin(idx.k * c.theta) / (pi * std::sqrt(st));
  return radial * std::polar(1.0, idx.n * c.lambda);
}

namespace detail {

/// Degree profile of b_{n,k} on the column m = n:
///   profile[l] = 2 pi sum_i w_i tau_k(theta_i) T_l^{|n|}(x_i),
/// over a Gauss-Legendre rule (x, w) in cos(theta), where tau_k is the
/// radial factor of b. Entries with l < |n| or odd l are exactly zero
/// (parity of the basis member). Negative n picks up the sign of T_l^{-|n|}.
inline Eigen::VectorXd b_degree_profile(FrameIndex idx, int l_max,
                                        const std::vector<double>& x,
                                        const std::vector<double>& w,
                                        const std::vector<std::vector<double>>& tables) {
  const int ma = std::abs(idx.n);
  const std::size_t stride = l_max + 1;
  Eigen::VectorXd prof = Eigen::VectorXd::Zero(l_max + 1);
  if (ma > l_max) return prof;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double theta = std::acos(x[i]);
    double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    if (st <= 0.0) continue;
    double tau = std::sin(idx.k * theta) / (pi * std::sqrt(st));
    double ww = two_pi * w[i] * tau;
    const std::vector<double>& t = tables[i];
    for (int l = ma; l <= l_max; ++l) prof[l] += ww * t[std::size_t(l) * stride + ma];
  }
  // Exact zeros: parity in cos(theta) kills odd degrees for members of J.
  for (int l = 1; l <= l_max; l += 2) prof[l] = 0.0;
  if (idx.n < 0 && (ma % 2)) prof = -prof;
  return prof;
}

}  // namespace detail

/// Frame table and dual table in one bundle.
///   B: |J| x (l_max+1) real degree profiles of the b-basis (row i, m = n_i)
///   C: C[j][i] = <e_j, b_i>, block-diagonal over n
///   D: rows are the b-coefficients of the dual functions (filled by
///      dual_frame); threshold is the relative TSVD cutoff used.
struct FrameDecomposition {
  IndexSetJ J;
  int l_max = 0;
  Eigen::MatrixXd B;
  Eigen::MatrixXcd C;
  Eigen::MatrixXcd D;
  double pinv_threshold = 0.0;
  std::vector<double> bessel_residuals;  // 1 - sum_l B(i,l)^2 per index
};

/// Number of colatitude nodes of the dedicated profile-assembly rule. Finer
/// than any data grid because the radial factor of b has a sqrt branch at
/// the poles (not a polynomial; a degree-exact claim does not apply).
inline int assembly_rule_size(int l_max) { return 4 * (l_max + 1); }

/// Assembles profiles B and the frame matrix C for the box truncation J_N at
/// degree cutoff l_max. Warns when a truncation residual exceeds 1e-2.
inline FrameDecomposition assemble_frame(int N, int l_max) {
  if (l_max < 1) throw std::invalid_argument("assemble_frame: l_max must be >= 1");
  FrameDecomposition fd;
  fd.J = index_set(N);
  fd.l_max = l_max;
  const int nj = int(fd.J.members.size());

  // Gauss-Legendre assembly rule and per-node normalized Legendre tables.
  std::vector<double> x, w;
  gauss_legendre(assembly_rule_size(l_max), x, w);
  std::vector<std::vector<double>> tables(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) legendre_table(x[i], l_max, tables[i]);

  fd.B.resize(nj, l_max + 1);
  fd.bessel_residuals.resize(nj);
  int warned = 0;
  for (int i = 0; i < nj; ++i) {
    Eigen::VectorXd prof = detail::b_degree_profile(fd.J.members[i], l_max, x, w, tables);
    fd.B.row(i) = prof.transpose();
    fd.bessel_residuals[i] = 1.0 - prof.squaredNorm();
    if (fd.bessel_residuals[i] > 1e-2) ++warned;
  }
  if (warned > 0)
    std::cerr << "warning: " << warned << " of " << nj
              << " basis members lose > 1% of their energy to the degree-" << l_max
              << " truncation\n";

  // mu_l = P_l(0) (l+1/2)^{1/2}; C per azimuthal block.
  LegendreZeroTable p0(l_max);
  Eigen::VectorXd mu(l_max + 1);
  for (int l = 0; l <= l_max; ++l) mu[l] = p0.values[l] * std::sqrt(l + 0.5);

  fd.C = Eigen::MatrixXcd::Zero(nj, nj);
  for (int n = -N; n <= N; ++n) {
    std::vector<int> rows;
    for (int i = 0; i < nj; ++i)
      if (fd.J.members[i].n == n) rows.push_back(i);
    if (rows.empty()) continue;
    const int bsize = int(rows.size());
    Eigen::MatrixXd Bn(bsize, l_max + 1);
    for (int r = 0; r < bsize; ++r) Bn.row(r) = fd.B.row(rows[r]);
    Eigen::MatrixXd Cn = Bn * mu.asDiagonal() * Bn.transpose();
    for (int r = 0; r < bsize; ++r)
      for (int s = 0; s < bsize; ++s) fd.C(rows[r], rows[s]) = Cn(r, s);
  }
  return fd;
}

/// Harmonic expansion of a sampled basis member through the grid's own
/// quadrature (the generic analysis path), even degrees retained.
inline HarmonicCoeffs b_to_harmonics(FrameIndex idx, int l_max, const QuadratureGrid& grid) {
  if (!is_member(idx))
    throw std::invalid_argument("b_to_harmonics: (n,k) is not a member of the index set");
  NodeFunction f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) f.samples[i] = basis_b(idx, grid.sph[i]);
  return even_projection(analysis(f, l_max));
}

/// e_{n,k} = R L b_{n,k}: diagonal multiplier P_l(0) (l+1/2)^{1/2} on the
/// expansion of b.
inline HarmonicCoeffs frame_function_e(FrameIndex idx, int l_max, const QuadratureGrid& grid) {
  return fr_spectral(apply_L(b_to_harmonics(idx, l_max, grid)));
}

/// Frame operator matrix M = C^H C (Hermitian positive semidefinite).
inline Eigen::MatrixXcd s_matrix(const FrameDecomposition& fd) {
  return fd.C.adjoint() * fd.C;
}

/// Computes the dual-frame coefficients D = pinv_tau(M) C^H, where pinv_tau
/// is the truncated-SVD pseudo-inverse of M discarding eigenvalues below
/// threshold * lambda_max. Returns the number of retained eigenvalues.
inline int dual_frame(FrameDecomposition& fd, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("dual_frame: threshold must lie in (0, 1)");
  Eigen::MatrixXcd M = s_matrix(fd);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  if (es.info() != Eigen::Success)
    throw numerical_error("dual_frame: eigendecomposition of the frame matrix failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  double lmax_ev = ev.maxCoeff();
  if (!(lmax_ev > 0.0) || !std::isfinite(lmax_ev))
    throw numerical_error("dual_frame: frame matrix is numerically zero");
  double cut = threshold * lmax_ev;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  int kept = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] >= cut) {
      inv[i] = 1.0 / ev[i];
      ++kept;
    }
  Eigen::MatrixXcd pinv =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  fd.D = pinv * fd.C.adjoint();
  fd.pinv_threshold = threshold;
  return kept;
}

/// <y, b_i> for every retained index: picks the column m = n_i of y and
/// contracts it with the degree profile.
inline Eigen::VectorXcd project_onto_b(const HarmonicCoeffs& y, const FrameDecomposition& fd) {
  if (y.l_max != fd.l_max)
    throw std::invalid_argument("project_onto_b: coefficient degree does not match table");
  const int nj = int(fd.J.members.size());
  Eigen::VectorXcd a(nj);
  for (int i = 0; i < nj; ++i) {
    const FrameIndex idx = fd.J.members[i];
    int l0 = std::abs(idx.n);
    if (l0 % 2) ++l0;  // profiles live on even degrees only
    cplx s = 0.0;
    for (int l = l0; l <= fd.l_max; l += 2)
      s += fd.B(i, l) * y.v[HarmonicCoeffs::index(l, idx.n)];
    a[i] = s;
  }
  return a;
}

/// Analysis against the frame data side: vector of <L g, b_i>. Warns when g
/// carries an odd-degree part (it cannot contribute).
inline Eigen::VectorXcd analysis_coeffs(const HarmonicCoeffs& g, const FrameDecomposition& fd) {
  double odd_sq = 0.0, total_sq = 0.0;
  for (int l = 0; l <= g.l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      double a2 = std::norm(g.v[HarmonicCoeffs::index(l, m)]);
      total_sq += a2;
      if (l % 2) odd_sq += a2;
    }
  if (odd_sq > 1e-24 * total_sq && odd_sq > 0.0)
    std::cerr << "warning: analysis_coeffs ignoring an odd-degree part of relative size "
              << std::sqrt(odd_sq / std::max(total_sq, 1e-300)) << "\n";
  return project_onto_b(apply_L(g), fd);
}

/// Expansion of sum_i beta_i b_i back into spherical harmonics.
inline HarmonicCoeffs expand_over_b(const Eigen::VectorXcd& beta, const FrameDecomposition& fd) {
  HarmonicCoeffs f(fd.l_max);
  for (int i = 0; i < beta.size(); ++i) {
    const FrameIndex idx = fd.J.members[i];
    int l0 = std::abs(idx.n);
    if (l0 % 2) ++l0;
    for (int l = l0; l <= fd.l_max; l += 2)
      f.v[HarmonicCoeffs::index(l, idx.n)] += beta[i] * fd.B(i, l);
  }
  return f;
}

struct ReconstructResult {
  HarmonicCoeffs f;       // even by construction
  double norm_ratio = 0;  // ||f|| / ||y||, y = filtered data coefficients
};

/// The inversion formula: f = sum_i <y, b_i> dual_i with y = L g (or the
/// filtered coefficients when a filter is supplied). The returned norm_ratio
/// must not exceed 2 (theoretical bound on the unfiltered formula); callers
/// audit it on every pipeline run.
inline ReconstructResult reconstruct(const HarmonicCoeffs& g, const FrameDecomposition& fd,
                                     const FilterSpec* filter = nullptr) {
  if (fd.D.rows() == 0)
    throw std::invalid_argument("reconstruct: dual table has not been computed");
  if (g.l_max != fd.l_max)
    throw std::invalid_argument("reconstruct: coefficient degree does not match table");
  HarmonicCoeffs y = filter ? apply_filtered(g, *filter) : apply_L(g);
  Eigen::VectorXcd a = project_onto_b(y, fd);
  Eigen::VectorXcd beta = fd.D.transpose() * a;
  ReconstructResult r;
  r.f = expand_over_b(beta, fd);
  double ny = y.norm();
  r.norm_ratio = (ny > 0.0) ? r.f.norm() / ny : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Persistence: FRFD binary table file.
//
// Layout (all little-endian):
//   magic "FRFD" | version u32 | N u32 | l_max u32 | count u32
//   | count x (n i32, k u32) | threshold f64
//   | C row-major complex f64 (re, im) | D row-major complex f64
//   | CRC32 u32 over all preceding bytes

static_assert(std::endian::native == std::endian::little,
              "FRFD persistence assumes a little-endian host");

namespace detail {

template <class T>
void put_raw(std::vector<unsigned char>& buf, T v) {
  unsigned char tmp[sizeof(T)];
  std::memcpy(tmp, &v, sizeof(T));
  buf.insert(buf.end(), tmp, tmp + sizeof(T));
}

template <class T>
T get_raw(const std::vector<unsigned char>& buf, std::size_t& off) {
  if (off + sizeof(T) > buf.size())
    throw std::runtime_error("FRFD: file truncated");
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace detail

inline void write_frfd(const FrameDecomposition& fd, const std::string& path) {
  if (fd.D.rows() == 0)
    throw std::invalid_argument("write_frfd: dual table has not been computed");
  std::vector<unsigned char> buf;
  const int nj = int(fd.J.members.size());
  buf.reserve(24 + std::size_t(nj) * 8 + 2 * std::size_t(nj) * nj * 16 + 16);
  buf.insert(buf.end(), {'F', 'R', 'F', 'D'});
  detail::put_raw<std::uint32_t>(buf, 1);  // version
  detail::put_raw<std::uint32_t>(buf, std::uint32_t(fd.J.N));
  detail::put_raw<std::uint32_t>(buf, std::uint32_t(fd.l_max));
  detail::put_raw<std::uint32_t>(buf, std::uint32_t(nj));
  for (const FrameIndex& idx : fd.J.members) {
    detail::put_raw<std::int32_t>(buf, idx.n);
    detail::put_raw<std::uint32_t>(buf, std::uint32_t(idx.k));
  }
  detail::put_raw<double>(buf, fd.pinv_threshold);
  for (const Eigen::MatrixXcd* mat : {&fd.C, &fd.D})
    for (int r = 0; r < nj; ++r)
      for (int c = 0; c < nj; ++c) {
        detail::put_raw<double>(buf, (*mat)(r, c).real());
        detail::put_raw<double>(buf, (*mat)(r, c).imag());
      }
  std::uint32_t crc = std::uint32_t(::crc32(0L, buf.data(), uInt(buf.size())));
  detail::put_raw<std::uint32_t>(buf, crc);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_frfd: cannot open " + path);
  out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  if (!out) throw std::runtime_error("write_frfd: write failure on " + path);
}

/// Loads a persisted table and recomputes the degree profiles B (they are a
/// deterministic function of (N, l_max) and are not stored in the file).
inline FrameDecomposition read_frfd(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_frfd: cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 28) throw std::runtime_error("read_frfd: file too short: " + path);
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, buf.data() + buf.size() - 4, 4);
  std::uint32_t crc = std::uint32_t(::crc32(0L, buf.data(), uInt(buf.size() - 4)));
  if (crc != stored_crc)
    throw std::runtime_error("read_frfd: checksum mismatch (corrupted file): " + path);
  std::size_t off = 0;
  if (buf[0] != 'F' || buf[1] != 'R' || buf[2] != 'F' || buf[3] != 'D')
    throw std::runtime_error("read_frfd: bad magic in " + path);
  off = 4;
  std::uint32_t version = detail::get_raw<std::uint32_t>(buf, off);
  if (version != 1)
    throw std::runtime_error("read_frfd: unsupported version in " + path);
  std::uint32_t N = detail::get_raw<std::uint32_t>(buf, off);
  std::uint32_t l_max = detail::get_raw<std::uint32_t>(buf, off);
  std::uint32_t count = detail::get_raw<std::uint32_t>(buf, off);
  IndexSetJ expect = index_set(int(N));
  if (count != expect.members.size())
    throw std::runtime_error("read_frfd: member count does not match N in " + path);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::int32_t n = detail::get_raw<std::int32_t>(buf, off);
    std::uint32_t k = detail::get_raw<std::uint32_t>(buf, off);
    if (n != expect.members[i].n || int(k) != expect.members[i].k)
      throw std::runtime_error("read_frfd: unexpected index ordering in " + path);
  }
  double threshold = detail::get_raw<double>(buf, off);

  // Rebuild the profile matrix, then take C and D from the file.
  FrameDecomposition fd = assemble_frame(int(N), int(l_max));
  fd.pinv_threshold = threshold;
  fd.D.resize(count, count);
  Eigen::MatrixXcd from_file(count, count);
  for (Eigen::MatrixXcd* mat : {&from_file, &fd.D})
    for (std::uint32_t r = 0; r < count; ++r)
      for (std::uint32_t c = 0; c < count; ++c) {
        double re = detail::get_raw<double>(buf, off);
        double im = detail::get_raw<double>(buf, off);
        (*mat)(r, c) = cplx(re, im);
      }
  fd.C = from_file;
  if (off + 4 != buf.size())
    throw std::runtime_error("read_frfd: trailing bytes in " + path);
  return fd;
}

}  // namespace funkframe
