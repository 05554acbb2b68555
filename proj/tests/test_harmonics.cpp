#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "funkframe/harmonics.hpp"

using namespace funkframe;
using Catch::Approx;

static HarmonicCoeffs random_coeffs(int l_max, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  HarmonicCoeffs c(l_max);
  for (cplx& z : c.v) z = cplx(nd(rng), nd(rng));
  return c;
}

TEST_CASE("eval_ylm matches reference values") {
  CHECK(eval_ylm(0, 0, {0.9, 2.2}).real() == Approx(0.28209479177387814).epsilon(1e-13));
  CHECK(eval_ylm(0, 0, {0.9, 2.2}).imag() == Approx(0.0).margin(1e-15));

  // Independently computed reference samples (normalized, Condon-Shortley).
  cplx y = eval_ylm(3, 2, {0.3, 0.7});
  CHECK(y.real() == Approx(2.6773949122043095e-01).epsilon(1e-12));
  CHECK(y.imag() == Approx(1.8317044099057420e-01).epsilon(1e-12));

  y = eval_ylm(10, -7, {2.1, 1.2});
  CHECK(y.real() == Approx(5.7554646538022135e-02).epsilon(1e-12));
  CHECK(y.imag() == Approx(9.1225795114141417e-02).epsilon(1e-12));

  y = eval_ylm(7, 7, {5.0, 2.0});
  CHECK(y.real() == Approx(2.3225583754067822e-01).epsilon(1e-12));
  CHECK(y.imag() == Approx(1.1004623472896062e-01).epsilon(1e-12));

  CHECK(eval_ylm(1, 0, {0.0, 0.0}).real() == Approx(0.48860251190291987).epsilon(1e-13));
  CHECK(eval_ylm(4, 0, {0.0, 1.1}).real() == Approx(-1.7886580993668727e-01).epsilon(1e-12));

  CHECK_THROWS_AS(eval_ylm(-1, 0, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(eval_ylm(2, 3, {0, 0}), std::invalid_argument);
}

TEST_CASE("legendre_table agrees with eval_ylm") {
  std::vector<double> table;
  for (double theta : {0.3, 1.0, 2.9}) {
    legendre_table(std::cos(theta), 12, table);
    for (int l = 0; l <= 12; ++l)
      for (int m = 0; m <= l; ++m) {
        double ref = eval_ylm(l, m, {0.0, theta}).real();
        CHECK(table[std::size_t(l) * 13 + m] == Approx(ref).margin(1e-13));
      }
  }
}

TEST_CASE("discrete orthonormality on a degree-exact grid") {
  QuadratureGrid g = product_grid(11, 22);  // exactness 21 >= 2*10
  for (int l = 0; l <= 10; ++l)
    for (int m = -l; m <= l; ++m) {
      NodeFunction f(g);
      for (std::size_t i = 0; i < g.size(); ++i) f.samples[i] = eval_ylm(l, m, g.sph[i]);
      HarmonicCoeffs c = analysis(f, 10);
      for (int l2 = 0; l2 <= 10; ++l2)
        for (int m2 = -l2; m2 <= l2; ++m2) {
          double expect = (l == l2 && m == m2) ? 1.0 : 0.0;
          CHECK(std::abs(c.at(l2, m2) - expect) < 1e-10);
        }
    }
}

TEST_CASE("analysis of reference inputs") {
  QuadratureGrid g = product_grid(9, 18);
  NodeFunction ones(g);
  for (cplx& z : ones.samples) z = 1.0;
  HarmonicCoeffs c = analysis(ones, 8);
  CHECK(c.at(0, 0).real() == Approx(std::sqrt(four_pi)).epsilon(1e-12));
  for (int l = 1; l <= 8; ++l)
    for (int m = -l; m <= l; ++m) CHECK(std::abs(c.at(l, m)) < 1e-10);

  NodeFunction zero(g);
  HarmonicCoeffs cz = analysis(zero, 8);
  for (const cplx& z : cz.v) CHECK(std::abs(z) == 0.0);

  CHECK_THROWS_AS(analysis(ones, -1), std::invalid_argument);
}

TEST_CASE("synthesis of basis coefficients and roundtrip") {
  QuadratureGrid g = product_grid(16, 32);  // exactness 31 >= 2*15
  HarmonicCoeffs e00(15);
  e00.at(0, 0) = 1.0;
  NodeFunction f = synthesis(e00, g);
  for (const cplx& z : f.samples) {
    CHECK(z.real() == Approx(1.0 / std::sqrt(four_pi)).epsilon(1e-12));
    CHECK(std::abs(z.imag()) < 1e-14);
  }

  HarmonicCoeffs c = random_coeffs(15, 42);
  NodeFunction s = synthesis(c, g);
  HarmonicCoeffs back = analysis(s, 15);
  double maxerr = 0.0;
  for (std::size_t i = 0; i < c.v.size(); ++i)
    maxerr = std::max(maxerr, std::abs(c.v[i] - back.v[i]));
  CHECK(maxerr < 1e-10);

  NodeFunction z = synthesis(HarmonicCoeffs(6), g);
  for (const cplx& zz : z.samples) CHECK(std::abs(zz) == 0.0);
}

TEST_CASE("separable and per-node transform paths agree") {
  QuadratureGrid g = product_grid(10, 21);
  // Same nodes re-labelled as a generic (non-product) grid.
  QuadratureGrid generic = g;
  generic.is_product = false;
  HarmonicCoeffs c = random_coeffs(9, 5);
  NodeFunction fp = synthesis(c, g);
  NodeFunction fn = synthesis(c, generic);
  for (std::size_t i = 0; i < fp.samples.size(); ++i)
    CHECK(std::abs(fp.samples[i] - fn.samples[i]) < 1e-11);

  HarmonicCoeffs ap = analysis(fp, 9);
  fn.grid = &generic;
  HarmonicCoeffs an = analysis(fn, 9);
  for (std::size_t i = 0; i < ap.v.size(); ++i) CHECK(std::abs(ap.v[i] - an.v[i]) < 1e-11);
}

TEST_CASE("Parseval identity for band-limited functions") {
  QuadratureGrid g = product_grid(13, 26);
  HarmonicCoeffs c = random_coeffs(12, 9);
  NodeFunction f = synthesis(c, g);
  double node_sq = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) node_sq += g.weights[i] * std::norm(f.samples[i]);
  double coeff_sq = 0.0;
  for (const cplx& z : c.v) coeff_sq += std::norm(z);
  CHECK(node_sq == Approx(coeff_sq).epsilon(1e-9));
  CHECK(node_norm(f) == Approx(c.norm()).epsilon(1e-9));
}

TEST_CASE("sobolev_norm: reference values, nestedness, gradient identity") {
  HarmonicCoeffs e00(4);
  e00.at(0, 0) = 1.0;
  CHECK(sobolev_norm(e00, 1.0) == Approx(0.5).epsilon(1e-14));
  CHECK(sobolev_norm(e00, 0.0) == Approx(1.0).epsilon(1e-14));

  HarmonicCoeffs unit(9);
  unit.at(7, -3) = 1.0;
  for (double s : {0.0, 0.5, 1.0, 2.0})
    CHECK(sobolev_norm(unit, s) == Approx(std::pow(7.5, s)).epsilon(1e-13));

  HarmonicCoeffs c = random_coeffs(10, 77);
  CHECK(sobolev_norm(c, 0.0) <= sobolev_norm(c, 0.5) + 1e-12);
  CHECK(sobolev_norm(c, 0.5) <= sobolev_norm(c, 1.0) + 1e-12);
  CHECK(sobolev_norm(c, 1.0) <= sobolev_norm(c, 2.0) + 1e-12);

  // (l + 1/2)^2 = l(l+1) + 1/4: the H^1 norm equals the gradient form.
  double h1 = sobolev_norm(c, 1.0);
  double grad = 0.0;
  for (int l = 0; l <= c.l_max; ++l)
    for (int m = -l; m <= l; ++m)
      grad += (double(l) * (l + 1) + 0.25) * std::norm(c.at(l, m));
  CHECK(h1 * h1 == Approx(grad).epsilon(1e-12));
}

TEST_CASE("even_projection zeroes odd degrees and is idempotent") {
  QuadratureGrid g = product_grid(4, 8);
  NodeFunction f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.samples[i] = g.nodes[i].z;  // pure l=1
  HarmonicCoeffs c = even_projection(analysis(f, 3));
  for (const cplx& z : c.v) CHECK(std::abs(z) < 1e-12);

  HarmonicCoeffs r = random_coeffs(7, 8);
  HarmonicCoeffs p = even_projection(r);
  HarmonicCoeffs pp = even_projection(p);
  for (std::size_t i = 0; i < p.v.size(); ++i) CHECK(p.v[i] == pp.v[i]);
  CHECK(sobolev_norm(p, 0.0) <= sobolev_norm(r, 0.0));
  for (int l = 0; l <= 7; l += 2)
    for (int m = -l; m <= l; ++m) CHECK(p.at(l, m) == r.at(l, m));
}

TEST_CASE("coefficient CSV roundtrip is bit-exact") {
  HarmonicCoeffs c = random_coeffs(6, 123);
  write_coeffs_csv(c, "test_coeffs.csv");
  HarmonicCoeffs back = read_coeffs_csv("test_coeffs.csv");
  REQUIRE(back.l_max == c.l_max);
  for (std::size_t i = 0; i < c.v.size(); ++i) CHECK(back.v[i] == c.v[i]);
  std::remove("test_coeffs.csv");
}

TEST_CASE("node CSV roundtrip validates the grid") {
  QuadratureGrid g = product_grid(5, 10);
  HarmonicCoeffs c = random_coeffs(4, 55);
  NodeFunction f = synthesis(c, g);
  write_node_csv(f, "test_nodes.csv");
  NodeFunction back = read_node_csv("test_nodes.csv", g);
  for (std::size_t i = 0; i < f.samples.size(); ++i) CHECK(back.samples[i] == f.samples[i]);

  QuadratureGrid other = product_grid(5, 11);
  CHECK_THROWS_AS(read_node_csv("test_nodes.csv", other), std::runtime_error);
  std::remove("test_nodes.csv");
}
