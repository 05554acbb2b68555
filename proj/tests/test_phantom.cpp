#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "funkframe/phantom.hpp"
#include "funkframe/sobolev.hpp"

using namespace funkframe;
using Catch::Approx;

static Point3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return normalized({nd(rng), nd(rng), nd(rng)});
}

TEST_CASE("cap profile: support, boundary smoothness, peak") {
  CHECK(cap_profile(1.0, 0.0) == 1.0);
  CHECK(cap_profile(-1.0, 0.0) == 0.0);
  CHECK(cap_profile(0.5, 0.7) == 0.0);
  CHECK(cap_profile(0.7, 0.7) == 0.0);
  // C^1 at the boundary: value and slope vanish as t -> h+.
  double eps = 1e-8;
  CHECK(cap_profile(0.7 + eps, 0.7) < 1e-14);
  CHECK((cap_profile(0.7 + 2 * eps, 0.7) - cap_profile(0.7 + eps, 0.7)) / eps < 1e-6);
}

TEST_CASE("phantom evaluation at reference points") {
  Phantom p;
  p.caps = {{{0.0, 0.0, 1.0}, 0.0, 2.0}};
  // At the cap center: a * (s(1) + s(-1)) / 2 = a / 2.
  CHECK(phantom_eval(p, {0.0, 0.0, 1.0}) == Approx(1.0).epsilon(1e-15));

  Phantom q;
  q.caps = {{{0.0, 0.0, 1.0}, 0.5, 3.0}};
  // Perpendicular to the center with h > 0: outside both caps.
  CHECK(phantom_eval(q, {1.0, 0.0, 0.0}) == 0.0);
  CHECK(phantom_eval(q, {0.0, 1.0, 0.0}) == 0.0);
}

TEST_CASE("evenized phantom is exactly even") {
  Phantom p = default_phantom();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    Point3 xi = random_unit(rng);
    CHECK(phantom_eval(p, xi) == phantom_eval(p, -xi));
  }
}

TEST_CASE("phantom validation rejects bad caps") {
  Phantom empty;
  CHECK_THROWS_AS(validate(empty), std::invalid_argument);
  Phantom offsphere;
  offsphere.caps = {{{0.5, 0.0, 0.0}, 0.0, 1.0}};
  CHECK_THROWS_AS(validate(offsphere), std::invalid_argument);
  Phantom badh;
  badh.caps = {{{1.0, 0.0, 0.0}, 1.0, 1.0}};
  CHECK_THROWS_AS(validate(badh), std::invalid_argument);
}

TEST_CASE("phantom file roundtrip and parse errors") {
  Phantom p = default_phantom();
  save_phantom(p, "test_phantom.txt");
  Phantom back = load_phantom("test_phantom.txt");
  REQUIRE(back.caps.size() == p.caps.size());
  for (std::size_t i = 0; i < p.caps.size(); ++i) {
    CHECK(back.caps[i].center.x == p.caps[i].center.x);
    CHECK(back.caps[i].h == p.caps[i].h);
    CHECK(back.caps[i].amplitude == p.caps[i].amplitude);
  }
  {
    std::ofstream out("test_phantom_bad.txt");
    out << "0 0 1 not-a-number 1\n";
  }
  CHECK_THROWS_AS(load_phantom("test_phantom_bad.txt"), std::runtime_error);
  std::remove("test_phantom.txt");
  std::remove("test_phantom_bad.txt");
}

TEST_CASE("forward data of a polar cap depends only on colatitude") {
  Phantom p;
  p.caps = {{{0.0, 0.0, 1.0}, 0.6, 1.5}};
  QuadratureGrid g = product_grid(8, 16);
  // The cap kink limits the circle rule to algebraic convergence; 1024
  // points push the azimuthal asymmetry below the tolerance.
  NodeFunction d = forward_data(p, g, 1024);
  for (int it = 0; it < g.n_theta; ++it) {
    cplx ref = d.samples[std::size_t(it) * g.n_lambda];
    for (int il = 1; il < g.n_lambda; ++il)
      CHECK(std::abs(d.samples[std::size_t(it) * g.n_lambda + il] - ref) < 1e-10);
  }
}

TEST_CASE("forward data: zero phantom, evenness at antipodes") {
  Phantom z;
  z.caps = {{{0.0, 0.0, 1.0}, 0.0, 0.0}};
  QuadratureGrid g = product_grid(6, 12);
  NodeFunction d = forward_data(z, g, 64);
  for (const cplx& v : d.samples) CHECK(std::abs(v) == 0.0);

  NodeFunction dd = forward_data(default_phantom(), g, 128);
  for (int it = 0; it < g.n_theta; ++it)
    for (int il = 0; il < g.n_lambda; ++il) {
      std::size_t i = std::size_t(it) * g.n_lambda + il;
      std::size_t ia = std::size_t(g.n_theta - 1 - it) * g.n_lambda +
                       (il + g.n_lambda / 2) % g.n_lambda;
      CHECK(std::abs(dd.samples[i] - dd.samples[ia]) < 1e-12);
    }
}

TEST_CASE("spectral and direct forward operators agree on smooth phantoms") {
  // Rf computed two ways: great-circle quadrature vs eigenvalue multiplication
  // of the analyzed phantom. Agreement is the inverse-crime guard.
  const int l_max = 60;
  QuadratureGrid g = product_grid(61, 122);
  Phantom p = default_phantom();
  NodeFunction f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.samples[i] = phantom_eval(p, g.nodes[i]);
  NodeFunction direct = forward_data(p, g, 256);
  NodeFunction spectral = synthesis(fr_spectral(analysis(f, l_max)), g);
  CHECK(relative_error(direct, spectral) < 2e-3);
}

TEST_CASE("noise injection: exact level, determinism, seed separation") {
  QuadratureGrid g = product_grid(10, 20);
  Phantom p = default_phantom();
  NodeFunction d = forward_data(p, g, 64);

  NodeFunction same = add_noise(d, {0.0, 42});
  for (std::size_t i = 0; i < d.samples.size(); ++i) CHECK(same.samples[i] == d.samples[i]);

  NodeFunction noisy = add_noise(d, {0.20, 42});
  NodeFunction diff(g);
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    diff.samples[i] = noisy.samples[i] - d.samples[i];
  CHECK(node_norm(diff) / node_norm(d) == Approx(0.20).margin(1e-12));

  NodeFunction noisy2 = add_noise(d, {0.20, 42});
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    CHECK(noisy2.samples[i] == noisy.samples[i]);  // bitwise reproducible

  NodeFunction other = add_noise(d, {0.20, 43});
  bool any_diff = false;
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    if (other.samples[i] != noisy.samples[i]) any_diff = true;
  CHECK(any_diff);
  NodeFunction diff2(g);
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    diff2.samples[i] = other.samples[i] - d.samples[i];
  CHECK(node_norm(diff2) / node_norm(d) == Approx(0.20).margin(1e-12));

  NodeFunction zero(g);
  CHECK_THROWS_AS(add_noise(zero, {0.1, 1}), std::invalid_argument);
}

TEST_CASE("relative error: identity, zero, scaling, degenerate reference") {
  QuadratureGrid g = product_grid(5, 10);
  NodeFunction f = forward_data(default_phantom(), g, 64);
  CHECK(relative_error(f, f) == 0.0);

  NodeFunction zero(g);
  CHECK(relative_error(f, zero) == Approx(1.0).epsilon(1e-14));

  NodeFunction twice(g);
  for (std::size_t i = 0; i < f.samples.size(); ++i) twice.samples[i] = 2.0 * f.samples[i];
  CHECK(relative_error(f, twice) == Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(relative_error(zero, f), std::invalid_argument);
}
