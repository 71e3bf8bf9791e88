#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kirchhoff/radial.hpp"

using namespace kirchhoff;

TEST_CASE("surface factors for dimensions 1 through 4") {
  CHECK(DomainSpec::ball(1, 1.0, 2.0).surface_factor == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(DomainSpec::ball(2, 1.0, 2.0).surface_factor == doctest::Approx(2.0 * M_PI).epsilon(1e-12));
  CHECK(DomainSpec::ball(3, 1.0, 2.0).surface_factor == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
  CHECK(DomainSpec::ball(4, 1.0, 2.0).surface_factor == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-12));
  CHECK(DomainSpec::interval(2.0, 2.0).surface_factor == 1.0);
}

TEST_CASE("critical exponent values and the low-dimension failure") {
  CHECK(critical_exponent(DomainSpec::ball(3, 1.0, 2.0)) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(critical_exponent(DomainSpec::ball(4, 1.0, 2.0)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(critical_exponent(DomainSpec::ball(5, 2.5, 3.0)) == doctest::Approx(7.5).epsilon(1e-14));
  CHECK_THROWS(critical_exponent(DomainSpec::ball(2, 1.0, 2.0)));
  CHECK_THROWS(critical_exponent(DomainSpec::interval(1.0, 2.0)));
}

TEST_CASE("cell boundaries follow the grading power law") {
  auto dom = DomainSpec::ball(3, 2.0, 2.0);
  for (int cells : {8, 16}) {
    for (double grading : {1.0, 2.0, 3.5}) {
      auto g = build_grid(dom, cells, grading);
      REQUIRE(static_cast<int>(g->boundaries.size()) == cells + 1);
      for (int k = 0; k <= cells; ++k) {
        double expect = 2.0 * std::pow(static_cast<double>(k) / cells, grading);
        CHECK(g->boundaries[k] == doctest::Approx(expect).epsilon(1e-14));
      }
    }
  }
  CHECK_THROWS(build_grid(dom, 7, 1.0));
  CHECK_THROWS(build_grid(dom, 8, 0.5));
  CHECK_THROWS(build_grid(dom, 8, 1.0, 1));
}

TEST_CASE("quadrature of the unit function gives R^N / N") {
  for (int N : {1, 2, 3, 4}) {
    for (double R : {0.5, 1.0, 3.0}) {
      auto dom = DomainSpec::ball(N, R, 2.0);
      auto g = build_grid(dom, 16, 2.0);
      std::vector<double> one(g->size(), 1.0);
      CHECK(g->quadrature(one) ==
            doctest::Approx(std::pow(R, N) / N).epsilon(1e-12));
    }
  }
}

TEST_CASE("unit-ball volume through the surface factor") {
  auto dom = DomainSpec::ball(3, 1.0, 2.0);
  auto g = build_grid(dom, 16, 1.0);
  std::vector<double> one(g->size(), 1.0);
  CHECK(dom.surface_factor * g->quadrature(one) ==
        doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
}

TEST_CASE("norms of 1 - rho^2 on the unit ball in dimension 3") {
  // integral |u'|^2 rho^2 = integral 4 rho^4 = 4/5, so the gradient norm
  // squared is 4*pi*4/5 = 16*pi/5.
  auto dom = DomainSpec::ball(3, 1.0, 2.0);
  auto g = build_grid(dom, 32, 1.0);
  auto u = profile_from_function(
      g, [](double r) { return 1.0 - r * r; },
      [](double r) { return -2.0 * r; }, true);
  CHECK(sobolev_norm(u) == doctest::Approx(std::sqrt(16.0 * M_PI / 5.0)).epsilon(1e-12));
  // integral (1-rho^2)^2 rho^2 = 1/3 - 2/5 + 1/7 = 8/105.
  CHECK(lebesgue_norm(u, 2.0) ==
        doctest::Approx(std::sqrt(4.0 * M_PI * 8.0 / 105.0)).epsilon(1e-12));
  CHECK(sup_norm(u) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c1_norm(u) == doctest::Approx(3.0).epsilon(1e-10));

  auto v = profile_from_function(g, [](double r) { return 1.0 - r * r; }, true);
  CHECK(sobolev_norm(v) == doctest::Approx(std::sqrt(16.0 * M_PI / 5.0)).epsilon(1e-10));
}

TEST_CASE("first radial eigenfunction of the 3-ball Laplacian") {
  // u = sin(pi rho)/(pi rho) on B(0,1): ||u'||_2^2 over the ball equals
  // pi^2 ||u||_2^2 and 4 pi integral u^2 rho^2 = 2/pi.
  auto dom = DomainSpec::ball(3, 1.0, 2.0);
  auto g = build_grid(dom, 64, 1.0);
  auto u = profile_from_function(
      g,
      [](double r) { return r == 0.0 ? 1.0 : std::sin(M_PI * r) / (M_PI * r); },
      [](double r) {
        if (r == 0.0) return 0.0;
        return (std::cos(M_PI * r) * M_PI * r - std::sin(M_PI * r)) /
               (M_PI * r * r);
      },
      true);
  const double l2 = lebesgue_norm(u, 2.0);
  CHECK(l2 == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  CHECK(sobolev_norm(u) == doctest::Approx(M_PI * l2).epsilon(1e-12));
}

TEST_CASE("finite differences are exact for quadratics") {
  auto dom = DomainSpec::ball(3, 1.5, 2.0);
  auto g = build_grid(dom, 16, 2.0);
  std::vector<double> vals(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    double x = g->nodes[i];
    vals[i] = 2.0 + 0.5 * x - 3.0 * x * x;
  }
  auto d = fd_derivative(*g, vals);
  for (std::size_t i = 0; i < g->size(); ++i)
    CHECK(d[i] == doctest::Approx(0.5 - 6.0 * g->nodes[i]).epsilon(1e-9));
}

TEST_CASE("norm guards") {
  auto dom = DomainSpec::ball(3, 1.0, 2.0);
  auto g = build_grid(dom, 8, 1.0);
  RadialProfile u;
  u.grid = g;
  u.values.assign(g->size(), 1.0);
  u.has_derivs = false;
  u.dirichlet = true;
  CHECK_THROWS(sobolev_norm(u));
  CHECK_THROWS(c1_norm(u));
  auto v = profile_from_function(g, [](double) { return 1.0; }, false);
  CHECK_THROWS(sobolev_norm(v));
  CHECK(lebesgue_norm(v, 2.0) ==
        doctest::Approx(std::sqrt(4.0 * M_PI / 3.0)).epsilon(1e-12));
  CHECK_THROWS(lebesgue_norm(v, 0.5));
}

TEST_CASE("norm homogeneity and triangle inequality over random profiles") {
  std::mt19937_64 rng(20260822ull);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  std::uniform_int_distribution<int> dim(1, 4);
  auto dom3 = DomainSpec::ball(3, 1.0, 2.0);
  auto grid3 = build_grid(dom3, 16, 1.5);
  for (int trial = 0; trial < 220; ++trial) {
    int N = dim(rng);
    auto dom = DomainSpec::ball(N, 1.0, 2.0);
    auto g = (N == 3) ? grid3 : build_grid(dom, 16, 1.5);
    double a = coef(rng), b = coef(rng), c = coef(rng);
    auto f = [&](double r) { return (1.0 - r) * (a + b * r + c * r * r); };
    auto u = profile_from_function(g, f, true);
    double t = scale(rng);
    RadialProfile tu = u;
    for (auto& v : tu.values) v *= t;
    for (auto& v : tu.derivs) v *= t;
    const double s = 1.0 + 4.0 * std::generate_canonical<double, 53>(rng);
    CHECK(lebesgue_norm(tu, s) ==
          doctest::Approx(t * lebesgue_norm(u, s)).epsilon(1e-10));
    CHECK(sobolev_norm(tu) ==
          doctest::Approx(t * sobolev_norm(u)).epsilon(1e-10));
    CHECK(sup_norm(tu) == doctest::Approx(t * sup_norm(u)).epsilon(1e-10));

    auto h = [&](double r) { return (1.0 - r) * std::cos(3.0 * r); };
    auto w = profile_from_function(g, h, true);
    RadialProfile sum = u;
    for (std::size_t i = 0; i < sum.values.size(); ++i) {
      sum.values[i] += w.values[i];
      sum.derivs[i] += w.derivs[i];
    }
    CHECK(lebesgue_norm(sum, s) <=
          lebesgue_norm(u, s) + lebesgue_norm(w, s) + 1e-10);
    CHECK(sobolev_norm(sum) <= sobolev_norm(u) + sobolev_norm(w) + 1e-10);
  }
}

TEST_CASE("Gauss-Legendre rule integrates high-degree monomials") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  for (int k = 0; k <= 9; ++k) {
    double acc = 0.0;
    for (int j = 0; j < 5; ++j) acc += w[j] * std::pow(x[j], k);
    double expect = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    CHECK(acc == doctest::Approx(expect).epsilon(1e-13));
  }
}
