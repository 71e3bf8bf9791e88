#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kirchhoff/instanton.hpp>
#include <kirchhoff/radial.hpp>
#include <kirchhoff/report.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace kirchhoff;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

double sphere_area(int n) {
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

// Direct radial quadrature of the restricted bubble mass, independent of the
// beta-integral route used in production code.
double direct_mass(int n, double p, double s, double eps, double radius) {
  InstantonShape shape = instanton_shape(n, p);
  std::vector<double> gx, gw;
  gauss_legendre(7, gx, gw);
  const int cells = 3000;
  const double grading = 6.0;
  double acc = 0;
  for (int c = 0; c < cells; ++c) {
    double a = radius * std::pow(static_cast<double>(c) / cells, grading);
    double b = radius * std::pow(static_cast<double>(c + 1) / cells, grading);
    double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    for (std::size_t k = 0; k < gx.size(); ++k) {
      double rho = mid + hl * gx[k];
      acc += hl * gw[k] * std::pow(rho, n - 1) * std::pow(shape.value(eps, rho), s);
    }
  }
  return sphere_area(n) * acc;
}

}  // namespace

TEST_CASE("normalization constant matches closed dimension cases") {
  CHECK(instanton_constant(3, 2.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(instanton_constant(4, 2.0) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::pow(instanton_constant(5, 3.0), 3.0) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK_THROWS(instanton_constant(3, 3.0));
  CHECK_THROWS(instanton_constant(3, 1.0));
  CHECK_THROWS(instanton_constant(1, 0.5));
}

TEST_CASE("normalization constant agrees with the gamma function ratio") {
  std::mt19937_64 rng(20260822ull);
  std::uniform_int_distribution<int> dim(3, 8);
  for (int trial = 0; trial < 200; ++trial) {
    int n = dim(rng);
    std::uniform_real_distribution<double> pd(1.05, n - 0.05);
    double p = pd(rng);
    double pp = p / (p - 1.0);
    auto beta = [](double a, double b) {
      return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    };
    double istar = beta(n / pp, n - n / pp) / pp;
    double j = beta(n / pp + 1.0, n - n / pp - 1.0) / pp;
    double k0 = std::pow((n - p) / (p - 1.0), p);
    double ratio = k0 * j / istar;
    CHECK(std::pow(instanton_constant(n, p), p) == doctest::Approx(ratio).epsilon(1e-10));
  }
}

TEST_CASE("profile satisfies the critical equation pointwise") {
  for (auto [n, p] : {std::pair<int, double>{3, 2.0}, {5, 3.0}, {4, 2.5}}) {
    InstantonShape shape = instanton_shape(n, p);
    double eps = 0.7;
    double pstar = critical_exponent(n, p);
    auto flux = [&](double rho) {
      double du = shape.derivative(eps, rho);
      return std::pow(rho, n - 1) * std::pow(std::abs(du), p - 2.0) * du;
    };
    for (double rho : {0.3 * eps, eps, 3.0 * eps, 10.0 * eps}) {
      double h = 1e-5 * rho;
      double lhs = -(flux(rho + h) - flux(rho - h)) / (2.0 * h);
      double rhs = std::pow(rho, n - 1) * std::pow(shape.value(eps, rho), pstar - 1.0);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
  }
}

TEST_CASE("embedding level closed form in three dimensions") {
  CHECK(critical_mass(3, 2.0) ==
        doctest::Approx(3.0 * std::sqrt(3.0) * kPi * kPi / 4.0).epsilon(1e-12));
  CHECK(sobolev_constant(3, 2.0) ==
        doctest::Approx(3.0 * std::pow(kPi / 2.0, 4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("whole-space masses coincide with the embedding level") {
  for (auto [n, p] : {std::pair<int, double>{3, 2.0}, {4, 2.0}, {5, 3.0}, {3, 2.5}}) {
    double pstar = critical_exponent(n, p);
    double level = critical_mass(n, p);
    double mass1 = instanton_mass(n, p, pstar, 0.3, kInf);
    double mass2 = instanton_mass(n, p, pstar, 0.007, kInf);
    double grad1 = instanton_gradient_mass(n, p, 0.3, kInf);
    double grad2 = instanton_gradient_mass(n, p, 0.007, kInf);
    CHECK(mass1 == doctest::Approx(level).epsilon(1e-10));
    CHECK(mass2 == doctest::Approx(level).epsilon(1e-10));
    CHECK(grad1 == doctest::Approx(level).epsilon(1e-10));
    CHECK(grad2 == doctest::Approx(level).epsilon(1e-10));
  }
}

TEST_CASE("restricted masses match direct quadrature") {
  std::mt19937_64 rng(20260823ull);
  std::uniform_int_distribution<int> dim(3, 5);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (int trial = 0; trial < 120; ++trial) {
    int n = dim(rng);
    double p = 1.3 + un(rng) * (std::min(n - 0.2, 3.5) - 1.3);
    double pstar = critical_exponent(n, p);
    double eps = std::pow(10.0, -3.0 * un(rng));
    double radius = eps * std::pow(10.0, 2.5 * un(rng));
    double s = 1.2 + un(rng) * (pstar - 0.2);
    double viaBeta = instanton_mass(n, p, s, eps, radius);
    double direct = direct_mass(n, p, s, eps, radius);
    CHECK(viaBeta == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("incomplete beta matches elementary antiderivatives") {
  std::mt19937_64 rng(20260824ull);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = 0.2 + 3.0 * un(rng);
    double z = 0.05 + 0.9 * un(rng);
    CHECK(lower_incomplete_beta(a, 1.0, z) ==
          doctest::Approx(std::pow(z, a) / a).epsilon(1e-11));
    double b = -2.0 + 5.0 * un(rng);
    if (std::abs(b) < 0.05) b = 0.5;
    CHECK(lower_incomplete_beta(1.0, b, z) ==
          doctest::Approx((1.0 - std::pow(1.0 - z, b)) / b).epsilon(1e-10));
  }
  double complete = std::exp(std::lgamma(2.5) + std::lgamma(1.5) - std::lgamma(4.0));
  CHECK(lower_incomplete_beta(2.5, 1.5, 1.0) == doctest::Approx(complete).epsilon(1e-13));
  CHECK_THROWS(lower_incomplete_beta(2.5, -0.5, 1.0));
  CHECK_THROWS(lower_incomplete_beta(-1.0, 1.0, 0.5));
}

TEST_CASE("cutoff shape, junction regularity, and derivative") {
  double m = 2.5;
  double lo = 0.5 / m, hi = 1.0 / m;
  CHECK(cutoff_value(m, 0.0) == 1.0);
  CHECK(cutoff_value(m, 0.9 * lo) == 1.0);
  CHECK(cutoff_value(m, hi) == 0.0);
  CHECK(cutoff_value(m, 1.7 * hi) == 0.0);
  CHECK(cutoff_value(m, 0.5 * (lo + hi)) == doctest::Approx(0.5).epsilon(1e-14));
  for (double d : {1e-7, 1e-9}) {
    CHECK(cutoff_value(m, lo + d) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cutoff_value(m, hi - d) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(std::abs(cutoff_derivative(m, lo + d)) <= 200.0 * d);
    CHECK(std::abs(cutoff_derivative(m, hi - d)) <= 200.0 * d);
  }
  std::mt19937_64 rng(20260825ull);
  std::uniform_real_distribution<double> ur(lo + 1e-3, hi - 1e-3);
  for (int trial = 0; trial < 200; ++trial) {
    double rho = ur(rng);
    double h = 1e-6;
    double fd = (cutoff_value(m, rho + h) - cutoff_value(m, rho - h)) / (2.0 * h);
    CHECK(cutoff_derivative(m, rho) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("truncated profile mass sits between the inner and outer bubbles") {
  std::mt19937_64 rng(20260826ull);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = un(rng) < 0.5 ? 3 : 4;
    double p = un(rng) < 0.5 ? 2.0 : 2.3;
    double pstar = critical_exponent(n, p);
    double eps = std::pow(10.0, -1.0 - 2.0 * un(rng));
    double beta = 0.2 + 0.7 * un(rng);
    double m = std::pow(eps, -beta);
    double s = 1.1 + un(rng) * (pstar - 1.2);
    GridPtr grid = build_grid(DomainSpec::ball(n, 1.0 / m, p), 384, 6.0);
    RadialProfile prof = truncated_instanton(grid, n, p, eps, m);
    double mid = std::pow(lebesgue_norm(prof, s), s);
    double inner = instanton_mass(n, p, s, eps, 0.5 / m);
    double outer = instanton_mass(n, p, s, eps, 1.0 / m);
    CHECK(mid <= outer * (1.0 + 1e-6));
    CHECK(mid >= inner * (1.0 - 1e-6));
  }
}

TEST_CASE("truncated profile equals the bubble inside and vanishes outside") {
  int n = 3;
  double p = 2.0, eps = 0.5, m = 1.0;
  GridPtr grid = build_grid(DomainSpec::ball(n, 1.0, p), 256, 2.0);
  RadialProfile prof = truncated_instanton(grid, n, p, eps, m);
  InstantonShape shape = instanton_shape(n, p);
  REQUIRE(prof.has_derivs);
  CHECK(prof.dirichlet);
  for (std::size_t i = 0; i < grid->nodes.size(); ++i) {
    double rho = grid->nodes[i];
    if (rho < 0.4) {
      CHECK(prof.values[i] == doctest::Approx(shape.value(eps, rho)).epsilon(1e-14));
      CHECK(prof.derivs[i] == doctest::Approx(shape.derivative(eps, rho)).epsilon(1e-14));
    }
  }
  std::vector<double> fd = fd_derivative(*grid, prof.values);
  for (std::size_t i = 1; i + 1 < grid->nodes.size(); ++i) {
    double rho = grid->nodes[i];
    if (rho < 0.4)
      CHECK(prof.derivs[i] == doctest::Approx(fd[i]).epsilon(1e-5));
    else if (std::abs(rho - 0.5) > 0.02 && rho < 0.97)
      CHECK(std::abs(prof.derivs[i] - fd[i]) < 5e-3);
  }
}

TEST_CASE("bare profile carries analytic derivatives without a boundary zero") {
  GridPtr grid = build_grid(DomainSpec::ball(3, 2.0, 2.0), 128, 2.0);
  RadialProfile prof = instanton_profile(grid, 3, 2.0, 0.4);
  CHECK_FALSE(prof.dirichlet);
  InstantonShape shape = instanton_shape(3, 2.0);
  CHECK(prof.values.back() == doctest::Approx(shape.value(0.4, grid->nodes.back())).epsilon(1e-14));
}

TEST_CASE("eta exponent prediction formula") {
  EtaPrediction a4 = predicted_eta_exponent(3, 2.0, 4.0, 0.3);
  CHECK(a4.exponent == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_FALSE(a4.logarithmic);
  EtaPrediction a3 = predicted_eta_exponent(3, 2.0, 3.0, 0.6);
  CHECK(a3.exponent == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(a3.logarithmic);
  EtaPrediction a2 = predicted_eta_exponent(3, 2.0, 2.0, 0.3);
  CHECK(a2.exponent == doctest::Approx(1.3).epsilon(1e-13));
  CHECK_FALSE(a2.logarithmic);
  CHECK_THROWS(predicted_eta_exponent(3, 2.0, 2.0, 1.0));
  CHECK_THROWS(predicted_eta_exponent(3, 2.0, -1.0, 0.5));
}

TEST_CASE("truncation ladder reproduces the predicted rates") {
  std::vector<double> ladder = {1e-2, std::pow(10.0, -2.75), std::pow(10.0, -3.5),
                                std::pow(10.0, -4.25), 1e-5};
  AsymptoticCheck chk = verify_asymptotics(3, 2.0, 0.3, ladder, {4.0, 3.0, 2.0});
  CHECK(chk.predicted_gradient_slope == doctest::Approx(1.0));
  CHECK(chk.predicted_critical_slope == doctest::Approx(3.0));
  for (const AsymptoticRow& row : chk.rows) {
    CHECK(row.gradient_gap > 0);
    CHECK(row.critical_gap < 0);
  }
  CHECK(std::abs(chk.gradient_gap_slope - 1.0) <= 0.06);

  std::vector<double> lem, lcg;
  for (std::size_t i = 0; i < 4; ++i) {
    lem.push_back(std::log(chk.rows[i].eps * chk.rows[i].m));
    lcg.push_back(std::log(std::abs(chk.rows[i].critical_gap)));
  }
  CHECK(std::abs(lsq_slope(lem, lcg) - 3.0) <= 0.3);

  CHECK(std::abs(chk.eta_slope[0] - 1.0) <= 0.08);
  CHECK(std::abs(chk.eta_slope[2] - 1.3) <= 0.08);
  CHECK(chk.eta_predicted[1].logarithmic);
  double lo = kInf, hi = 0;
  for (const AsymptoticRow& row : chk.rows) {
    double scale = std::pow(row.eps, 1.5) * std::abs(std::log(row.eps * row.m));
    double ratio = row.eta[1] / scale;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo <= 2.0);
}

TEST_CASE("guards report divergent or inconsistent requests") {
  CHECK_THROWS(instanton_mass(3, 2.0, 2.9, 0.1, kInf));
  GridPtr small = build_grid(DomainSpec::ball(3, 0.4, 2.0), 32, 2.0);
  CHECK_THROWS(truncated_instanton(small, 3, 2.0, 0.1, 1.0));
  CHECK_THROWS(verify_asymptotics(3, 2.0, 0.3, {0.1}, {2.0}));
  CHECK_THROWS(verify_asymptotics(3, 2.0, 0.3, {0.1, 2.0}, {2.0}));
  CHECK_THROWS(verify_asymptotics(3, 2.0, 0.3, {0.1, 0.01}, {0.5}));
}
