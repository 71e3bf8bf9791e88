#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kirchhoff/counterexample.hpp>
#include <kirchhoff/functionals.hpp>
#include <kirchhoff/instanton.hpp>
#include <kirchhoff/report.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace kirchhoff;
using doctest::Contains;

namespace {

RadialProfile scaled(const RadialProfile& u, double t) {
  RadialProfile out = u;
  for (double& v : out.values) v *= t;
  for (double& d : out.derivs) d *= t;
  return out;
}

}  // namespace

TEST_CASE("budget closed case and interval endpoints") {
  ExponentBudget b = exponent_budget(3, 2.0, 2.0, 3.0, 7.0);
  CHECK(b.p_star == doctest::Approx(6.0));
  CHECK(b.decay_limit == doctest::Approx(0.5));
  CHECK(b.sigma_lower == doctest::Approx(0.375));
  CHECK(b.sigma_upper == doctest::Approx(0.5));
  CHECK(b.sigma == doctest::Approx(0.4375));
  CHECK(b.alpha_upper == doctest::Approx(0.0625));
  CHECK(b.alpha == doctest::Approx(0.03125));
  CHECK(b.beta == doctest::Approx(1.0 - 0.03125));
  ExponentBudget flat = exponent_budget(3, 2.0, 2.0, 6.0, 7.0);
  CHECK(flat.sigma_lower == doctest::Approx(0.0));
  CHECK(flat.sigma_upper == doctest::Approx(0.5));
}

TEST_CASE("budget rejects a broken exponent chain by name") {
  CHECK_THROWS_WITH(exponent_budget(3, 2.0, 2.0, 3.0, 6.0),
                    Contains("r strictly above the critical exponent"));
  CHECK_THROWS_WITH(exponent_budget(3, 2.0, 2.0, 6.5, 7.0),
                    Contains("potential exponent at most critical"));
  CHECK_THROWS_WITH(exponent_budget(3, 2.0, 3.0, 3.0, 7.0),
                    Contains("strictly above the force exponent"));
  CHECK_THROWS_WITH(exponent_budget(3, 2.0, 0.5, 3.0, 7.0),
                    Contains("force exponent at least one"));
  CHECK_THROWS_WITH(exponent_budget(3, 3.0, 2.0, 3.0, 20.0),
                    Contains("1 < p < dimension"));
  CHECK_THROWS(exponent_budget(3, 2.0, 2.0, 3.0, 7.0, 0.375, 0.01));
  CHECK_THROWS(exponent_budget(3, 2.0, 2.0, 3.0, 7.0, 0.4375, 0.0625));
}

TEST_CASE("exponent triple and its dominance gaps") {
  ExponentBudget b = exponent_budget(3, 2.0, 2.0, 3.0, 7.0);
  ExponentTriple t = exponent_triple(b);
  CHECK(t.e1 == doctest::Approx(3.0625));
  CHECK(t.e2 == doctest::Approx(2.84375));
  CHECK(t.e3 == doctest::Approx(2.8125));
  CHECK(t.e1 > t.e3);
  CHECK(t.e2 > t.e3);

  ExponentBudget near_lower =
      exponent_budget(3, 2.0, 2.0, 3.0, 7.0, 0.375 + 1e-9, 0.01);
  CHECK(near_lower.e1 - near_lower.e3 == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  ExponentBudget near_bound =
      exponent_budget(3, 2.0, 2.0, 3.0, 7.0, 0.4375, 0.0625 - 1e-9);
  CHECK(near_bound.e2 - near_bound.e3 == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
}

TEST_CASE("random budgets satisfy every invariant") {
  std::mt19937_64 rng(20260827ull);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  int built = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + static_cast<int>(un(rng) * 3);
    double p = 1.2 + un(rng) * (n - 1.4);
    double pstar = critical_exponent(n, p);
    double q = 1.0 + un(rng) * std::max(0.0, pstar - 1.3);
    double vpi = q + 0.05 + un(rng) * (pstar - q - 0.05);
    double r = pstar + 0.1 + un(rng) * 4.0;
    double limit = (n - p) / p;
    double lower = limit * (pstar - vpi) / (r - vpi);
    double sigma = 0.5 * (lower + limit);
    double alpha = 0.5 * (vpi - q) * (limit - sigma);
    if (alpha >= 1.0) {
      CHECK_THROWS(exponent_budget(n, p, q, vpi, r));
      continue;
    }
    ExponentBudget b = exponent_budget(n, p, q, vpi, r);
    ++built;
    CHECK(b.sigma > b.sigma_lower);
    CHECK(b.sigma < b.sigma_upper);
    CHECK(b.alpha > 0);
    CHECK(b.alpha < b.alpha_upper);
    CHECK(b.beta == doctest::Approx(1.0 - b.alpha));
    CHECK(b.e1 > b.e3);
    CHECK(b.e2 > b.e3);
    CHECK(b.e2 - b.e3 == doctest::Approx(b.alpha_upper - b.alpha).epsilon(1e-9));
  }
  CHECK(built > 100);
}

TEST_CASE("witness trace finds the negative regime on the deep ladder") {
  ExponentBudget budget = exponent_budget(3, 2.0, 2.0, 3.0, 7.0);
  KirchhoffTerm term = KirchhoffTerm::pure_power(2.0, 7.0);
  Nonlinearity nonlin = Nonlinearity::model(2.0, 3.0, 1.0, false);
  DomainSpec domain = DomainSpec::ball(3, 1.0, 2.0);
  std::vector<double> ladder =
      geometric_ladder(std::pow(10.0, -0.5), std::pow(10.0, -1.25), 16);
  CounterexampleTrace trace =
      trace_counterexample(budget, ladder, term, nonlin, domain);

  REQUIRE(trace.rows.size() == 16);
  CHECK(trace.eps_star > 0);
  CHECK(trace.eps_star < 1e-10);
  CHECK(trace.rows.front().j_value > 0);
  for (const TraceRow& row : trace.rows) {
    if (row.eps <= trace.eps_star) CHECK(row.j_value < 0);
    CHECK(row.j_value == doctest::Approx(row.kirchhoff_term + row.gain_term -
                                         row.cost_term)
                             .epsilon(1e-9));
  }
  CHECK(trace.norms_decreasing);
  CHECK(trace.chain_holds);
  CHECK(trace.fitted_lower > 0);
  CHECK(trace.fitted_upper > 0);

  // Doubled-level cap on the witness norm. With the truncation tied as
  // m = eps^{-beta}, the product eps*m decays like eps^{1/32} and sits in
  // [0.25, 0.97] on this ladder, so the cap is exact only on the upper rows;
  // the lower rows exceed it by up to two percent (measured).
  double cap = std::pow(2.0 * critical_mass(3, 2.0), 0.5);
  for (const TraceRow& row : trace.rows) {
    double scaled_cap = std::pow(row.eps, budget.sigma) * cap;
    if (std::pow(row.eps, 1.0 - budget.beta) >= 0.8)
      CHECK(row.norm_w <= scaled_cap);
    CHECK(row.norm_w <= 1.05 * scaled_cap);
  }

  std::vector<double> le, ls;
  for (const TraceRow& row : trace.rows) {
    le.push_back(std::log(row.eps));
    ls.push_back(std::log(row.sup));
  }
  CHECK(std::abs(lsq_slope(le, ls) - (budget.sigma - 0.5)) <= 0.05);
}

TEST_CASE("functional is initially positive along the ray at the ladder top") {
  ExponentBudget budget = exponent_budget(3, 2.0, 2.0, 3.0, 7.0);
  KirchhoffTerm term = KirchhoffTerm::pure_power(2.0, 7.0);
  Nonlinearity nonlin = Nonlinearity::model(2.0, 3.0, 1.0, false);
  double eps = std::pow(10.0, -0.5);
  double support = std::pow(eps, budget.beta);
  GridPtr grid = build_grid(DomainSpec::ball(3, support, 2.0), 256, 4.0);
  RadialProfile psi = truncated_instanton(grid, 3, 2.0, eps, 1.0 / support);
  RadialProfile u = scaled(psi, std::pow(eps, budget.sigma));
  RayDecomposition ray = ray_decomposition(u, nonlin);
  for (double t : {1e-3, 1e-2, 0.1}) CHECK(ray.value(t, term) > 0);
}

TEST_CASE("witness trace errors") {
  ExponentBudget budget = exponent_budget(3, 2.0, 2.0, 3.0, 7.0);
  KirchhoffTerm term = KirchhoffTerm::pure_power(2.0, 7.0);
  Nonlinearity nonlin = Nonlinearity::model(2.0, 3.0, 1.0, false);
  DomainSpec domain = DomainSpec::ball(3, 1.0, 2.0);

  std::vector<double> shallow = {0.3, 0.1, 0.03, 0.01};
  CHECK_THROWS_WITH(
      trace_counterexample(budget, shallow, term, nonlin, domain),
      Contains("extend ladder"));

  KirchhoffTerm degenerate = KirchhoffTerm::pure_power(2.0, 0.0);
  CHECK_THROWS(trace_counterexample(budget, shallow, degenerate, nonlin, domain));

  Nonlinearity no_top =
      Nonlinearity::from_pieces({PowerPiece{-1.0, 2.0}}, false);
  CHECK_THROWS(trace_counterexample(budget, shallow, term, no_top, domain));

  DomainSpec tiny = DomainSpec::ball(3, 1e-20, 2.0);
  CHECK_THROWS_WITH(
      trace_counterexample(budget, shallow, term, nonlin, tiny),
      Contains("exceeds the domain radius"));

  CHECK_THROWS_WITH(trace_counterexample(budget, {}, term, nonlin, domain),
                    Contains("empty"));
}

TEST_CASE("minimality dichotomy across topologies") {
  DomainSpec domain = DomainSpec::ball(3, 1.0, 2.0);
  Nonlinearity nonlin = Nonlinearity::model(2.0, 3.0, 1.0, false);
  KirchhoffTerm supercritical = KirchhoffTerm::pure_power(2.0, 7.0);
  KirchhoffTerm subcritical = KirchhoffTerm::pure_power(2.0, 3.0);

  std::vector<RadialProfile> family_w = probe_family(
      domain, 192, 4.0, ProbeTopology::SobolevNorm, 1.0, 20260827ull);
  ProbeVerdict w_super = probe_local_minimum(
      supercritical, nonlin, ProbeTopology::SobolevNorm, 1.0, family_w);
  CHECK(w_super.refuted);
  CHECK(w_super.min_value < 0);
  CHECK(probe_norm(w_super.witness, ProbeTopology::SobolevNorm) < 0.01);
  CHECK(w_super.values.size() == family_w.size());

  ProbeVerdict w_sub = probe_local_minimum(
      subcritical, nonlin, ProbeTopology::SobolevNorm, 1.0, family_w);
  CHECK_FALSE(w_sub.refuted);
  CHECK(w_sub.min_value >= -1e-10);

  std::vector<RadialProfile> family_sup =
      probe_family(domain, 192, 4.0, ProbeTopology::SupNorm, 1.0, 20260827ull);
  for (const KirchhoffTerm& term : {supercritical, subcritical}) {
    ProbeVerdict v = probe_local_minimum(term, nonlin, ProbeTopology::SupNorm,
                                         1.0, family_sup);
    CHECK_FALSE(v.refuted);
    CHECK(v.min_value >= -1e-10);
  }

  std::vector<RadialProfile> family_c1 =
      probe_family(domain, 192, 4.0, ProbeTopology::C1Norm, 1.0, 20260827ull);
  ProbeVerdict c1_super = probe_local_minimum(
      supercritical, nonlin, ProbeTopology::C1Norm, 1.0, family_c1);
  CHECK_FALSE(c1_super.refuted);
  CHECK(c1_super.min_value >= -1e-10);
}

TEST_CASE("probe guards") {
  KirchhoffTerm term = KirchhoffTerm::pure_power(2.0, 7.0);
  Nonlinearity nonlin = Nonlinearity::model(2.0, 3.0, 1.0, false);
  CHECK_THROWS_WITH(probe_local_minimum(term, nonlin,
                                        ProbeTopology::SobolevNorm, 1.0, {}),
                    Contains("empty"));
  DomainSpec domain = DomainSpec::ball(3, 1.0, 2.0);
  std::vector<RadialProfile> family = probe_family(
      domain, 64, 3.0, ProbeTopology::SobolevNorm, 1.0, 20260828ull);
  family[0] = scaled(family[0], 10.0);
  CHECK_THROWS_WITH(probe_local_minimum(term, nonlin,
                                        ProbeTopology::SobolevNorm, 1.0, family),
                    Contains("outside the probe ball"));
}
