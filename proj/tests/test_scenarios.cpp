#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kirchhoff/radial.hpp>
#include <kirchhoff/solver.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>

using namespace kirchhoff;

namespace {

GridPtr unit_ball_grid(int cells, double grading) {
  return build_grid(DomainSpec::ball(3, 1.0, 2.0), cells, grading, 5);
}

double lowest_value(const SolveReport& rep) {
  double low = 0;
  for (double v : rep.profile.values) low = std::min(low, v);
  return low;
}

bool has_note(const std::vector<std::string>& notes, const std::string& piece) {
  for (const auto& note : notes)
    if (note.find(piece) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("three solutions scenario certifies the geometry and delivers the ordered levels") {
  GridPtr grid = unit_ball_grid(96, 3.0);
  ThreeSolutionsResult res =
      three_solutions_scenario(2.0, 3.0, 2.5, 4.0, 32.0, 0.01, grid,
                               20260902ull);
  const ThreeSolutionsCertificate& cert = res.certificate;

  REQUIRE(cert.holds);
  CHECK(cert.failures.empty());
  CHECK(cert.k_at_phi < 0);
  CHECK(cert.j_at_phi < 0);
  CHECK(cert.s_level > 0);
  CHECK(cert.k_max_segment < cert.s_level);
  CHECK(cert.j_segment_max < cert.s_level);
  CHECK(cert.radius >= 2.0);
  CHECK(cert.sphere_min >= 2.0 * cert.s_level);
  CHECK(cert.t_far > cert.radius);
  CHECK(cert.j_at_far < 0);

  // Level ordering: negative, inside (0, S], at least 2S.
  CHECK(res.inner_min.kind == "local-min");
  CHECK(res.inner_min.j_plus_value < -0.1);
  CHECK(res.inner_min.norm_w > 1.0);
  CHECK(res.inner_min.norm_w < cert.radius);
  CHECK(res.low_pass.kind == "mountain-pass");
  CHECK(res.low_pass.j_plus_value > 0);
  CHECK(res.low_pass.j_plus_value <= cert.s_level * (1 + 1e-6));
  CHECK(res.high_pass.kind == "mountain-pass");
  CHECK(res.high_pass.j_plus_value >= 2.0 * cert.s_level);
  CHECK(res.min_pairwise_distance > 1e-3);

  // Critical points of the clipped functional stay nonnegative nodewise.
  CHECK(lowest_value(res.inner_min) >= -1e-8);
  CHECK(lowest_value(res.low_pass) >= -1e-8);
  CHECK(lowest_value(res.high_pass) >= -1e-8);
}

TEST_CASE("three solutions scenario validates its inputs") {
  GridPtr tiny = unit_ball_grid(8, 1.0);
  CHECK_THROWS_WITH(
      three_solutions_scenario(2.0, 3.0, 2.5, 4.0, 32.0, 0.01, nullptr, 1ull),
      "grid is required");
  GridPtr interval =
      build_grid(DomainSpec::interval(1.0, 2.0), 8, 1.0, 5);
  CHECK_THROWS_WITH(
      three_solutions_scenario(2.0, 3.0, 2.5, 4.0, 32.0, 0.01, interval, 1ull),
      "scenario requires a ball domain with p = 2");
  CHECK_THROWS_WITH(
      three_solutions_scenario(2.5, 3.0, 2.0, 4.0, 32.0, 0.01, tiny, 1ull),
      "exponents must satisfy 1 < q < sigma < vpi");
  CHECK_THROWS_WITH(
      three_solutions_scenario(2.0, 3.0, 2.5, 4.0, -1.0, 0.01, tiny, 1ull),
      "mu and lambda must be positive");
}

TEST_CASE("two regime term above the critical exponent carries an extra negative minimizer") {
  GridPtr grid = unit_ball_grid(160, 4.0);
  MinPowerResult res =
      min_power_scenario(7.0, 2.0, 2.0, 3.0, 13.0, grid, 20260902ull);

  CHECK(res.high_first_exponent);
  CHECK(res.sphere_floor > 0);
  CHECK(has_note(res.notes, "concentration witness at level"));

  REQUIRE(res.inner_min.has_value());
  CHECK(res.inner_min->kind == "local-min");
  CHECK(res.inner_min->j_plus_value < -1e-4);
  CHECK(res.inner_min->norm_w > 0.1);
  CHECK(res.inner_min->norm_w < 1.0);
  CHECK(lowest_value(*res.inner_min) >= -1e-8);

  CHECK(res.pass.kind == "mountain-pass");
  CHECK(res.pass.j_plus_value > 0);
  CHECK(res.pass.norm_w > 1.0);
  CHECK(lowest_value(res.pass) >= -1e-8);
}

TEST_CASE("two regime term below the critical exponent keeps only the barrier solution") {
  GridPtr grid = unit_ball_grid(160, 4.0);
  MinPowerResult res =
      min_power_scenario(4.0, 2.0, 2.0, 3.0, 13.0, grid, 20260902ull);

  CHECK_FALSE(res.high_first_exponent);
  CHECK(res.sphere_floor > 0);
  CHECK_FALSE(res.inner_min.has_value());
  CHECK(has_note(res.notes, "no negative concentration witness"));
  CHECK(has_note(res.notes, "collapsed toward the origin"));

  CHECK(res.pass.kind == "mountain-pass");
  CHECK(res.pass.j_plus_value > 0);

  // Above the unit norm both terms have unit multiplier, so the two cases
  // share the barrier solution and the levels differ by the primitive areas
  // below the kink: (1 - 2/7) - (1 - 2/4) = 3/14, halved in the functional.
  MinPowerResult high =
      min_power_scenario(7.0, 2.0, 2.0, 3.0, 13.0, grid, 20260902ull);
  CHECK(res.pass.norm_w == doctest::Approx(high.pass.norm_w).epsilon(1e-8));
  CHECK(res.pass.j_plus_value - high.pass.j_plus_value ==
        doctest::Approx(3.0 / 28.0).epsilon(1e-6));
}

TEST_CASE("two regime scenario validates its inputs") {
  GridPtr tiny = unit_ball_grid(8, 1.0);
  CHECK_THROWS_WITH(min_power_scenario(7.0, 2.0, 2.0, 3.0, 13.0, nullptr, 1ull),
                    "grid is required");
  CHECK_THROWS_WITH(min_power_scenario(2.0, 7.0, 2.0, 3.0, 13.0, tiny, 1ull),
                    "exponents must satisfy r2 < r1");
  CHECK_THROWS_WITH(min_power_scenario(7.0, 2.0, 3.0, 2.0, 13.0, tiny, 1ull),
                    "exponents must satisfy 1 < q < vpi");
}
