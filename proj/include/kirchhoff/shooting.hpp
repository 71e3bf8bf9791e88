#pragma once

#include <kirchhoff/radial.hpp>

#include <functional>
#include <vector>

namespace kirchhoff {

// Radial initial value problem for -div(|u'|^{p-2}u' rho^{N-1}) = rho^{N-1} f(u)
// with u(0) = d, u'(0) = 0, integrated in the flux variable
// w = rho^{N-1} |u'|^{p-2} u'.

struct ShootingOptions {
  int dimension = 3;
  double p = 2.0;
  double max_radius = 30.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  // Step ceiling; zero picks min(0.02, max_radius / 600).  The cubic dense
  // output limits event location accuracy to O(max_step^4), so keep this
  // small when zeros feed rescaling factors.
  double max_step = 0.0;
  // Series launch point; below it the quadratic-order expansion is exact to
  // the tolerances above.
  double start_radius = 1e-6;
  // Floor event |u| = delta_stop (crossed from above); disabled when zero.
  double delta_stop = 0.0;
  bool stop_at_zero = true;
  bool stop_at_turn = false;
  // Optional primitive of the force, d/dv potential(v) = f(v).  When given,
  // the monotonicity drift of (1-1/p)|u'|^p + potential(u) is tracked.
  std::function<double(double)> potential;
};

struct ShootingResult {
  double start_value = 0.0;
  int dimension = 3;
  double p = 2.0;

  // Accepted sample points, strictly increasing in rho.
  std::vector<double> rho;
  std::vector<double> u;
  std::vector<double> du;

  // Refined event locations, in increasing order.
  std::vector<double> zeros;
  std::vector<double> turns;

  bool crossed_zero = false;
  double first_zero = 0.0;
  bool hit_floor = false;
  double floor_rho = 0.0;
  double end_rho = 0.0;

  // Largest single increase of the radial energy between samples; the exact
  // flow never increases it.  Zero when no potential was supplied.
  double energy_drift = 0.0;

  // Series tail used below the first sample: u = d - c rho^s / s.
  double series_coeff = 0.0;
  double series_power = 2.0;

  // Cubic Hermite evaluation on the stored samples.
  double value_at(double r) const;
  double derivative_at(double r) const;
};

ShootingResult shoot_radial(const std::function<double(double)>& force,
                            double center_value, const ShootingOptions& opt);

// surface * int_0^{y_end} |U'|^p y^{N-1} dy for the reference shot.  The
// rescaled Dirichlet profile with gamma = (y_end / R)^p has W-norm p-th power
// gamma^{1 - N/p} times this value.
double reference_energy(const ShootingResult& ref, const DomainSpec& domain,
                        double y_end);

// Profile u(rho) = U(gamma^{1/p} rho) on the grid; derivatives are rescaled
// accordingly.  The grid radius times gamma^{1/p} must stay inside the
// computed trajectory.  Radial coordinate semantics only; interval domains
// need their own mirroring on top of this.
RadialProfile rescaled_profile(GridPtr grid, const ShootingResult& ref,
                               double gamma);

}  // namespace kirchhoff
