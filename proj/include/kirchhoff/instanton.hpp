#pragma once

#include <kirchhoff/radial.hpp>

#include <vector>

namespace kirchhoff {

// Radial bubble profile for the critical p-Laplace equation on R^N.
// value(eps, rho) solves -div(|grad u|^{p-2} grad u) = u^{p*-1} for every
// concentration scale eps > 0, with the normalization fixed by `constant`.
struct InstantonShape {
  int dimension = 3;
  double p = 2;
  double constant = 0;

  double value(double eps, double rho) const;
  double derivative(double eps, double rho) const;
};

double instanton_constant(int dimension, double p);
InstantonShape instanton_shape(int dimension, double p);

// Best constant of the Sobolev embedding into the critical Lebesgue space,
// and the invariant mass S^{N/p} shared by the gradient integral and the
// critical integral of the bubble over the whole space.
double sobolev_constant(int dimension, double p);
double critical_mass(int dimension, double p);

// Lower incomplete beta integral of t^{a-1} (1-t)^{b-1} over [0, z].
// Requires a > 0. Negative b is allowed whenever z < 1.
double lower_incomplete_beta(double a, double b, double z);

// Integral of value^s over the centered ball of the given radius, computed
// through the beta integral. Pass an infinite radius for the whole space;
// that call reports an error when the tail integral diverges.
double instanton_mass(int dimension, double p, double s, double eps,
                      double radius);

// Integral of |derivative|^p over the centered ball, same conventions.
double instanton_gradient_mass(int dimension, double p, double eps,
                               double radius);

// C^1 cutoff, equal to one inside radius 1/(2m) and zero outside 1/m,
// with a cubic ramp in between.
double cutoff_value(double m, double rho);
double cutoff_derivative(double m, double rho);

// Bubble sampled on a grid, either bare or multiplied by the cutoff at
// scale m. The grid must cover the cutoff support for the truncated form.
RadialProfile instanton_profile(GridPtr grid, int dimension, double p,
                                double eps);
RadialProfile truncated_instanton(GridPtr grid, int dimension, double p,
                                  double eps, double m);

// Predicted decay exponent in eps of the truncated L^s mass when the
// truncation scale is tied to eps by m = eps^{-beta}. The borderline
// exponent carries an extra |log(eps m)| factor.
struct EtaPrediction {
  double exponent = 0;
  bool logarithmic = false;
};
EtaPrediction predicted_eta_exponent(int dimension, double p, double s,
                                     double beta);

struct AsymptoticRow {
  double eps = 0;
  double m = 0;
  double gradient_gap = 0;
  double critical_gap = 0;
  std::vector<double> eta;
};

struct AsymptoticCheck {
  std::vector<double> s_list;
  std::vector<AsymptoticRow> rows;
  double gradient_gap_slope = 0;
  double critical_gap_slope = 0;
  std::vector<double> eta_slope;
  double predicted_gradient_slope = 0;
  double predicted_critical_slope = 0;
  std::vector<EtaPrediction> eta_predicted;
};

// Truncation ladder study: for each eps in the ladder build the truncated
// bubble with m = eps^{-beta} on its own support grid, record the gaps of
// the gradient and critical masses against S^{N/p} and the L^s masses for
// each requested s, then fit log slopes. Gap slopes are taken against
// log(eps m), eta slopes against log(eps).
AsymptoticCheck verify_asymptotics(int dimension, double p, double beta,
                                   const std::vector<double>& eps_ladder,
                                   const std::vector<double>& s_list,
                                   int cells = 512, double grading = 6.0);

}  // namespace kirchhoff
