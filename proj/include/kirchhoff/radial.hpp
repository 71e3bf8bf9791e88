#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace kirchhoff {

enum class DomainKind { Ball, Interval };

/**
 * Radially symmetric domain: a ball B(0,R) in R^N or an interval (0,R).
 *
 * All integrals below are one-dimensional in the radius rho with weight
 * rho^(N-1); the measure of the full domain is recovered through
 * surface_factor (area of the unit sphere S^{N-1} for balls, 1 for
 * intervals, where the weight is trivial).
 */
struct DomainSpec {
  DomainKind kind = DomainKind::Ball;
  int dimension = 3;        // N >= 1 (1 for intervals)
  double radius = 1.0;      // R > 0 (interval length for intervals)
  double p = 2.0;           // gradient exponent, p > 1
  double surface_factor = 1.0;

  static DomainSpec ball(int dimension, double radius, double p);
  static DomainSpec interval(double length, double p);
};

/** pN/(N-p). Throws std::runtime_error when N <= p (exponent undefined). */
double critical_exponent(const DomainSpec& domain);
double critical_exponent(int dimension, double p);

/**
 * Quadrature grid on [0, R].
 *
 * Cell boundaries follow the grading law R*(k/cells)^grading; every cell
 * carries a fixed Gauss-Legendre rule.  `nodes` lists boundaries and
 * quadrature points in increasing order; `weights` carries the rho^(N-1)
 * weight and is zero exactly at cell boundaries.  quadrature(g) for g == 1
 * equals R^N / N up to roundoff.
 */
struct RadialGrid {
  DomainSpec domain;
  double grading = 1.0;
  std::vector<double> boundaries;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double quadrature(const std::vector<double>& values) const;
  double integrate(const std::function<double(double)>& g) const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/** cells >= 8, grading >= 1, points_per_cell >= 2. */
GridPtr build_grid(const DomainSpec& domain, int cells, double grading,
                   int points_per_cell = 5);

/**
 * Scalar radial profile sampled at the grid nodes.  Derivative data is
 * either analytic (supplied by the builder) or finite differences on the
 * node set; norms that need u' refuse to run without it.
 */
struct RadialProfile {
  GridPtr grid;
  std::vector<double> values;
  std::vector<double> derivs;
  bool has_derivs = false;
  bool dirichlet = false;  // u(R) pinned to zero
};

/** Builds a profile from a callable; derivatives by finite differences. */
RadialProfile profile_from_function(GridPtr grid,
                                    const std::function<double(double)>& f,
                                    bool dirichlet);

/** Builds a profile with analytic derivative data. */
RadialProfile profile_from_function(GridPtr grid,
                                    const std::function<double(double)>& f,
                                    const std::function<double(double)>& df,
                                    bool dirichlet);

RadialProfile profile_from_values(GridPtr grid, std::vector<double> values,
                                  bool dirichlet);

/** Three-point finite differences on the (nonuniform) node set. */
std::vector<double> fd_derivative(const RadialGrid& grid,
                                  const std::vector<double>& values);

/** (surface_factor * integral |u'|^p rho^(N-1))^(1/p); needs derivative
 *  data and the Dirichlet flag. */
double sobolev_norm(const RadialProfile& u);

/** (surface_factor * integral |u|^s rho^(N-1))^(1/s), s >= 1. */
double lebesgue_norm(const RadialProfile& u, double s);

/** Max of |u| over the nodes. */
double sup_norm(const RadialProfile& u);

/** sup|u| + sup|u'|; needs derivative data. */
double c1_norm(const RadialProfile& u);

/** Gauss-Legendre nodes/weights on [-1, 1]. */
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace kirchhoff
