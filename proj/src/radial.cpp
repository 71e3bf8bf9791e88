#include "kirchhoff/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kirchhoff {

DomainSpec DomainSpec::ball(int dimension, double radius, double p) {
  if (dimension < 1) throw std::runtime_error("domain dimension must be >= 1");
  if (radius <= 0.0) throw std::runtime_error("domain radius must be positive");
  if (p <= 1.0) throw std::runtime_error("gradient exponent p must exceed 1");
  DomainSpec d;
  d.kind = DomainKind::Ball;
  d.dimension = dimension;
  d.radius = radius;
  d.p = p;
  d.surface_factor =
      2.0 * std::pow(M_PI, 0.5 * dimension) / std::tgamma(0.5 * dimension);
  return d;
}

DomainSpec DomainSpec::interval(double length, double p) {
  if (length <= 0.0) throw std::runtime_error("interval length must be positive");
  if (p <= 1.0) throw std::runtime_error("gradient exponent p must exceed 1");
  DomainSpec d;
  d.kind = DomainKind::Interval;
  d.dimension = 1;
  d.radius = length;
  d.p = p;
  d.surface_factor = 1.0;
  return d;
}

double critical_exponent(const DomainSpec& domain) {
  return critical_exponent(domain.dimension, domain.p);
}

double critical_exponent(int dimension, double p) {
  if (dimension <= p)
    throw std::runtime_error(
        "critical exponent undefined: dimension must exceed p");
  return p * dimension / (dimension - p);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::runtime_error("quadrature order must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  // Newton iteration on P_n from the Chebyshev initial guess; symmetric pair
  // filled together.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

double RadialGrid::quadrature(const std::vector<double>& values) const {
  if (values.size() != nodes.size())
    throw std::runtime_error("quadrature: value count does not match grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * values[i];
  return acc;
}

double RadialGrid::integrate(const std::function<double(double)>& g) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (weights[i] != 0.0) acc += weights[i] * g(nodes[i]);
  }
  return acc;
}

GridPtr build_grid(const DomainSpec& domain, int cells, double grading,
                   int points_per_cell) {
  if (cells < 8) throw std::runtime_error("grid needs at least 8 cells");
  if (grading < 1.0) throw std::runtime_error("grid grading must be >= 1");
  if (points_per_cell < 2)
    throw std::runtime_error("grid needs at least 2 points per cell");

  auto grid = std::make_shared<RadialGrid>();
  grid->domain = domain;
  grid->grading = grading;

  const double R = domain.radius;
  grid->boundaries.resize(cells + 1);
  for (int k = 0; k <= cells; ++k)
    grid->boundaries[k] =
        R * std::pow(static_cast<double>(k) / cells, grading);
  grid->boundaries[0] = 0.0;
  grid->boundaries[cells] = R;

  std::vector<double> gx, gw;
  gauss_legendre(points_per_cell, gx, gw);

  const int nm1 = domain.dimension - 1;
  grid->nodes.reserve(cells * (points_per_cell + 1) + 1);
  grid->weights.reserve(grid->nodes.capacity());
  for (int k = 0; k < cells; ++k) {
    const double a = grid->boundaries[k];
    const double b = grid->boundaries[k + 1];
    grid->nodes.push_back(a);
    grid->weights.push_back(0.0);
    const double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    for (int j = 0; j < points_per_cell; ++j) {
      const double rho = mid + hl * gx[j];
      grid->nodes.push_back(rho);
      grid->weights.push_back(hl * gw[j] * std::pow(rho, nm1));
    }
  }
  grid->nodes.push_back(R);
  grid->weights.push_back(0.0);
  return grid;
}

std::vector<double> fd_derivative(const RadialGrid& grid,
                                  const std::vector<double>& values) {
  const auto& x = grid.nodes;
  const std::size_t n = x.size();
  if (values.size() != n)
    throw std::runtime_error("fd_derivative: value count does not match grid");
  if (n < 3) throw std::runtime_error("fd_derivative: grid too small");
  std::vector<double> d(n);
  // Interior: derivative of the parabola through three consecutive nodes,
  // exact for quadratics on nonuniform spacing.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = x[i] - x[i - 1];
    const double hp = x[i + 1] - x[i];
    d[i] = (values[i + 1] * hm * hm - values[i - 1] * hp * hp +
            values[i] * (hp * hp - hm * hm)) /
           (hm * hp * (hm + hp));
  }
  {
    const double h1 = x[1] - x[0];
    const double h2 = x[2] - x[0];
    d[0] = (values[1] * h2 * h2 - values[2] * h1 * h1 -
            values[0] * (h2 * h2 - h1 * h1)) /
           (h1 * h2 * (h2 - h1));
  }
  {
    const double h1 = x[n - 1] - x[n - 2];
    const double h2 = x[n - 1] - x[n - 3];
    d[n - 1] = (values[n - 3] * h1 * h1 - values[n - 2] * h2 * h2 +
                values[n - 1] * (h2 * h2 - h1 * h1)) /
               (h1 * h2 * (h2 - h1));
  }
  return d;
}

RadialProfile profile_from_function(GridPtr grid,
                                    const std::function<double(double)>& f,
                                    bool dirichlet) {
  RadialProfile u;
  u.grid = std::move(grid);
  u.values.resize(u.grid->size());
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] = f(u.grid->nodes[i]);
  u.derivs = fd_derivative(*u.grid, u.values);
  u.has_derivs = true;
  u.dirichlet = dirichlet;
  return u;
}

RadialProfile profile_from_function(GridPtr grid,
                                    const std::function<double(double)>& f,
                                    const std::function<double(double)>& df,
                                    bool dirichlet) {
  RadialProfile u;
  u.grid = std::move(grid);
  u.values.resize(u.grid->size());
  u.derivs.resize(u.grid->size());
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    u.values[i] = f(u.grid->nodes[i]);
    u.derivs[i] = df(u.grid->nodes[i]);
  }
  u.has_derivs = true;
  u.dirichlet = dirichlet;
  return u;
}

RadialProfile profile_from_values(GridPtr grid, std::vector<double> values,
                                  bool dirichlet) {
  RadialProfile u;
  u.grid = std::move(grid);
  if (values.size() != u.grid->size())
    throw std::runtime_error("profile_from_values: size mismatch");
  u.values = std::move(values);
  u.derivs = fd_derivative(*u.grid, u.values);
  u.has_derivs = true;
  u.dirichlet = dirichlet;
  return u;
}

double sobolev_norm(const RadialProfile& u) {
  if (!u.has_derivs)
    throw std::runtime_error("sobolev_norm needs derivative data");
  if (!u.dirichlet)
    throw std::runtime_error(
        "sobolev_norm defined only for profiles vanishing on the boundary");
  const double p = u.grid->domain.p;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.grid->size(); ++i) {
    const double w = u.grid->weights[i];
    if (w != 0.0) acc += w * std::pow(std::abs(u.derivs[i]), p);
  }
  return std::pow(u.grid->domain.surface_factor * acc, 1.0 / p);
}

double lebesgue_norm(const RadialProfile& u, double s) {
  if (s < 1.0) throw std::runtime_error("lebesgue_norm needs s >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.grid->size(); ++i) {
    const double w = u.grid->weights[i];
    if (w != 0.0) acc += w * std::pow(std::abs(u.values[i]), s);
  }
  return std::pow(u.grid->domain.surface_factor * acc, 1.0 / s);
}

double sup_norm(const RadialProfile& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

double c1_norm(const RadialProfile& u) {
  if (!u.has_derivs) throw std::runtime_error("c1_norm needs derivative data");
  double md = 0.0;
  for (double v : u.derivs) md = std::max(md, std::abs(v));
  return sup_norm(u) + md;
}

}  // namespace kirchhoff
