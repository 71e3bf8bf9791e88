#include <kirchhoff/instanton.hpp>

#include <kirchhoff/report.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kirchhoff {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_shape_parameters(int dimension, double p) {
  if (dimension < 2) throw std::runtime_error("bubble profiles need dimension at least two");
  if (!(p > 1.0) || !(p < static_cast<double>(dimension)))
    throw std::runtime_error("bubble profiles need an exponent p strictly between one and the dimension");
}

double sphere_area(int dimension) {
  return 2.0 * std::pow(kPi, 0.5 * dimension) / std::tgamma(0.5 * dimension);
}

double complete_beta(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Composite Gauss rule on [lo, hi] with a power grading that clusters the
// cells toward the `toward` endpoint.
template <typename F>
double graded_panel(const F& f, double lo, double hi, bool toward_hi,
                    int cells, double grading) {
  std::vector<double> gx, gw;
  gauss_legendre(7, gx, gw);
  double acc = 0;
  for (int c = 0; c < cells; ++c) {
    double fa = std::pow(static_cast<double>(c) / cells, grading);
    double fb = std::pow(static_cast<double>(c + 1) / cells, grading);
    double a = toward_hi ? hi - fb * (hi - lo) : lo + fa * (hi - lo);
    double b = toward_hi ? hi - fa * (hi - lo) : lo + fb * (hi - lo);
    double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    for (std::size_t k = 0; k < gx.size(); ++k)
      acc += hl * gw[k] * f(mid + hl * gx[k]);
  }
  return acc;
}

}  // namespace

double instanton_constant(int dimension, double p) {
  require_shape_parameters(dimension, p);
  double n = dimension;
  return std::pow(n * std::pow((n - p) / (p - 1.0), p - 1.0), 1.0 / p);
}

InstantonShape instanton_shape(int dimension, double p) {
  InstantonShape shape;
  shape.dimension = dimension;
  shape.p = p;
  shape.constant = instanton_constant(dimension, p);
  return shape;
}

double InstantonShape::value(double eps, double rho) const {
  if (!(eps > 0)) throw std::runtime_error("bubble scale must be positive");
  double n = dimension;
  double e = (n - p) / p;
  double pp = p / (p - 1.0);
  double amp = std::pow(constant * std::pow(eps, 1.0 / (p - 1.0)), e);
  return amp * std::pow(std::pow(eps, pp) + std::pow(std::abs(rho), pp), -e);
}

double InstantonShape::derivative(double eps, double rho) const {
  if (!(eps > 0)) throw std::runtime_error("bubble scale must be positive");
  double n = dimension;
  double e = (n - p) / p;
  double pp = p / (p - 1.0);
  double amp = std::pow(constant * std::pow(eps, 1.0 / (p - 1.0)), e);
  double r = std::abs(rho);
  if (r == 0) return 0;
  double base = std::pow(eps, pp) + std::pow(r, pp);
  return -amp * e * pp * std::pow(r, pp - 1.0) * std::pow(base, -e - 1.0);
}

double critical_mass(int dimension, double p) {
  require_shape_parameters(dimension, p);
  double n = dimension;
  double pp = p / (p - 1.0);
  double istar = complete_beta(n / pp, n - n / pp) / pp;
  return std::pow(instanton_constant(dimension, p), n) * sphere_area(dimension) * istar;
}

double sobolev_constant(int dimension, double p) {
  return std::pow(critical_mass(dimension, p), p / dimension);
}

double lower_incomplete_beta(double a, double b, double z) {
  if (!(a > 0)) throw std::runtime_error("incomplete beta needs a positive first parameter");
  if (!(z >= 0) || !(z <= 1)) throw std::runtime_error("incomplete beta needs z in [0, 1]");
  if (z == 0) return 0;
  if (z == 1) {
    if (!(b > 0)) throw std::runtime_error("incomplete beta diverges at z = 1 for nonpositive b");
    return complete_beta(a, b);
  }
  auto f = [a, b](double t) {
    return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0);
  };
  double mid = 0.5 * z;
  double g_left = std::max(8.0, 12.0 / std::min(a, 1.0));
  double g_right = b > 0 ? std::max(10.0, 12.0 / std::min(b, 1.0)) : 10.0;
  return graded_panel(f, 0.0, mid, false, 1024, g_left) +
         graded_panel(f, mid, z, true, 1024, g_right);
}

double instanton_mass(int dimension, double p, double s, double eps,
                      double radius) {
  require_shape_parameters(dimension, p);
  if (!(s > 0)) throw std::runtime_error("mass exponent must be positive");
  if (!(eps > 0)) throw std::runtime_error("bubble scale must be positive");
  if (!(radius > 0)) throw std::runtime_error("mass radius must be positive");
  double n = dimension;
  double e = (n - p) / p;
  double pp = p / (p - 1.0);
  double big = s * e;
  double a = n / pp;
  double b = big - a;
  bool infinite = std::isinf(radius);
  if (infinite && !(b > 0))
    throw std::runtime_error("whole-space bubble mass diverges for this exponent");
  double zv = infinite ? 1.0
                       : std::pow(radius, pp) /
                             (std::pow(eps, pp) + std::pow(radius, pp));
  double eps_exp = big / (p - 1.0) + n - pp * big;
  return std::pow(instanton_constant(dimension, p), big) * sphere_area(dimension) *
         std::pow(eps, eps_exp) * lower_incomplete_beta(a, b, zv) / pp;
}

double instanton_gradient_mass(int dimension, double p, double eps,
                               double radius) {
  require_shape_parameters(dimension, p);
  if (!(eps > 0)) throw std::runtime_error("bubble scale must be positive");
  if (!(radius > 0)) throw std::runtime_error("mass radius must be positive");
  double n = dimension;
  double pp = p / (p - 1.0);
  double a = n / pp + 1.0;
  double b = n / p - 1.0;
  bool infinite = std::isinf(radius);
  double zv = infinite ? 1.0
                       : std::pow(radius, pp) /
                             (std::pow(eps, pp) + std::pow(radius, pp));
  double k0 = std::pow((n - p) / (p - 1.0), p);
  return std::pow(instanton_constant(dimension, p), n - p) * k0 *
         sphere_area(dimension) * lower_incomplete_beta(a, b, zv) / pp;
}

double cutoff_value(double m, double rho) {
  if (!(m > 0)) throw std::runtime_error("cutoff scale must be positive");
  double lo = 0.5 / m, hi = 1.0 / m;
  double r = std::abs(rho);
  if (r <= lo) return 1;
  if (r >= hi) return 0;
  double x = (r - lo) / (hi - lo);
  return 1.0 - x * x * (3.0 - 2.0 * x);
}

double cutoff_derivative(double m, double rho) {
  if (!(m > 0)) throw std::runtime_error("cutoff scale must be positive");
  double lo = 0.5 / m, hi = 1.0 / m;
  double r = std::abs(rho);
  if (r <= lo || r >= hi) return 0;
  double x = (r - lo) / (hi - lo);
  return -6.0 * x * (1.0 - x) / (hi - lo);
}

RadialProfile instanton_profile(GridPtr grid, int dimension, double p,
                                double eps) {
  InstantonShape shape = instanton_shape(dimension, p);
  return profile_from_function(
      grid, [&](double rho) { return shape.value(eps, rho); },
      [&](double rho) { return shape.derivative(eps, rho); }, false);
}

RadialProfile truncated_instanton(GridPtr grid, int dimension, double p,
                                  double eps, double m) {
  if (!grid) throw std::runtime_error("truncated bubble needs a grid");
  if (!(m > 0)) throw std::runtime_error("cutoff scale must be positive");
  if (grid->domain.radius < (1.0 / m) * (1.0 - 1e-12))
    throw std::runtime_error("grid does not cover the cutoff support");
  InstantonShape shape = instanton_shape(dimension, p);
  return profile_from_function(
      grid,
      [&](double rho) { return cutoff_value(m, rho) * shape.value(eps, rho); },
      [&](double rho) {
        return cutoff_derivative(m, rho) * shape.value(eps, rho) +
               cutoff_value(m, rho) * shape.derivative(eps, rho);
      },
      true);
}

EtaPrediction predicted_eta_exponent(int dimension, double p, double s,
                                     double beta) {
  require_shape_parameters(dimension, p);
  if (!(s > 0)) throw std::runtime_error("mass exponent must be positive");
  if (!(beta > 0) || !(beta < 1))
    throw std::runtime_error("truncation tie exponent must lie strictly between zero and one");
  double n = dimension;
  double threshold = n * (p - 1.0) / (n - p);
  EtaPrediction out;
  if (std::abs(s - threshold) <= 1e-12 * threshold) {
    out.exponent = n / p;
    out.logarithmic = true;
  } else if (s > threshold) {
    out.exponent = n - s * (n - p) / p;
  } else {
    out.exponent = s * (n - p) / (p * (p - 1.0)) -
                   beta * (s * (n - p) / (p - 1.0) - n);
  }
  return out;
}

AsymptoticCheck verify_asymptotics(int dimension, double p, double beta,
                                   const std::vector<double>& eps_ladder,
                                   const std::vector<double>& s_list,
                                   int cells, double grading) {
  require_shape_parameters(dimension, p);
  if (eps_ladder.size() < 2)
    throw std::runtime_error("truncation study needs at least two scales");
  for (double eps : eps_ladder)
    if (!(eps > 0) || !(eps < 1))
      throw std::runtime_error("truncation study scales must lie strictly between zero and one");
  for (double s : s_list)
    if (!(s >= 1))
      throw std::runtime_error("truncation study mass exponents must be at least one");
  double pstar = critical_exponent(dimension, p);
  double level = critical_mass(dimension, p);
  AsymptoticCheck out;
  out.s_list = s_list;
  out.predicted_gradient_slope = (dimension - p) / (p - 1.0);
  out.predicted_critical_slope = dimension / (p - 1.0);
  for (double s : s_list)
    out.eta_predicted.push_back(predicted_eta_exponent(dimension, p, s, beta));
  std::vector<double> log_em, log_ggap, log_cgap, log_eps;
  std::vector<std::vector<double>> log_eta(s_list.size());
  for (double eps : eps_ladder) {
    double m = std::pow(eps, -beta);
    GridPtr grid = build_grid(DomainSpec::ball(dimension, 1.0 / m, p), cells, grading);
    RadialProfile prof = truncated_instanton(grid, dimension, p, eps, m);
    AsymptoticRow row;
    row.eps = eps;
    row.m = m;
    row.gradient_gap = std::pow(sobolev_norm(prof), p) - level;
    row.critical_gap = std::pow(lebesgue_norm(prof, pstar), pstar) - level;
    for (double s : s_list) row.eta.push_back(std::pow(lebesgue_norm(prof, s), s));
    out.rows.push_back(row);
    log_em.push_back(std::log(eps * m));
    log_eps.push_back(std::log(eps));
    if (row.gradient_gap != 0) log_ggap.push_back(std::log(std::abs(row.gradient_gap)));
    if (row.critical_gap != 0) log_cgap.push_back(std::log(std::abs(row.critical_gap)));
    for (std::size_t j = 0; j < s_list.size(); ++j)
      log_eta[j].push_back(std::log(row.eta[j]));
  }
  if (log_ggap.size() == log_em.size())
    out.gradient_gap_slope = lsq_slope(log_em, log_ggap);
  if (log_cgap.size() == log_em.size())
    out.critical_gap_slope = lsq_slope(log_em, log_cgap);
  for (std::size_t j = 0; j < s_list.size(); ++j)
    out.eta_slope.push_back(lsq_slope(log_eps, log_eta[j]));
  return out;
}

}  // namespace kirchhoff
