#pragma once

#include <kirchhoff/functionals.hpp>
#include <kirchhoff/radial.hpp>
#include <kirchhoff/shooting.hpp>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kirchhoff {

enum class ShotClass { Crossing, FlatLanding, PositiveAtBoundary };

// One shot of the local problem at a fixed multiplier gamma:
// -(rho^{N-1}|u'|^{p-2}u')' = rho^{N-1} gamma f(u), u(0) = d, u'(0) = 0.
// Interval domains shoot from the midpoint and mirror; radial quantities
// (first_zero) are reported in the distance-from-center variable.
struct LocalShot {
  double d = 0;
  double gamma = 1;
  ShotClass classification = ShotClass::PositiveAtBoundary;
  std::optional<double> first_zero;
  double boundary_value = 0;  // u at the domain edge of the continued shot
  RadialProfile profile;
  double energy_drift = 0;
};

LocalShot shoot_local(double gamma, const Nonlinearity& nonlin, double d,
                      GridPtr grid);

// Center heights d in [d_lo, d_hi] whose shot at this gamma meets zero at
// the boundary: sign changes of u(edge) over a scan grid, refined by
// bisection. Heights where u(edge) vanishes identically along the scan
// (linear force at an eigenvalue) are all reported, deduplicated by scan
// resolution.
std::vector<double> solve_dirichlet_branch(double gamma,
                                           const Nonlinearity& nonlin,
                                           GridPtr grid, double d_lo,
                                           double d_hi, int scan_points = 64);

struct SolveReport {
  RadialProfile profile;
  double gamma = 0;
  double d = 0;  // center height
  double norm_w = 0;
  double norm_sup = 0;
  std::vector<std::pair<double, double>> lebesgue;  // (exponent, norm)
  double j_value = 0;
  double j_plus_value = 0;
  double residual = 0;     // dual norm of the nonlocal weak form
  double consistency = 0;  // |gamma M(|u|_W^p) - 1|
  std::string kind;        // consistency-root, local-min, mountain-pass, ...
  std::vector<std::string> log;
};

struct NonlocalSearch {
  double d_lo = 1e-2;
  double d_hi = 1e3;
  int scan_points = 120;           // log-spaced center heights
  double reference_radius = 240.0;  // how far the unit-multiplier shot runs
  double tol = 1e-10;              // consistency gap at accepted roots
};

struct NonlocalScan {
  std::vector<SolveReport> roots;
  std::vector<double> scan_d;
  std::vector<double> scan_gap;  // gamma M - 1, NaN where the shot misses zero
  std::vector<std::string> notes;
};

// Roots of the consistency equation gamma(d) M(|u_d|_W^p) = 1 where
// gamma(d) rescales the unit-multiplier shot so its first zero lands on
// the boundary. Requires M > 0 for positive arguments.
NonlocalScan solve_nonlocal(const KirchhoffTerm& term,
                            const Nonlinearity& nonlin, GridPtr grid,
                            const NonlocalSearch& search);

// Finite dimensional restriction of the functional to grid node values,
// with Dirichlet nodes pinned to zero (the outer boundary for balls, both
// ends for intervals). Derivatives use a three-point stencil per node;
// integrals use the grid quadrature weights.
class NodalFunctional {
 public:
  NodalFunctional(GridPtr grid, KirchhoffTerm term, Nonlinearity nonlin,
                  bool positive_part);
  ~NodalFunctional();
  NodalFunctional(const NodalFunctional&) = delete;
  NodalFunctional& operator=(const NodalFunctional&) = delete;

  std::size_t size() const;
  GridPtr grid() const;

  double value(const std::vector<double>& u) const;
  std::vector<double> gradient(const std::vector<double>& u) const;
  double norm_w_p(const std::vector<double>& u) const;

  // Discrete dual norm sqrt(g^T A^{-1} g) and the preconditioned direction
  // A^{-1} g, where A is the frozen-coefficient principal part at u plus a
  // small mass regularization.
  double dual_norm(const std::vector<double>& u,
                   const std::vector<double>& g) const;
  std::vector<double> precondition(const std::vector<double>& u,
                                   const std::vector<double>& g) const;

  // Full second order step for p = 2 including the nonlocal rank correction;
  // returns false when p != 2 or the linear solve degenerates.
  bool newton_step(const std::vector<double>& u,
                   std::vector<double>& step) const;

  RadialProfile to_profile(const std::vector<double>& u) const;
  std::vector<double> from_profile(const RadialProfile& u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct DescentConfig {
  int max_iterations = 4000;
  double tolerance = 1e-10;  // discrete dual norm target
  double ball_radius = 0;    // project |u|_W onto this ball when positive
  bool newton_polish = true;
  int max_newton = 40;
};

// Preconditioned descent with backtracking on the positive-part functional.
SolveReport minimize_j_plus(const KirchhoffTerm& term,
                            const Nonlinearity& nonlin, GridPtr grid,
                            const RadialProfile& init,
                            const DescentConfig& config);

struct PathConfig {
  int nodes = 32;
  int max_sweeps = 600;
  double tolerance = 1e-9;         // bottleneck discrete dual norm
  double level_tolerance = 1e-13;  // stall detector on the path level
  double ball_radius = 0;          // cap on wandering interior nodes
  bool newton_polish = true;
};

// Elastic-string search for the lowest barrier between the origin and the
// endpoint, with node-wise monotone descent and arclength reparametrization
// that never raises the running level.
SolveReport mountain_pass(const KirchhoffTerm& term, const Nonlinearity& nonlin,
                          GridPtr grid, const RadialProfile& endpoint,
                          const PathConfig& config);

// Shooting-refined consistency root nearest to a discrete candidate, with
// the relative gaps between the two routes.
struct CrossValidation {
  SolveReport refined;
  double d_gap = 0;
  double gamma_gap = 0;
};
std::optional<CrossValidation> cross_validate(const SolveReport& candidate,
                                              const KirchhoffTerm& term,
                                              const Nonlinearity& nonlin,
                                              GridPtr grid,
                                              double window = 0.5);

// Certificate of the segment/sphere geometry that separates three critical
// values: the auxiliary functional drops below zero at the marker bump while
// staying under s_level on the segment, the full functional stays above
// twice s_level on a sphere sample of radius `radius`, and turns negative
// at t_far times the bump.
struct ThreeSolutionsCertificate {
  double s_level = 0;
  double radius = 0;
  double t_far = 0;
  double k_at_phi = 0;
  double k_max_segment = 0;
  double sphere_min = 0;
  double j_at_phi = 0;
  double j_segment_max = 0;
  double j_at_far = 0;
  bool holds = false;
  std::vector<std::string> failures;
};

struct ThreeSolutionsResult {
  ThreeSolutionsCertificate certificate;
  SolveReport inner_min;
  SolveReport low_pass;
  SolveReport high_pass;
  double min_pairwise_distance = 0;  // W distance between the solutions
};

// Three critical points of the positive-part functional with the pure-power
// term of exponent r and force -|v|^{q-2}v + mu |v|^{sigma-2}v
// + lambda |v|^{vpi-2}v, under the certificate geometry.
ThreeSolutionsResult three_solutions_scenario(double q, double r, double sigma,
                                              double vpi, double mu,
                                              double lambda, GridPtr grid,
                                              unsigned long long seed);

struct MinPowerResult {
  bool high_first_exponent = false;  // r1 above the critical exponent
  double sphere_floor = 0;  // min of J+ over the unit-norm sphere sample
  SolveReport pass;
  std::optional<SolveReport> inner_min;
  std::vector<std::string> notes;
};

// Existence scenario for the two-regime Kirchhoff term min(s^{r1-p}, s^{r2-p})
// with the model force: always a barrier solution; when r1 exceeds the
// critical exponent, additionally a negative-level minimizer inside the
// unit-norm ball found from a concentrated seed.
MinPowerResult min_power_scenario(double r1, double r2, double q, double vpi,
                                  double lambda, GridPtr grid,
                                  unsigned long long seed);

}  // namespace kirchhoff
