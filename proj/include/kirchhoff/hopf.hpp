#pragma once

#include <string>
#include <vector>

#include "kirchhoff/radial.hpp"
#include "kirchhoff/shooting.hpp"

namespace kirchhoff {

/**
 * Flat-landing radial profile of -Lap u = -u^(q-1) + b0 u^(vpi-1) on the
 * unit ball: u falls from the center height d to u = u' = 0 at the support
 * radius and is extended by zero beyond it.  With 1 < q < vpi < 2 the
 * absorption is sub-Lipschitz at zero, which is what makes flat contact
 * possible; the vanishing normal derivative at the free boundary violates
 * the Hopf boundary point lemma there, and that is the point.
 */
struct CompactSupportProfile {
  double q = 1.2;
  double vpi = 1.4;
  double b0 = 1.0;
  int dimension = 3;
  double d = 0.0;               // center height
  double support_radius = 0.0;  // flat contact point, < 1
  double flat_residual = 0.0;   // |u| + |u'| at the contact, < 1e-6 d
  RadialProfile profile;        // nonnegative nodewise, zero beyond the support
  ShootingResult shot;          // dense trajectory, valid up to the contact
};

/**
 * Shoots from center height d and bisects d between the regime that crosses
 * zero before the boundary and the regime that is still positive at the
 * boundary; the limiting trajectory lands flat strictly inside the ball.
 * Integration stops at a small positive floor on u, since past the contact
 * the zero solution and the regrown solution are both admissible.
 * Throws when no ordered regime change shows up in [d_lo, d_hi]; the
 * message carries the scan outcomes (all-positive means b0 is too small).
 */
CompactSupportProfile shoot_compact_support(double q, double vpi, double b0,
                                            double d_lo, double d_hi,
                                            int dimension = 3);

/** Doubles b0 from b0_start until a center-height scan shows both regimes,
 *  then delegates to shoot_compact_support on the discovered bracket. */
CompactSupportProfile find_compact_support(double q = 1.2, double vpi = 1.4,
                                           int dimension = 3,
                                           double b0_start = 1.0);

/**
 * mu Phi(lambda x) sampled on the target grid, zero outside the scaled
 * support.  Exact scalings against the base profile: the sup picks up mu,
 * the gradient sup mu lambda, the squared W-norm mu^2 lambda^(2-N).
 * Amplitudes above 1 are allowed: the identities are scalings, and ladders
 * built on a small base norm start above 1 before decaying.
 * Throws when the scaled support does not fit inside the grid domain.
 */
RadialProfile scale_family(const CompactSupportProfile& phi, double lambda,
                           double mu, GridPtr grid);

/**
 * Quadrature grid with cells packed geometrically into the contact point
 * from inside.  The scaled members have slopes behaving like
 * (contact - rho)^(q/(2-q)) there, and cells that straddle the free
 * boundary lose about six digits of the weak residual to that cusp.
 * Throws unless 0 < contact < domain radius.
 */
GridPtr family_grid(const DomainSpec& domain, double contact,
                    int points_per_cell = 6);

/**
 * Exponent bookkeeping for the dilation family mu(lambda) Phi(lambda x)
 * with mu(lambda) = lambda^(-alpha) / e_scale.  These choices keep every
 * member an exact solution of the nonlocal problem
 *   -M(|u|_W^2) Lap u = -a u^(q-1) + u^(vpi-1),  M(s^2) = s^(r-2),
 * with a = mu^(vpi-q)/b0.  The admissible growth window is
 * 2(1 + vpi/N) < r <= 2N/(N-2); alpha lives in [0,1) there and vanishes
 * exactly at the critical exponent, where a is constant in lambda.
 */
struct FamilyParams {
  int dimension = 3;
  double r = 5.0;
  double vpi = 1.4;
  double q = 1.2;
  double b0 = 1.0;
  double phi_w_norm = 0.0;  // W-norm of the base profile
  double two_star = 6.0;    // critical exponent 2N/(N-2)
  double alpha = 0.0;       // amplitude decay rate, in [0,1)
  double e_scale = 1.0;     // (phi_w_norm^(r-2) b0)^(1/(r-vpi))
};

FamilyParams family_parameters(int dimension, double r, double vpi, double q,
                               double b0, double phi_w_norm);

/** Amplitude mu(lambda) = lambda^(-alpha) / e_scale. */
double family_mu(const FamilyParams& params, double lambda);

/** Absorption coefficient a(lambda) = mu(lambda)^(vpi-q) / b0. */
double family_a(const FamilyParams& params, double lambda);

/** Smallest lambda >= 1 with a(lambda) < 1 from there on; +infinity when a
 *  never drops below 1 (possible at the critical exponent) or when the
 *  crossing sits beyond double range. */
double family_unit_threshold(const FamilyParams& params);

/** One ladder member.  c1 is the max form of the C1 norm; the additive
 *  form carries the bounded sup summand into short-ladder fits, masking
 *  the gradient growth rate the family is built to expose. */
struct FamilyPoint {
  double lambda = 1.0;
  double mu = 1.0;
  double a = 1.0;
  double sup = 0.0;
  double grad_sup = 0.0;
  double c1 = 0.0;            // max(sup, grad_sup)
  double w_norm = 0.0;        // quadrature norm on the member grid
  double w_norm_gap = 0.0;    // relative gap to the closed-form scaling
  double multiplier_gap = 0.0;  // relative gap in M(|u|^2) = 1/(mu^(2-vpi) lambda^2 b0)
  double residual = 0.0;      // weak dual-norm residual of the nonlocal problem
};

/**
 * Ladder verification: sup norms stay bounded (fitted log-log slope
 * -alpha <= 0), C1 norms grow with slope 1 - alpha, every member solves
 * the nonlocal problem with absorption a(lambda), and the multiplier
 * identity holds algebraically.  holds collects all checks; failures
 * lists the ones that broke.
 */
struct FamilyReport {
  FamilyParams params;
  std::vector<FamilyPoint> points;
  double sup_slope = 0.0;
  double c1_slope = 0.0;
  double grad_slope = 0.0;
  double max_residual = 0.0;
  double max_multiplier_gap = 0.0;
  double max_w_norm_gap = 0.0;
  double lambda_threshold = 1.0;  // a < 1 from here on
  bool holds = false;
  std::vector<std::string> failures;
};

FamilyReport verify_family(const FamilyParams& params,
                           const CompactSupportProfile& phi,
                           const std::vector<double>& lambda_ladder);

/**
 * i-th Dirichlet sine branch on the interval (0, pi): with M(s^2) = s^(-2)
 * and force u, the normalized eigenfunction sqrt(2/pi) sin(i x) solves the
 * nonlocal problem on every branch.  The squared W-norm is i^2, the sup is
 * sqrt(2/pi) independent of the branch, and the gradient sup grows like i:
 * bounded amplitudes, unbounded slopes.  The grid is uniform with 8 i
 * cells, so every peak of the sine lands exactly on a node.
 */
struct SineBranchReport {
  int index = 1;
  double w_norm_sq = 0.0;  // equals index^2
  double sup = 0.0;        // sqrt(2/pi)
  double grad_sup = 0.0;   // sqrt(2/pi) index
  double c1 = 0.0;         // max(sup, grad_sup)
  double residual = 0.0;
  bool holds = false;
  std::vector<std::string> failures;
};

SineBranchReport sine_example(int index);

}  // namespace kirchhoff
