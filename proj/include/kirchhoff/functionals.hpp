#pragma once

#include <map>
#include <string>
#include <vector>

#include "kirchhoff/radial.hpp"

namespace kirchhoff {

/** Nonlocal coefficient M together with its antiderivative.
 *  Arguments are always the p-th power of the gradient norm. */
struct KirchhoffTerm {
  enum class Variant { PurePower, MinPower, Affine, Tabulated };

  Variant variant = Variant::PurePower;
  double p = 2;
  double r = 2;            // PurePower: M(s^p) = s^(r-p)
  double r1 = 0, r2 = 0;   // MinPower: M(s^p) = min(s^(r1-p), s^(r2-p))
  double a = 0, b = 0;     // Affine: M(t) = a + b t
  std::vector<double> table_t, table_m;  // Tabulated: linear interpolation

  double M(double t) const;
  /** Integral of M from 0 to t. Throws when the integral diverges at 0
   *  (pure power with r <= 0) or when a table does not cover [0, t]. */
  double m_hat(double t) const;

  /** Growth exponent of M(s^p) in s as s -> infinity (nan for tabulated). */
  double growth_rate_infinity() const;

  static KirchhoffTerm pure_power(double p, double r);
  static KirchhoffTerm min_power(double p, double r1, double r2);
  static KirchhoffTerm affine(double p, double a, double b);
  static KirchhoffTerm tabulated(double p, std::vector<double> t,
                                 std::vector<double> m);
};

/** One signed power c * sgn(v) |v|^(e-1) in the force term. */
struct PowerPiece {
  double coefficient = 0;
  double exponent = 0;  // e > 1 in a Nonlinearity
};

/** Force f(v) = sum_i c_i sgn(v) |v|^(e_i - 1) and its potential
 *  F(v) = sum_i (c_i/e_i) |v|^(e_i). With positive_part set, both are
 *  evaluated at max(v, 0). */
struct Nonlinearity {
  std::vector<PowerPiece> pieces;  // kept sorted by exponent, coefficients != 0
  bool positive_part = false;

  double f(double v) const;
  double F(double v) const;

  static Nonlinearity from_pieces(std::vector<PowerPiece> pieces,
                                  bool positive_part);
  /** -|v|^(q-2) v + lambda |v|^(vpi-2) v, with 1 < q < vpi. */
  static Nonlinearity model(double q, double vpi, double lambda,
                            bool positive_part);
  /** Adds a middle piece mu |v|^(sigma-2) v, q < sigma < vpi. */
  static Nonlinearity model_three(double q, double sigma, double vpi, double mu,
                                  double lambda, bool positive_part);
};

/** (1/p) Mhat(|u|_W^p) - integral of F(u) over the domain. */
double evaluate_J(const RadialProfile& u, const KirchhoffTerm& term,
                  const Nonlinearity& nonlin);

/** Same Kirchhoff part, but the potential is always taken at max(u, 0). */
double evaluate_J_plus(const RadialProfile& u, const KirchhoffTerm& term,
                       const Nonlinearity& nonlin);

/** Nodal clipping at zero; derivative data is zeroed where u <= 0. */
RadialProfile positive_part_profile(const RadialProfile& u);

/** Data reconstructing the functional along the ray t -> t u for t >= 0. */
struct RayDecomposition {
  double norm_w = 0;
  std::vector<double> piece_exponents;
  std::vector<double> piece_coefficients;  // c_i / e_i
  std::vector<double> piece_integrals;     // integral of |u|^{e_i}

  double value(double t, const KirchhoffTerm& term) const;
  /** Sum of absolute term magnitudes at t: a scale for zero tests. */
  double magnitude_scale(double t, const KirchhoffTerm& term) const;
};
RayDecomposition ray_decomposition(const RadialProfile& u,
                                   const Nonlinearity& nonlin);

/** Gateaux derivative of the discrete functional at u in direction v,
 *  using the derivative data carried by both profiles. */
double directional_derivative(const RadialProfile& u, const RadialProfile& v,
                              const KirchhoffTerm& term,
                              const Nonlinearity& nonlin);

struct WeakResidual {
  std::vector<double> strong_residual;  // nodal, advisory only
  double dual_norm = 0;   // max over smooth test modes of |<J'(u),v>|/|v|_W
  bool degenerate = false;  // Kirchhoff factor zero or infinite at |u|_W
};
WeakResidual weak_residual(const RadialProfile& u, const KirchhoffTerm& term,
                           const Nonlinearity& nonlin, int test_modes = 12);

/** Supremum over v > 0 of sum_i c_i v^{b_i} (exponents may be any reals).
 *  Finite iff the dominant term at each end has nonpositive coefficient. */
struct PowerSumSup {
  bool finite = false;
  double sup = 0;
  double argmax = 0;
};
PowerSumSup power_sum_sup(const std::vector<PowerPiece>& terms);

enum class HypothesisStatus {
  HoldsSymbolically,
  HoldsOnSamples,
  Violated,
  NotApplicable
};

struct HypothesisReport {
  std::string name;
  HypothesisStatus status = HypothesisStatus::NotApplicable;
  std::map<std::string, double> constants;
  std::string note;
};

struct HypothesisSummary {
  std::vector<HypothesisReport> reports;
  /** "palais-smale-ar", "palais-smale-coercive", "cerami" or "none". */
  std::string compactness_route = "none";

  const HypothesisReport* find(const std::string& name) const;
};

/** Checks the structural growth and compactness conditions for the pair
 *  (M, f) on a domain of the given dimension, producing witness constants
 *  where the conditions hold. */
HypothesisSummary check_hypotheses(const KirchhoffTerm& term,
                                   const Nonlinearity& nonlin,
                                   double dimension);

/** Exponent bookkeeping for transferring a local minimum between the
 *  uniform and gradient topologies. ell bounds the force one-sidedly from
 *  above globally, ell_tilde bounds it two-sidedly near zero. */
struct RegularityExponents {
  double order_lhs = 0;         // ell - 1
  double order_rhs = 0;         // (r-p)(p*-1)/(p*-p)
  bool order_condition = false; // order_lhs > order_rhs
  double small_rhs = 0;         // (r-p)(p*-ell)/(p*-r)
  bool small_condition = false; // ell_tilde - 1 > small_rhs
  double small_exponent = 0;    // ((p*-r)/(p*-ell))(ell_tilde-1) - r + p
  double scale_exponent = 0;    // ((p*-r)/(p*-ell))(ell-1) - r + p
  bool degenerate = false;      // r at the critical exponent: bound is void
};
RegularityExponents c1_condition_exponents(double dimension, double p, double r,
                                           double ell, double ell_tilde);

}  // namespace kirchhoff
