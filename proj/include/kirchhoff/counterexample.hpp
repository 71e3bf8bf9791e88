#pragma once

#include <kirchhoff/functionals.hpp>
#include <kirchhoff/instanton.hpp>
#include <kirchhoff/radial.hpp>

#include <cstdint>
#include <vector>

namespace kirchhoff {

// Exponent bookkeeping for the degenerate-growth witness family. The chain
// r > p* >= vpi > q >= 1 admits a scaling tilt sigma inside an open interval
// and a slack alpha; the truncation tie is beta = 1 - alpha. The derived
// exponents order the three energy contributions of the scaled bubble:
// the Kirchhoff term decays like eps^{e1}, the force gain like eps^{e2},
// and the potential cost like eps^{e3}, with e1 > e3 and e2 > e3.
struct ExponentBudget {
  int dimension = 3;
  double p = 2;
  double q = 2;
  double vpi = 3;
  double r = 7;
  double p_star = 6;
  double decay_limit = 0.5;  // (N - p) / p
  double sigma_lower = 0;
  double sigma_upper = 0;
  double sigma = 0;
  double alpha_upper = 0;
  double alpha = 0;
  double beta = 0;
  double e1 = 0;
  double e2 = 0;
  double e3 = 0;
};

// Defaults: sigma at the midpoint of its interval, alpha at half its bound.
ExponentBudget exponent_budget(int dimension, double p, double q, double vpi,
                               double r);
ExponentBudget exponent_budget(int dimension, double p, double q, double vpi,
                               double r, double sigma, double alpha);

struct ExponentTriple {
  double e1 = 0;
  double e2 = 0;
  double e3 = 0;
};
ExponentTriple exponent_triple(const ExponentBudget& budget);

struct TraceRow {
  double eps = 0;
  double norm_w = 0;
  double sup = 0;
  double j_value = 0;
  double kirchhoff_term = 0;  // primitive part of the functional
  double gain_term = 0;       // force pieces entering the functional positively
  double cost_term = 0;       // pieces entering negatively
};

struct CounterexampleTrace {
  ExponentBudget budget;
  std::vector<TraceRow> rows;     // sorted by decreasing eps
  double eps_star = 0;            // largest scale from which J stays negative
  double fitted_upper = 0;        // C with kirchhoff <= C eps^{e1}, gain <= C eps^{e2}
  double fitted_lower = 0;        // c with cost >= c eps^{e3}
  bool chain_holds = false;       // J + c eps^{e3} <= C (eps^{e1} + eps^{e2}) rowwise
  bool norms_decreasing = false;  // W norms decay along the ladder
};

// Evaluates the functional along the witness family eps^sigma * (cutoff
// bubble at scale eps), each member on its own support grid. Reports the
// largest ladder scale below which the functional is negative at every
// ladder point; if the functional never turns negative the error asks to
// extend ladder toward smaller scales. Requires the small-scale upper bound
// on the Kirchhoff primitive and the two-power lower bound on the potential
// to hold per check_hypotheses.
CounterexampleTrace trace_counterexample(const ExponentBudget& budget,
                                         const std::vector<double>& eps_ladder,
                                         const KirchhoffTerm& term,
                                         const Nonlinearity& nonlin,
                                         const DomainSpec& domain,
                                         int cells = 256, double grading = 4.0);

enum class ProbeTopology { SupNorm, C1Norm, SobolevNorm };

struct ProbeVerdict {
  bool refuted = false;
  double min_value = 0;
  std::size_t argmin = 0;
  std::vector<double> values;
  RadialProfile witness;  // minimizing candidate; meaningful when refuted
};

// Sampled minimality probe at the origin: evaluates the functional over the
// candidate family, all required to lie inside the ball of the given radius
// in the chosen topology. "Refuted" means some candidate is negative beyond
// a scale-aware tolerance; the consistent verdict never claims a proof.
ProbeVerdict probe_local_minimum(const KirchhoffTerm& term,
                                 const Nonlinearity& nonlin,
                                 ProbeTopology topology, double radius,
                                 const std::vector<RadialProfile>& family);

// Structured candidate set: scaled cutoff bubbles with the given tilt,
// oscillatory eigen-style profiles, and seeded random mode combinations,
// each rescaled to fit the probe ball.
std::vector<RadialProfile> probe_family(const DomainSpec& domain, int cells,
                                        double grading, ProbeTopology topology,
                                        double radius, std::uint64_t seed,
                                        double sigma = 0.4375,
                                        double beta = 31.0 / 32.0);

double probe_norm(const RadialProfile& profile, ProbeTopology topology);

}  // namespace kirchhoff
