#include <kirchhoff/counterexample.hpp>

#include <kirchhoff/report.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace kirchhoff {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_chain(int dimension, double p, double q, double vpi, double r) {
  if (!(p > 1) || !(p < dimension))
    throw std::runtime_error("witness budget requires 1 < p < dimension");
  double pstar = critical_exponent(dimension, p);
  if (!(r > pstar))
    throw std::runtime_error("witness budget requires r strictly above the critical exponent");
  if (!(pstar >= vpi))
    throw std::runtime_error("witness budget requires the potential exponent at most critical");
  if (!(vpi > q))
    throw std::runtime_error("witness budget requires the potential exponent strictly above the force exponent");
  if (!(q >= 1))
    throw std::runtime_error("witness budget requires the force exponent at least one");
}

RadialProfile scaled_copy(const RadialProfile& profile, double factor) {
  RadialProfile out = profile;
  for (double& v : out.values) v *= factor;
  for (double& d : out.derivs) d *= factor;
  return out;
}

// sin(a rho) / (a rho), continuous at zero.
double sinc_value(double a, double rho) {
  double x = a * rho;
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double sinc_derivative(double a, double rho) {
  double x = a * rho;
  if (std::abs(x) < 1e-4) return a * (-x / 3.0 + x * x * x / 30.0);
  return a * (x * std::cos(x) - std::sin(x)) / (x * x);
}

}  // namespace

ExponentBudget exponent_budget(int dimension, double p, double q, double vpi,
                               double r) {
  require_chain(dimension, p, q, vpi, r);
  double limit = (dimension - p) / p;
  double lower = limit * (critical_exponent(dimension, p) - vpi) / (r - vpi);
  double sigma = 0.5 * (lower + limit);
  double alpha = 0.5 * (vpi - q) * (limit - sigma);
  return exponent_budget(dimension, p, q, vpi, r, sigma, alpha);
}

ExponentBudget exponent_budget(int dimension, double p, double q, double vpi,
                               double r, double sigma, double alpha) {
  require_chain(dimension, p, q, vpi, r);
  ExponentBudget b;
  b.dimension = dimension;
  b.p = p;
  b.q = q;
  b.vpi = vpi;
  b.r = r;
  b.p_star = critical_exponent(dimension, p);
  b.decay_limit = (dimension - p) / p;
  b.sigma_lower = b.decay_limit * (b.p_star - vpi) / (r - vpi);
  b.sigma_upper = b.decay_limit;
  if (!(sigma > b.sigma_lower) || !(sigma < b.sigma_upper))
    throw std::runtime_error("witness tilt sigma must lie strictly inside its admissible interval");
  b.sigma = sigma;
  b.alpha_upper = (vpi - q) * (b.decay_limit - sigma);
  if (!(alpha > 0) || !(alpha < b.alpha_upper))
    throw std::runtime_error("witness slack alpha must lie strictly between zero and its bound");
  if (!(alpha < 1))
    throw std::runtime_error("witness slack alpha must stay below one for the truncation tie");
  b.alpha = alpha;
  b.beta = 1.0 - alpha;
  b.e1 = r * sigma;
  b.e2 = dimension + q * (sigma - b.decay_limit) - alpha;
  b.e3 = dimension + vpi * (sigma - b.decay_limit);
  return b;
}

ExponentTriple exponent_triple(const ExponentBudget& budget) {
  return ExponentTriple{budget.e1, budget.e2, budget.e3};
}

CounterexampleTrace trace_counterexample(const ExponentBudget& budget,
                                         const std::vector<double>& eps_ladder,
                                         const KirchhoffTerm& term,
                                         const Nonlinearity& nonlin,
                                         const DomainSpec& domain,
                                         int cells, double grading) {
  if (eps_ladder.empty()) throw std::runtime_error("scale ladder is empty");
  std::vector<double> ladder = eps_ladder;
  std::sort(ladder.begin(), ladder.end(), std::greater<double>());
  for (double eps : ladder)
    if (!(eps > 0) || !(eps < 1))
      throw std::runtime_error("scale ladder entries must lie strictly between zero and one");
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i)
    if (ladder[i] == ladder[i + 1])
      throw std::runtime_error("scale ladder entries must be distinct");

  HypothesisSummary summary = check_hypotheses(term, nonlin, domain.dimension);
  for (const char* name : {"kirchhoff-small-upper", "potential-lower-power-gap"}) {
    const HypothesisReport* rep = summary.find(name);
    if (!rep || (rep->status != HypothesisStatus::HoldsSymbolically &&
                 rep->status != HypothesisStatus::HoldsOnSamples))
      throw std::runtime_error(
          "witness trace needs the small-scale Kirchhoff upper bound and the "
          "two-power potential lower bound to hold");
  }

  CounterexampleTrace out;
  out.budget = budget;
  for (double eps : ladder) {
    double support = std::pow(eps, budget.beta);
    if (support > domain.radius * (1.0 + 1e-12))
      throw std::runtime_error("witness support exceeds the domain radius");
    DomainSpec sub = domain;
    sub.radius = support;
    GridPtr grid = build_grid(sub, cells, grading);
    RadialProfile psi = truncated_instanton(grid, domain.dimension, domain.p,
                                            eps, 1.0 / support);
    RadialProfile u = scaled_copy(psi, std::pow(eps, budget.sigma));
    TraceRow row;
    row.eps = eps;
    row.norm_w = sobolev_norm(u);
    row.sup = sup_norm(u);
    row.j_value = evaluate_J(u, term, nonlin);
    row.kirchhoff_term = term.m_hat(std::pow(row.norm_w, domain.p)) / domain.p;
    RayDecomposition ray = ray_decomposition(u, nonlin);
    for (std::size_t i = 0; i < ray.piece_exponents.size(); ++i) {
      double contribution = ray.piece_coefficients[i] * ray.piece_integrals[i];
      if (contribution < 0)
        row.gain_term -= contribution;
      else
        row.cost_term += contribution;
    }
    out.rows.push_back(row);
  }

  std::size_t tail = out.rows.size();
  while (tail > 0 && out.rows[tail - 1].j_value < 0) --tail;
  if (tail == out.rows.size())
    throw std::runtime_error(
        "the functional never turns negative in the given scale range; "
        "extend ladder toward smaller scales");
  out.eps_star = out.rows[tail].eps;

  double upper = 0;
  double lower = std::numeric_limits<double>::infinity();
  for (const TraceRow& row : out.rows) {
    upper = std::max(upper, row.kirchhoff_term / std::pow(row.eps, budget.e1));
    upper = std::max(upper, row.gain_term / std::pow(row.eps, budget.e2));
    lower = std::min(lower, row.cost_term / std::pow(row.eps, budget.e3));
  }
  out.fitted_upper = upper;
  out.fitted_lower = lower;
  out.chain_holds = true;
  for (const TraceRow& row : out.rows) {
    double lhs = row.j_value + lower * std::pow(row.eps, budget.e3);
    double rhs = upper * (std::pow(row.eps, budget.e1) + std::pow(row.eps, budget.e2));
    if (lhs > rhs * (1.0 + 1e-9)) out.chain_holds = false;
  }
  out.norms_decreasing = true;
  for (std::size_t i = 0; i + 1 < out.rows.size(); ++i)
    if (out.rows[i + 1].norm_w >= out.rows[i].norm_w * (1.0 + 1e-9))
      out.norms_decreasing = false;
  return out;
}

double probe_norm(const RadialProfile& profile, ProbeTopology topology) {
  switch (topology) {
    case ProbeTopology::SupNorm: return sup_norm(profile);
    case ProbeTopology::C1Norm: return c1_norm(profile);
    case ProbeTopology::SobolevNorm: return sobolev_norm(profile);
  }
  throw std::runtime_error("unknown probe topology");
}

ProbeVerdict probe_local_minimum(const KirchhoffTerm& term,
                                 const Nonlinearity& nonlin,
                                 ProbeTopology topology, double radius,
                                 const std::vector<RadialProfile>& family) {
  if (family.empty()) throw std::runtime_error("empty candidate family");
  if (!(radius > 0)) throw std::runtime_error("probe radius must be positive");
  ProbeVerdict verdict;
  double best_ratio = 0;
  bool first = true;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const RadialProfile& u = family[i];
    double norm = probe_norm(u, topology);
    if (norm > radius * (1.0 + 1e-9))
      throw std::runtime_error("candidate lies outside the probe ball");
    double j = evaluate_J(u, term, nonlin);
    double scale = std::abs(term.m_hat(std::pow(sobolev_norm(u),
                                                u.grid->domain.p)) /
                            u.grid->domain.p);
    RayDecomposition ray = ray_decomposition(u, nonlin);
    for (std::size_t k = 0; k < ray.piece_exponents.size(); ++k)
      scale += std::abs(ray.piece_coefficients[k] * ray.piece_integrals[k]);
    verdict.values.push_back(j);
    double ratio = scale > 0 ? j / scale : 0.0;
    if (ratio < -1e-12) verdict.refuted = true;
    if (first || j < verdict.min_value) verdict.min_value = j;
    if (first || ratio < best_ratio) {
      best_ratio = ratio;
      verdict.argmin = i;
      verdict.witness = u;
    }
    first = false;
  }
  return verdict;
}

std::vector<RadialProfile> probe_family(const DomainSpec& domain, int cells,
                                        double grading, ProbeTopology topology,
                                        double radius, std::uint64_t seed,
                                        double sigma, double beta) {
  if (!(radius > 0)) throw std::runtime_error("probe radius must be positive");
  std::vector<RadialProfile> family;
  GridPtr grid = build_grid(domain, cells, grading);
  auto fit = [&](const RadialProfile& u, double target) {
    double norm = probe_norm(u, topology);
    if (!(norm > 0)) return;
    family.push_back(scaled_copy(u, target / norm));
  };

  for (double eps : geometric_ladder(std::pow(10.0, -0.5), std::pow(10.0, -2.4), 8)) {
    if (domain.dimension < 2) break;
    double support = std::pow(eps, beta);
    if (support > domain.radius) continue;
    DomainSpec sub = domain;
    sub.radius = support;
    GridPtr sgrid = build_grid(sub, cells, grading);
    RadialProfile psi = truncated_instanton(sgrid, domain.dimension, domain.p,
                                            eps, 1.0 / support);
    RadialProfile u = scaled_copy(psi, std::pow(eps, sigma));
    double norm = probe_norm(u, topology);
    if (!(norm > 0)) continue;
    family.push_back(norm > radius ? scaled_copy(u, radius / norm) : u);
    fit(u, radius / 3.0);
  }

  for (int k = 1; k <= 6; ++k) {
    double a = k * kPi / domain.radius;
    RadialProfile u = profile_from_function(
        grid,
        [&](double rho) {
          return domain.kind == DomainKind::Ball ? sinc_value(a, rho)
                                                 : std::sin(a * rho);
        },
        [&](double rho) {
          return domain.kind == DomainKind::Ball ? sinc_derivative(a, rho)
                                                 : a * std::cos(a * rho);
        },
        true);
    fit(u, radius);
    fit(u, radius / 3.0);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_real_distribution<double> level(0.05, 1.0);
  for (int trial = 0; trial < 24; ++trial) {
    std::vector<double> a(4);
    for (double& c : a) c = coeff(rng);
    double target = level(rng) * radius;
    RadialProfile u = profile_from_function(
        grid,
        [&](double rho) {
          double v = 0;
          for (int j = 0; j < 4; ++j)
            v += a[static_cast<std::size_t>(j)] *
                 std::sin((j + 1) * kPi * rho / domain.radius);
          return v;
        },
        [&](double rho) {
          double d = 0;
          for (int j = 0; j < 4; ++j)
            d += a[static_cast<std::size_t>(j)] * (j + 1) * kPi / domain.radius *
                 std::cos((j + 1) * kPi * rho / domain.radius);
          return d;
        },
        true);
    fit(u, target);
  }
  return family;
}

}  // namespace kirchhoff
