#include "kirchhoff/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kirchhoff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_pow(double base, double e) { return std::pow(base, e); }

}  // namespace

double KirchhoffTerm::M(double t) const {
  if (t < 0) throw std::runtime_error("kirchhoff coefficient needs t >= 0");
  switch (variant) {
    case Variant::PurePower: {
      double s = checked_pow(t, 1.0 / p);
      return checked_pow(s, r - p);
    }
    case Variant::MinPower: {
      double s = checked_pow(t, 1.0 / p);
      return std::min(checked_pow(s, r1 - p), checked_pow(s, r2 - p));
    }
    case Variant::Affine:
      return a + b * t;
    case Variant::Tabulated: {
      if (t > table_t.back() * (1 + 1e-12))
        throw std::runtime_error(
            "tabulated kirchhoff coefficient queried beyond table range");
      auto it = std::upper_bound(table_t.begin(), table_t.end(), t);
      std::size_t hi = std::min<std::size_t>(
          static_cast<std::size_t>(it - table_t.begin()), table_t.size() - 1);
      if (hi == 0) hi = 1;
      std::size_t lo = hi - 1;
      double w = (t - table_t[lo]) / (table_t[hi] - table_t[lo]);
      w = std::clamp(w, 0.0, 1.0);
      return table_m[lo] * (1 - w) + table_m[hi] * w;
    }
  }
  throw std::runtime_error("unknown kirchhoff variant");
}

double KirchhoffTerm::m_hat(double t) const {
  if (t < 0) throw std::runtime_error("kirchhoff primitive needs t >= 0");
  switch (variant) {
    case Variant::PurePower: {
      if (r <= 0)
        throw std::runtime_error(
            "kirchhoff primitive divergent at zero for nonpositive rate");
      return (p / r) * checked_pow(t, r / p);
    }
    case Variant::MinPower: {
      double rh = std::max(r1, r2), rl = std::min(r1, r2);
      if (t <= 1.0) return (p / rh) * checked_pow(t, rh / p);
      return p / rh + (p / rl) * (checked_pow(t, rl / p) - 1.0);
    }
    case Variant::Affine:
      return a * t + 0.5 * b * t * t;
    case Variant::Tabulated: {
      if (t > table_t.back() * (1 + 1e-12))
        throw std::runtime_error(
            "tabulated kirchhoff coefficient queried beyond table range");
      double acc = 0;
      for (std::size_t i = 1; i < table_t.size(); ++i) {
        double t0 = table_t[i - 1], t1 = table_t[i];
        if (t <= t0) break;
        double m0 = table_m[i - 1], m1 = table_m[i];
        if (t >= t1) {
          acc += 0.5 * (m0 + m1) * (t1 - t0);
        } else {
          double w = (t - t0) / (t1 - t0);
          double mt = m0 * (1 - w) + m1 * w;
          acc += 0.5 * (m0 + mt) * (t - t0);
        }
      }
      return acc;
    }
  }
  throw std::runtime_error("unknown kirchhoff variant");
}

double KirchhoffTerm::growth_rate_infinity() const {
  switch (variant) {
    case Variant::PurePower: return r;
    case Variant::MinPower: return std::min(r1, r2);
    case Variant::Affine: return b > 0 ? 2 * p : p;
    case Variant::Tabulated: return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

KirchhoffTerm KirchhoffTerm::pure_power(double p, double r) {
  if (!(p > 1)) throw std::runtime_error("kirchhoff term needs p > 1");
  KirchhoffTerm k;
  k.variant = Variant::PurePower;
  k.p = p;
  k.r = r;
  return k;
}

KirchhoffTerm KirchhoffTerm::min_power(double p, double r1, double r2) {
  if (!(p > 1)) throw std::runtime_error("kirchhoff term needs p > 1");
  if (!(r1 > 0) || !(r2 > 0))
    throw std::runtime_error("min_power rates must be positive");
  KirchhoffTerm k;
  k.variant = Variant::MinPower;
  k.p = p;
  k.r1 = r1;
  k.r2 = r2;
  return k;
}

KirchhoffTerm KirchhoffTerm::affine(double p, double a, double b) {
  if (!(p > 1)) throw std::runtime_error("kirchhoff term needs p > 1");
  if (a < 0 || b < 0 || (a == 0 && b == 0))
    throw std::runtime_error(
        "affine kirchhoff term needs nonnegative a, b, not both zero");
  KirchhoffTerm k;
  k.variant = Variant::Affine;
  k.p = p;
  k.a = a;
  k.b = b;
  return k;
}

KirchhoffTerm KirchhoffTerm::tabulated(double p, std::vector<double> t,
                                       std::vector<double> m) {
  if (!(p > 1)) throw std::runtime_error("kirchhoff term needs p > 1");
  if (t.size() != m.size() || t.size() < 2)
    throw std::runtime_error("tabulated kirchhoff term needs paired samples");
  if (t.front() != 0)
    throw std::runtime_error("tabulated kirchhoff term must start at t = 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw std::runtime_error(
          "tabulated kirchhoff term needs strictly increasing t samples");
  KirchhoffTerm k;
  k.variant = Variant::Tabulated;
  k.p = p;
  k.table_t = std::move(t);
  k.table_m = std::move(m);
  return k;
}

double Nonlinearity::f(double v) const {
  double w = positive_part ? std::max(v, 0.0) : v;
  double sgn = w > 0 ? 1.0 : (w < 0 ? -1.0 : 0.0);
  double av = std::fabs(w);
  double acc = 0;
  for (const auto& pc : pieces)
    acc += pc.coefficient * sgn * checked_pow(av, pc.exponent - 1);
  return acc;
}

double Nonlinearity::F(double v) const {
  double w = positive_part ? std::max(v, 0.0) : v;
  double av = std::fabs(w);
  double acc = 0;
  for (const auto& pc : pieces)
    acc += (pc.coefficient / pc.exponent) * checked_pow(av, pc.exponent);
  return acc;
}

Nonlinearity Nonlinearity::from_pieces(std::vector<PowerPiece> pieces,
                                       bool positive_part) {
  std::vector<PowerPiece> kept;
  for (const auto& pc : pieces) {
    if (pc.coefficient == 0) continue;
    if (!(pc.exponent > 1))
      throw std::runtime_error("force term exponents must exceed 1");
    kept.push_back(pc);
  }
  if (kept.empty())
    throw std::runtime_error("force term needs at least one nonzero piece");
  std::sort(kept.begin(), kept.end(),
            [](const PowerPiece& x, const PowerPiece& y) {
              return x.exponent < y.exponent;
            });
  std::vector<PowerPiece> merged;
  for (const auto& pc : kept) {
    if (!merged.empty() && merged.back().exponent == pc.exponent)
      merged.back().coefficient += pc.coefficient;
    else
      merged.push_back(pc);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const PowerPiece& x) {
                                return x.coefficient == 0;
                              }),
               merged.end());
  if (merged.empty())
    throw std::runtime_error("force term pieces cancel identically");
  Nonlinearity n;
  n.pieces = std::move(merged);
  n.positive_part = positive_part;
  return n;
}

Nonlinearity Nonlinearity::model(double q, double vpi, double lambda,
                                 bool positive_part) {
  if (!(q > 1) || !(vpi > q))
    throw std::runtime_error("model force term needs 1 < q < vpi");
  if (!(lambda > 0))
    throw std::runtime_error("model force term needs lambda > 0");
  return from_pieces({{-1.0, q}, {lambda, vpi}}, positive_part);
}

Nonlinearity Nonlinearity::model_three(double q, double sigma, double vpi,
                                       double mu, double lambda,
                                       bool positive_part) {
  if (!(q > 1) || !(sigma > q) || !(vpi > sigma))
    throw std::runtime_error(
        "three-piece model force term needs 1 < q < sigma < vpi");
  if (!(lambda > 0))
    throw std::runtime_error("model force term needs lambda > 0");
  std::vector<PowerPiece> pieces{{-1.0, q}, {lambda, vpi}};
  if (mu != 0) pieces.push_back({mu, sigma});
  return from_pieces(std::move(pieces), positive_part);
}

namespace {

double potential_integral(const RadialProfile& u, const Nonlinearity& nl,
                          bool clip_positive) {
  const RadialGrid& g = *u.grid;
  double acc = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double w = g.weights[i];
    if (w == 0) continue;
    double v = u.values[i];
    if (clip_positive) v = std::max(v, 0.0);
    acc += w * nl.F(v);
  }
  return g.domain.surface_factor * acc;
}

}  // namespace

double evaluate_J(const RadialProfile& u, const KirchhoffTerm& term,
                  const Nonlinearity& nonlin) {
  double norm = sobolev_norm(u);
  double kirch = term.m_hat(checked_pow(norm, term.p)) / term.p;
  return kirch - potential_integral(u, nonlin, false);
}

double evaluate_J_plus(const RadialProfile& u, const KirchhoffTerm& term,
                       const Nonlinearity& nonlin) {
  double norm = sobolev_norm(u);
  double kirch = term.m_hat(checked_pow(norm, term.p)) / term.p;
  return kirch - potential_integral(u, nonlin, true);
}

RadialProfile positive_part_profile(const RadialProfile& u) {
  RadialProfile out = u;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (out.values[i] <= 0) {
      out.values[i] = 0;
      if (out.has_derivs) out.derivs[i] = 0;
    }
  }
  return out;
}

double RayDecomposition::value(double t, const KirchhoffTerm& term) const {
  if (t < 0) throw std::runtime_error("ray parameter must be >= 0");
  double kirch = term.m_hat(checked_pow(t * norm_w, term.p)) / term.p;
  double pot = 0;
  for (std::size_t i = 0; i < piece_exponents.size(); ++i)
    pot += piece_coefficients[i] * checked_pow(t, piece_exponents[i]) *
           piece_integrals[i];
  return kirch - pot;
}

double RayDecomposition::magnitude_scale(double t,
                                         const KirchhoffTerm& term) const {
  if (t < 0) throw std::runtime_error("ray parameter must be >= 0");
  double scale =
      std::fabs(term.m_hat(checked_pow(t * norm_w, term.p)) / term.p);
  for (std::size_t i = 0; i < piece_exponents.size(); ++i)
    scale += std::fabs(piece_coefficients[i] *
                       checked_pow(t, piece_exponents[i]) * piece_integrals[i]);
  return scale;
}

RayDecomposition ray_decomposition(const RadialProfile& u,
                                   const Nonlinearity& nonlin) {
  RayDecomposition d;
  d.norm_w = sobolev_norm(u);
  const RadialGrid& g = *u.grid;
  for (const auto& pc : nonlin.pieces) {
    double acc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double w = g.weights[i];
      if (w == 0) continue;
      double v = u.values[i];
      double av = nonlin.positive_part ? std::max(v, 0.0) : std::fabs(v);
      acc += w * checked_pow(av, pc.exponent);
    }
    d.piece_exponents.push_back(pc.exponent);
    d.piece_coefficients.push_back(pc.coefficient / pc.exponent);
    d.piece_integrals.push_back(g.domain.surface_factor * acc);
  }
  return d;
}

double directional_derivative(const RadialProfile& u, const RadialProfile& v,
                              const KirchhoffTerm& term,
                              const Nonlinearity& nonlin) {
  if (u.grid != v.grid)
    throw std::runtime_error("paired profiles must share one grid");
  if (!u.has_derivs || !v.has_derivs)
    throw std::runtime_error("directional derivative needs derivative data");
  const RadialGrid& g = *u.grid;
  double p = g.domain.p;
  double grad_acc = 0, force_acc = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double w = g.weights[i];
    if (w == 0) continue;
    double du = u.derivs[i];
    double mag = std::fabs(du);
    double flux = mag > 0 ? checked_pow(mag, p - 2) * du : 0.0;
    grad_acc += w * flux * v.derivs[i];
    force_acc += w * nonlin.f(u.values[i]) * v.values[i];
  }
  double norm = sobolev_norm(u);
  double mu = term.M(checked_pow(norm, p));
  double grad_part = grad_acc == 0 ? 0.0 : mu * g.domain.surface_factor * grad_acc;
  return grad_part - g.domain.surface_factor * force_acc;
}

WeakResidual weak_residual(const RadialProfile& u, const KirchhoffTerm& term,
                           const Nonlinearity& nonlin, int test_modes) {
  if (!u.has_derivs)
    throw std::runtime_error("weak residual needs derivative data");
  const RadialGrid& g = *u.grid;
  double p = g.domain.p;
  double R = g.domain.radius;
  double N = g.domain.dimension;
  double norm = sobolev_norm(u);
  double mu = term.M(checked_pow(norm, p));

  WeakResidual out;
  out.degenerate = !(mu > 0) || !std::isfinite(mu);

  const double pi = 3.14159265358979323846;
  for (int k = 1; k <= test_modes; ++k) {
    double freq = k * pi / R;
    double grad_acc = 0, force_acc = 0, vnorm_acc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double w = g.weights[i];
      if (w == 0) continue;
      double rho = g.nodes[i];
      double vv = std::sin(freq * rho);
      double dv = freq * std::cos(freq * rho);
      double du = u.derivs[i];
      double mag = std::fabs(du);
      double flux = mag > 0 ? checked_pow(mag, p - 2) * du : 0.0;
      grad_acc += w * flux * dv;
      force_acc += w * nonlin.f(u.values[i]) * vv;
      vnorm_acc += w * checked_pow(std::fabs(dv), p);
    }
    double sf = g.domain.surface_factor;
    double grad_part = grad_acc == 0 ? 0.0 : mu * sf * grad_acc;
    double pairing = grad_part - sf * force_acc;
    double vnorm = checked_pow(sf * vnorm_acc, 1.0 / p);
    if (vnorm > 0)
      out.dual_norm = std::max(out.dual_norm, std::fabs(pairing) / vnorm);
  }

  std::vector<double> phi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double du = u.derivs[i];
    double mag = std::fabs(du);
    phi[i] = mag > 0 ? checked_pow(mag, p - 2) * du : 0.0;
  }
  std::vector<double> dphi = fd_derivative(g, phi);
  out.strong_residual.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double rho = g.nodes[i];
    double div = rho > 0 ? (N - 1) / rho * phi[i] + dphi[i] : N * dphi[i];
    out.strong_residual[i] = -mu * div - nonlin.f(u.values[i]);
  }
  return out;
}

PowerSumSup power_sum_sup(const std::vector<PowerPiece>& terms) {
  std::vector<PowerPiece> t;
  for (const auto& pc : terms) {
    if (pc.coefficient == 0) continue;
    bool merged = false;
    for (auto& existing : t) {
      if (existing.exponent == pc.exponent) {
        existing.coefficient += pc.coefficient;
        merged = true;
        break;
      }
    }
    if (!merged) t.push_back(pc);
  }
  t.erase(std::remove_if(t.begin(), t.end(),
                         [](const PowerPiece& x) { return x.coefficient == 0; }),
          t.end());
  PowerSumSup out;
  if (t.empty()) {
    out.finite = true;
    out.sup = 0;
    out.argmax = 1;
    return out;
  }
  std::sort(t.begin(), t.end(), [](const PowerPiece& x, const PowerPiece& y) {
    return x.exponent < y.exponent;
  });
  // Ends: dominant exponent with positive coefficient means divergence.
  if (t.front().exponent < 0 && t.front().coefficient > 0) {
    out.finite = false;
    out.sup = kInf;
    out.argmax = 0;
    return out;
  }
  if (t.back().exponent > 0 && t.back().coefficient > 0) {
    out.finite = false;
    out.sup = kInf;
    out.argmax = kInf;
    return out;
  }
  auto eval = [&](double x) {
    double acc = 0;
    for (const auto& pc : t) acc += pc.coefficient * checked_pow(x, pc.exponent);
    return acc;
  };
  double constant_part = 0;
  bool has_pos_exp = false, has_neg_exp = false;
  for (const auto& pc : t) {
    if (pc.exponent == 0) constant_part += pc.coefficient;
    if (pc.exponent > 0) has_pos_exp = true;
    if (pc.exponent < 0) has_neg_exp = true;
  }
  double best = -kInf;
  double best_x = 1;
  const int per_decade = 64;
  for (int k = -9 * per_decade; k <= 9 * per_decade; ++k) {
    double x = checked_pow(10.0, static_cast<double>(k) / per_decade);
    double v = eval(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  // Golden-section polish on the log axis around the best grid point.
  double llo = std::log(best_x) - std::log(10.0) / per_decade;
  double lhi = std::log(best_x) + std::log(10.0) / per_decade;
  const double gr = 0.61803398874989484820;
  double l1 = lhi - gr * (lhi - llo), l2 = llo + gr * (lhi - llo);
  double f1 = eval(std::exp(l1)), f2 = eval(std::exp(l2));
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      llo = l1;
      l1 = l2;
      f1 = f2;
      l2 = llo + gr * (lhi - llo);
      f2 = eval(std::exp(l2));
    } else {
      lhi = l2;
      l2 = l1;
      f2 = f1;
      l1 = lhi - gr * (lhi - llo);
      f1 = eval(std::exp(l1));
    }
  }
  double lmid = 0.5 * (llo + lhi);
  double fmid = eval(std::exp(lmid));
  if (fmid > best) {
    best = fmid;
    best_x = std::exp(lmid);
  }
  // Limit values at the ends, attained when no exponent diverges there.
  if (!has_pos_exp && constant_part > best) {
    best = constant_part;
    best_x = kInf;
  }
  if (!has_neg_exp && constant_part > best) {
    best = constant_part;
    best_x = 0;
  }
  out.finite = true;
  out.sup = best;
  out.argmax = best_x;
  return out;
}

const HypothesisReport* HypothesisSummary::find(const std::string& name) const {
  for (const auto& r : reports)
    if (r.name == name) return &r;
  return nullptr;
}

namespace {

using HS = HypothesisStatus;

double rate_at_zero(const KirchhoffTerm& term) {
  switch (term.variant) {
    case KirchhoffTerm::Variant::PurePower: return term.r;
    case KirchhoffTerm::Variant::MinPower: return std::max(term.r1, term.r2);
    case KirchhoffTerm::Variant::Affine: return term.a > 0 ? term.p : 2 * term.p;
    case KirchhoffTerm::Variant::Tabulated:
      return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool m_nonneg_symbolic(const KirchhoffTerm& term) {
  switch (term.variant) {
    case KirchhoffTerm::Variant::PurePower:
    case KirchhoffTerm::Variant::MinPower:
    case KirchhoffTerm::Variant::Affine:
      return true;  // constructor constraints keep these nonnegative
    case KirchhoffTerm::Variant::Tabulated:
      return false;
  }
  return false;
}

bool table_nonneg(const KirchhoffTerm& term) {
  for (double m : term.table_m)
    if (m < 0) return false;
  return true;
}

}  // namespace

HypothesisSummary check_hypotheses(const KirchhoffTerm& term,
                                   const Nonlinearity& nonlin,
                                   double dimension) {
  if (!(dimension >= 1)) throw std::runtime_error("dimension must be >= 1");
  double p = term.p;
  double p_star = dimension > p ? p * dimension / (dimension - p) : kInf;

  const auto& pieces = nonlin.pieces;
  double e_bot = pieces.front().exponent, c_bot = pieces.front().coefficient;
  double e_top = pieces.back().exponent, c_top = pieces.back().coefficient;
  double pos_top = -kInf;  // largest exponent with positive coefficient
  double pos_bot = kInf;   // smallest exponent with positive coefficient
  for (const auto& pc : pieces) {
    if (pc.coefficient > 0) {
      pos_top = std::max(pos_top, pc.exponent);
      pos_bot = std::min(pos_bot, pc.exponent);
    }
  }

  bool tabulated = term.variant == KirchhoffTerm::Variant::Tabulated;
  double zero_rate = rate_at_zero(term);
  double inf_rate = term.growth_rate_infinity();

  HypothesisSummary summary;
  auto add = [&](HypothesisReport r) { summary.reports.push_back(std::move(r)); };

  {  // growth of the potential below the critical power
    HypothesisReport r;
    r.name = "subcritical-potential-growth";
    double c0 = 1;
    for (const auto& pc : pieces) c0 += std::fabs(pc.coefficient / pc.exponent);
    if (pos_top == -kInf || pos_top <= p_star) {
      r.status = HS::HoldsSymbolically;
      r.constants["C0"] = c0;
    } else {
      r.status = HS::Violated;
      r.note = "a positive piece grows beyond the critical power";
      r.constants["offending_exponent"] = pos_top;
    }
    add(std::move(r));
  }

  {  // growth of the force strictly below the critical power
    HypothesisReport r;
    r.name = "subcritical-force-growth";
    double c0 = 0;
    for (const auto& pc : pieces) c0 += std::fabs(pc.coefficient);
    r.constants["growth_exponent"] = e_top;
    r.constants["C0"] = std::max(c0, 1.0);
    if (e_top < p_star) {
      r.status = HS::HoldsSymbolically;
    } else {
      r.status = HS::Violated;
      r.note = "force growth reaches the critical power";
    }
    add(std::move(r));
  }

  {  // upper power bound on the primitive for small norms
    HypothesisReport r;
    r.name = "kirchhoff-small-upper";
    if (tabulated) {
      double s_ref = checked_pow(term.table_t.back(), 1.0 / p) * 1e-3;
      double t_ref = checked_pow(s_ref, p);
      double mh = term.m_hat(t_ref);
      if (mh > 0) {
        double mh2 = term.m_hat(checked_pow(2 * s_ref, p));
        double rate = std::log(mh2 / mh) / std::log(2.0);
        r.status = HS::HoldsOnSamples;
        r.constants["r"] = rate;
        r.constants["C1"] = mh / p / checked_pow(s_ref, rate) * 2;
      } else {
        r.status = HS::NotApplicable;
        r.note = "table primitive vanishes on the sampled range";
      }
    } else if (term.variant == KirchhoffTerm::Variant::PurePower &&
               term.r <= 0) {
      r.status = HS::NotApplicable;
      r.note = "primitive divergent at zero";
    } else {
      r.status = HS::HoldsSymbolically;
      r.constants["r"] = zero_rate;
      if (term.variant == KirchhoffTerm::Variant::Affine)
        r.constants["C1"] = term.a > 0 ? term.a / p : term.b / (2 * p);
      else
        r.constants["C1"] = 1.0 / zero_rate;
    }
    add(std::move(r));
  }

  {  // nonnegative primitive near zero / globally
    HypothesisReport r0, rg;
    r0.name = "kirchhoff-primitive-nonneg-small";
    rg.name = "kirchhoff-primitive-nonneg-global";
    bool pure_bad = term.variant == KirchhoffTerm::Variant::PurePower &&
                    term.r <= 0;
    if (pure_bad) {
      r0.status = rg.status = HS::NotApplicable;
      r0.note = rg.note = "primitive divergent at zero";
    } else if (m_nonneg_symbolic(term)) {
      r0.status = rg.status = HS::HoldsSymbolically;
    } else if (table_nonneg(term)) {
      r0.status = rg.status = HS::HoldsOnSamples;
    } else {
      // negative table values: primitive may dip; sample it
      bool ok_small = true, ok_all = true;
      double tmax = term.table_t.back();
      for (int k = 0; k <= 200; ++k) {
        double t = tmax * k / 200.0;
        double v = term.m_hat(t);
        if (v < 0) {
          ok_all = false;
          if (t <= 0.05 * tmax) ok_small = false;
        }
      }
      r0.status = ok_small ? HS::HoldsOnSamples : HS::Violated;
      rg.status = ok_all ? HS::HoldsOnSamples : HS::Violated;
    }
    add(std::move(r0));
    add(std::move(rg));
  }

  {  // lower two-power gap for the potential on v >= 0
    HypothesisReport r;
    r.name = "potential-lower-power-gap";
    if (c_top <= 0) {
      r.status = HS::Violated;
      r.note = "potential has no dominant positive growth";
    } else {
      bool model_like = pieces.size() <= 3 && c_bot < 0;
      bool middles_ok = true;
      double middle_neg = 0;
      for (std::size_t i = 1; i + 1 < pieces.size(); ++i) {
        if (pieces[i].coefficient < 0) {
          middles_ok = false;
          middle_neg += -pieces[i].coefficient / pieces[i].exponent;
        }
      }
      double c2 = c_top / e_top, c3 = c_bot < 0 ? -c_bot / e_bot : 1.0;
      if (model_like && middles_ok) {
        r.status = HS::HoldsSymbolically;
        r.constants["C2"] = c2;
        r.constants["C3"] = c3;
        r.constants["vpi"] = e_top;
        r.constants["q"] = e_bot;
      } else {
        // absorb negative middles: |v|^s <= |v|^q + |v|^vpi for s between
        double c2_eff = c2 - middle_neg;
        double c3_eff = c3 + middle_neg;
        if (c2_eff > 0) {
          r.status = HS::HoldsSymbolically;
          r.constants["C2"] = c2_eff;
          r.constants["C3"] = c3_eff;
          r.constants["vpi"] = e_top;
          r.constants["q"] = e_bot;
        } else {
          r.status = HS::Violated;
          r.note = "negative middle pieces swallow the dominant growth";
        }
      }
    }
    add(std::move(r));
  }

  {  // potential nonpositive for small arguments
    HypothesisReport r;
    r.name = "potential-nonpositive-small";
    if (c_bot < 0) {
      r.status = HS::HoldsSymbolically;
      double delta = kInf;
      if (pieces.size() > 1) {
        // sampled threshold: largest v with F <= 0 on (0, v]
        double lo = 1e-12, hi = 1e12, good = 0;
        for (int k = 0; k <= 2400; ++k) {
          double v = lo * checked_pow(hi / lo, k / 2400.0);
          double fv = 0;
          for (const auto& pc : pieces)
            fv += pc.coefficient / pc.exponent * checked_pow(v, pc.exponent);
          if (fv > 0) break;
          good = v;
        }
        delta = good;
      }
      r.constants["delta"] = delta;
    } else {
      r.status = HS::Violated;
      r.note = "potential positive arbitrarily close to zero";
      r.constants["witness"] = 1e-6;
    }
    add(std::move(r));
  }

  {  // one-sided force bound D |v|^{l-1} with l in [p, p*)
    HypothesisReport r;
    r.name = "force-one-sided-growth";
    std::vector<double> candidates;
    if (pos_top > -kInf) candidates.push_back(std::max(p, pos_top));
    candidates.push_back(p);
    bool done = false;
    for (double ell : candidates) {
      if (!(ell < p_star)) continue;
      std::vector<PowerPiece> shifted;
      for (const auto& pc : pieces)
        shifted.push_back({pc.coefficient, pc.exponent - ell});
      PowerSumSup s = power_sum_sup(shifted);
      if (s.finite && s.sup >= 0) {
        r.status = HS::HoldsSymbolically;
        r.constants["ell"] = ell;
        r.constants["D"] = s.sup;
        done = true;
        break;
      }
      if (s.finite && s.sup < 0) {
        r.status = HS::HoldsSymbolically;
        r.constants["ell"] = ell;
        r.constants["D"] = 0;
        done = true;
        break;
      }
    }
    if (!done) {
      r.status = HS::Violated;
      r.note = "no admissible one-sided growth exponent below critical";
    }
    add(std::move(r));
  }

  {  // positive lower power bound on M near zero, rate below critical
    HypothesisReport r;
    r.name = "kirchhoff-positive-lower-small";
    if (tabulated) {
      if (table_nonneg(term) && term.table_m.front() > 0) {
        r.status = HS::HoldsOnSamples;
        r.constants["a1"] = term.table_m.front() / 2;
        r.note = "table positive at zero: any subcritical rate fits";
      } else {
        r.status = HS::NotApplicable;
        r.note = "table not strictly positive near zero";
      }
    } else if (!m_nonneg_symbolic(term)) {
      r.status = HS::NotApplicable;
    } else if (zero_rate < p_star) {
      double coef0 = 1.0;  // leading coefficient of M(s^p) as s -> 0
      if (term.variant == KirchhoffTerm::Variant::Affine)
        coef0 = term.a > 0 ? term.a : term.b;
      double rr = zero_rate > p ? zero_rate
                                : std::min(0.5 * (p + p_star), p + 1.0);
      double a1, delta;
      if (zero_rate >= rr) {
        a1 = coef0 * p / rr;
        delta = 1.0;
      } else {
        // M(s^p) >= coef0 s^{zero_rate-p} for s <= 1; halving the constant
        // buys the slack s^{zero_rate-rr} >= 1/2 on that range
        a1 = coef0 * p / (2 * rr);
        delta = 1.0;
      }
      r.status = HS::HoldsSymbolically;
      r.constants["r"] = rr;
      r.constants["a1"] = a1;
      r.constants["delta"] = delta;
    } else {
      r.status = HS::Violated;
      r.note = "coefficient vanishes at a supercritical rate near zero";
      r.constants["rate"] = zero_rate;
    }
    add(std::move(r));
  }

  {  // M positive and continuous away from zero
    HypothesisReport r;
    r.name = "kirchhoff-positive-continuous";
    if (tabulated) {
      bool pos = true;
      for (std::size_t i = 1; i < term.table_m.size(); ++i)
        if (!(term.table_m[i] > 0)) pos = false;
      r.status = pos ? HS::HoldsOnSamples : HS::Violated;
    } else {
      r.status = HS::HoldsSymbolically;
    }
    add(std::move(r));
  }

  // Superlinearity route: force-side cap and coefficient-side rate.
  double cap = c_top > 0 ? e_top : kInf;
  bool primitive_ok = !(term.variant == KirchhoffTerm::Variant::PurePower &&
                        term.r <= 0);

  HypothesisReport ar, cerami, coercive;
  ar.name = "ar-superlinearity";
  cerami.name = "ar-superlinearity-cerami";
  coercive.name = "coercive-kirchhoff";
  ar.status = cerami.status = coercive.status = HS::NotApplicable;

  if (primitive_ok && !tabulated) {
    if (inf_rate < cap) {
      double r_tilde =
          std::isfinite(cap) ? 0.5 * (inf_rate + cap) : inf_rate + 1.0;
      // force side: sup of sum c_i (r_tilde/e_i - 1) |v|^{e_i}
      std::vector<PowerPiece> force_terms;
      for (const auto& pc : pieces)
        force_terms.push_back(
            {pc.coefficient * (r_tilde / pc.exponent - 1.0), pc.exponent});
      PowerSumSup fs = power_sum_sup(force_terms);
      if (fs.finite) {
        double c_force = std::max(0.0, fs.sup);
        bool linear_ok = inf_rate >= 1;  // expression grows at least linearly
        if (linear_ok) {
          ar.status = HS::HoldsSymbolically;
          ar.constants["r_tilde"] = r_tilde;
          ar.constants["C"] = c_force;
          double beta;
          switch (term.variant) {
            case KirchhoffTerm::Variant::PurePower:
              beta = r_tilde / term.r - 1.0;
              break;
            case KirchhoffTerm::Variant::MinPower:
              beta = r_tilde / inf_rate - 1.0;
              break;
            default:
              beta = r_tilde / (2 * p);
          }
          ar.constants["beta"] = beta;
        } else {
          cerami.status = HS::HoldsSymbolically;
          cerami.constants["r_tilde"] = r_tilde;
          cerami.constants["C"] = c_force;
          cerami.constants["h"] = inf_rate;
          cerami.constants["beta"] = r_tilde / inf_rate - 1.0;
        }
      }
    }
    // coercive route: primitive dominates a power above the force growth
    if (inf_rate > e_top) {
      double r_tilde = 0.5 * (e_top + inf_rate);
      coercive.status = HS::HoldsSymbolically;
      coercive.constants["r_tilde"] = r_tilde;
      // C = sup of s^{r_tilde} - m_hat(s^p); finite since r_tilde < rate
      std::vector<PowerPiece> gap;
      gap.push_back({1.0, r_tilde});
      if (term.variant == KirchhoffTerm::Variant::PurePower) {
        gap.push_back({-p / term.r, term.r});
        PowerSumSup gs = power_sum_sup(gap);
        coercive.constants["C"] = std::max(0.0, gs.sup);
      } else {
        double best = 0;
        for (int k = -200; k <= 400; ++k) {
          double s = checked_pow(10.0, k / 40.0);
          double v = checked_pow(s, r_tilde) - term.m_hat(checked_pow(s, p));
          best = std::max(best, v);
        }
        coercive.constants["C"] = best;
        coercive.status = HS::HoldsOnSamples;
      }
    }
  } else if (primitive_ok && tabulated) {
    // sampled check on the table range only
    double cap_rt = std::isfinite(cap) ? 0.9 * cap + 0.1 * p : p + 1.0;
    double tmax = term.table_t.back();
    double c0 = 0, beta_hat = kInf;
    bool any = false;
    for (int k = 1; k <= 160; ++k) {
      double t = tmax * k / 160.0;
      double s = checked_pow(t, 1.0 / p);
      double gsv = (cap_rt / p) * term.m_hat(t) - term.M(t) * t;
      c0 = std::max(c0, -gsv);
      if (k > 80 && s > 0) {
        beta_hat = std::min(beta_hat, (gsv + c0 + 1e-300) / s);
        any = true;
      }
    }
    if (any && beta_hat > 0) {
      ar.status = HS::HoldsOnSamples;
      ar.constants["r_tilde"] = cap_rt;
      ar.constants["beta"] = beta_hat;
      ar.constants["C"] = c0;
      ar.note = "verified on the tabulated range only";
    }
  }
  add(std::move(ar));
  add(std::move(cerami));
  add(std::move(coercive));

  {  // force pushes toward zero near zero
    HypothesisReport r;
    r.name = "force-absorbing-near-zero";
    if (c_bot < 0) {
      r.status = HS::HoldsSymbolically;
    } else {
      r.status = HS::Violated;
      r.note = "force repels from zero at small amplitudes";
    }
    add(std::move(r));
  }

  {  // potential superlinear against the superlinearity rate
    HypothesisReport r;
    r.name = "potential-superlinear-at-infinity";
    const HypothesisReport* ar_rep = summary.find("ar-superlinearity");
    double r_tilde = std::numeric_limits<double>::quiet_NaN();
    if (ar_rep && ar_rep->status != HS::NotApplicable &&
        ar_rep->constants.count("r_tilde"))
      r_tilde = ar_rep->constants.at("r_tilde");
    if (!std::isfinite(r_tilde)) {
      r.status = HS::NotApplicable;
      r.note = "no superlinearity rate established";
    } else if (c_top > 0 && e_top > r_tilde) {
      r.status = HS::HoldsSymbolically;
      r.constants["r_tilde"] = r_tilde;
    } else {
      r.status = HS::Violated;
      r.constants["r_tilde"] = r_tilde;
    }
    add(std::move(r));
  }

  const HypothesisReport* ar_rep = summary.find("ar-superlinearity");
  const HypothesisReport* ce_rep = summary.find("ar-superlinearity-cerami");
  const HypothesisReport* co_rep = summary.find("coercive-kirchhoff");
  auto holds = [](const HypothesisReport* r) {
    return r && (r->status == HS::HoldsSymbolically ||
                 r->status == HS::HoldsOnSamples);
  };
  if (holds(ar_rep))
    summary.compactness_route = "palais-smale-ar";
  else if (holds(co_rep))
    summary.compactness_route = "palais-smale-coercive";
  else if (holds(ce_rep))
    summary.compactness_route = "cerami";
  else
    summary.compactness_route = "none";

  return summary;
}

RegularityExponents c1_condition_exponents(double dimension, double p, double r,
                                           double ell, double ell_tilde) {
  if (!(dimension > p))
    throw std::runtime_error("critical exponent undefined: dimension must exceed p");
  if (!(ell > 1) || !(ell_tilde > 1))
    throw std::runtime_error("growth exponents must exceed 1");
  double p_star = p * dimension / (dimension - p);
  if (!(ell < p_star))
    throw std::runtime_error("global growth exponent must stay below critical");
  RegularityExponents out;
  out.degenerate = std::fabs(p_star - r) < 1e-9;
  out.order_lhs = ell - 1;
  out.order_rhs = (r - p) * (p_star - 1) / (p_star - p);
  out.order_condition = out.order_lhs > out.order_rhs;
  if (out.degenerate) {
    out.small_rhs = kInf;
    out.small_condition = false;
    out.small_exponent = 0;
    out.scale_exponent = 0;
    return out;
  }
  out.small_rhs = (r - p) * (p_star - ell) / (p_star - r);
  out.small_condition = ell_tilde - 1 > out.small_rhs;
  double factor = (p_star - r) / (p_star - ell);
  out.small_exponent = factor * (ell_tilde - 1) - r + p;
  out.scale_exponent = factor * (ell - 1) - r + p;
  return out;
}

}  // namespace kirchhoff
