#include "kirchhoff/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "kirchhoff/functionals.hpp"

namespace kirchhoff {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

void check_exponents(double q, double vpi) {
  if (!(1.0 < q && q < vpi && vpi < 2.0))
    throw std::runtime_error("exponents must satisfy 1 < q < vpi < 2");
}

// The flat separatrix keeps |u'| = sqrt(2/q) u^(q/2) near contact, so a stop
// at u = (3e-7 d)^(2/q) caps the landing slope near 4e-7 d.  The plain
// proportional floor is kept whenever it is already the deeper one.
double floor_level(double q, double d) {
  return std::min(1e-10 * d, std::pow(3e-7 * d, 2.0 / q));
}

struct RegimeShot {
  bool crossing = false;  // heading through zero before the boundary
  bool hit_floor = false;
  double contact = 0.0;
  double contact_u = 0.0;
  double contact_du = 0.0;
  double end_u = 0.0;
  double end_rho = 0.0;
  ShootingResult res;
};

RegimeShot classify_shot(double q, double vpi, double b0, double d,
                         int dimension) {
  auto nl = Nonlinearity::from_pieces({{-1.0, q}, {b0, vpi}}, false);
  ShootingOptions opt;
  opt.dimension = dimension;
  opt.p = 2.0;
  opt.max_radius = 1.0;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-16 * std::max(1.0, d);
  opt.start_radius = 1e-7;
  opt.delta_stop = floor_level(q, d);
  opt.stop_at_zero = true;
  opt.potential = [nl](double v) { return nl.F(v); };
  RegimeShot shot;
  shot.res = shoot_radial([nl](double v) { return nl.f(v); }, d, opt);
  shot.end_rho = shot.res.end_rho;
  shot.end_u = shot.res.u.back();
  if (shot.res.hit_floor) {
    shot.hit_floor = true;
    shot.contact = shot.res.floor_rho;
    shot.contact_u = shot.res.value_at(shot.contact);
    shot.contact_du = shot.res.derivative_at(shot.contact);
    shot.crossing = shot.contact_du < 0.0;
  } else {
    shot.crossing = shot.res.crossed_zero;
  }
  return shot;
}

struct ScanRow {
  double d = 0.0;
  bool crossing = false;
  double terminal_u = 0.0;
  double terminal_rho = 0.0;
};

std::vector<ScanRow> scan_heights(double q, double vpi, double b0, double d_lo,
                                  double d_hi, int dimension, int points) {
  std::vector<ScanRow> rows;
  rows.reserve(points);
  for (int i = 0; i < points; ++i) {
    double t = double(i) / (points - 1);
    double d = d_lo * std::pow(d_hi / d_lo, t);
    RegimeShot s = classify_shot(q, vpi, b0, d, dimension);
    rows.push_back({d, s.crossing, s.hit_floor ? s.contact_u : s.end_u,
                    s.hit_floor ? s.contact : s.end_rho});
  }
  return rows;
}

std::string scan_trace(const std::vector<ScanRow>& rows) {
  std::ostringstream out;
  out << "\nscan:";
  for (const ScanRow& r : rows)
    out << "\n  d=" << fmt(r.d)
        << " outcome=" << (r.crossing ? "crossing" : "positive")
        << " u=" << fmt(r.terminal_u) << " rho=" << fmt(r.terminal_rho);
  return out.str();
}

int ordered_change(const std::vector<ScanRow>& rows) {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (!rows[i].crossing && rows[i + 1].crossing) return int(i);
  return -1;
}

}  // namespace

CompactSupportProfile shoot_compact_support(double q, double vpi, double b0,
                                            double d_lo, double d_hi,
                                            int dimension) {
  check_exponents(q, vpi);
  if (!(b0 > 0.0))
    throw std::runtime_error("the focusing coefficient b0 must be positive");
  if (!(0.0 < d_lo && d_lo < d_hi))
    throw std::runtime_error("center heights must satisfy 0 < d_lo < d_hi");
  if (dimension < 3) throw std::runtime_error("dimension must be at least 3");

  double lo = d_lo, hi = d_hi;
  RegimeShot low = classify_shot(q, vpi, b0, d_lo, dimension);
  RegimeShot high = classify_shot(q, vpi, b0, d_hi, dimension);
  if (low.crossing || !high.crossing) {
    auto rows = scan_heights(q, vpi, b0, d_lo, d_hi, dimension, 25);
    int at = ordered_change(rows);
    if (at < 0) {
      bool any_cross = false, any_pos = false;
      for (const ScanRow& r : rows) (r.crossing ? any_cross : any_pos) = true;
      std::string msg;
      if (!any_cross)
        msg = "every shot over center heights [" + fmt(d_lo) + ", " +
              fmt(d_hi) + "] stays positive at the boundary; the focusing "
              "coefficient b0 = " + fmt(b0) +
              " is too small for a flat landing";
      else if (!any_pos)
        msg = "every shot over center heights [" + fmt(d_lo) + ", " +
              fmt(d_hi) + "] crosses zero; the crossing window sits below "
              "this range";
      else
        msg = "no ordered positive-to-crossing change over center heights [" +
              fmt(d_lo) + ", " + fmt(d_hi) + "]";
      throw std::runtime_error(msg + scan_trace(rows));
    }
    lo = rows[at].d;
    hi = rows[at + 1].d;
  }

  // Bisection toward the flat separatrix.  Crossing-side shots reach the
  // floor with shrinking slope; the cleanest of them is the profile.
  RegimeShot best;
  double best_d = 0.0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 220 && hi - lo > 1e-16 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    RegimeShot s = classify_shot(q, vpi, b0, mid, dimension);
    if (s.crossing) {
      hi = mid;
      if (s.hit_floor) {
        double fr = std::fabs(s.contact_u) + std::fabs(s.contact_du);
        if (fr < best_res) {
          best_res = fr;
          best = std::move(s);
          best_d = mid;
        }
      }
    } else {
      lo = mid;
    }
  }
  if (!(best_d > 0.0))
    throw std::runtime_error(
        "bisection never reached the contact floor between " + fmt(d_lo) +
        " and " + fmt(d_hi));
  if (!(best_res < 1e-6 * best_d))
    throw std::runtime_error("bisection stalled at flat residual " +
                             fmt(best_res) + ", above the tolerance " +
                             fmt(1e-6 * best_d));

  CompactSupportProfile out;
  out.q = q;
  out.vpi = vpi;
  out.b0 = b0;
  out.dimension = dimension;
  out.d = best_d;
  out.support_radius = best.contact;
  out.flat_residual = best_res;
  out.shot = std::move(best.res);

  // Stored samples on a unit-ball grid; values are clipped at zero so the
  // nodewise nonnegativity is exact despite interpolation wiggle.
  auto grid = build_grid(DomainSpec::ball(dimension, 1.0, 2.0), 160, 1.0, 6);
  out.profile.grid = grid;
  out.profile.values.assign(grid->size(), 0.0);
  out.profile.derivs.assign(grid->size(), 0.0);
  out.profile.has_derivs = true;
  out.profile.dirichlet = true;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double rho = grid->nodes[i];
    if (rho < out.support_radius) {
      out.profile.values[i] = std::max(0.0, out.shot.value_at(rho));
      out.profile.derivs[i] = out.shot.derivative_at(rho);
    }
  }
  return out;
}

CompactSupportProfile find_compact_support(double q, double vpi, int dimension,
                                           double b0_start) {
  check_exponents(q, vpi);
  if (!(b0_start > 0.0))
    throw std::runtime_error("the focusing coefficient b0 must be positive");
  if (dimension < 3) throw std::runtime_error("dimension must be at least 3");

  double b0 = b0_start;
  std::string attempts;
  for (int stage = 0; stage < 22; ++stage, b0 *= 2.0) {
    // The radial energy -d^q/q + b0 d^vpi/vpi turns positive above d_f;
    // below it no shot can reach zero, so the scan starts just above.
    double d_f = std::pow(vpi / (q * b0), 1.0 / (vpi - q));
    auto rows = scan_heights(q, vpi, b0, 1.05 * d_f, 1e4 * d_f, dimension, 97);
    int at = ordered_change(rows);
    if (at < 0) {
      attempts += " b0=" + fmt(b0) + ": no crossing;";
      continue;
    }
    return shoot_compact_support(q, vpi, b0, rows[at].d, rows[at + 1].d,
                                 dimension);
  }
  throw std::runtime_error(
      "no flat landing found while doubling b0 from " + fmt(b0_start) +
      " through " + fmt(b0 / 2.0) + ";" + attempts);
}

RadialProfile scale_family(const CompactSupportProfile& phi, double lambda,
                           double mu, GridPtr grid) {
  if (!phi.profile.grid || phi.shot.rho.empty())
    throw std::runtime_error("the base profile is empty");
  if (!(lambda >= 1.0))
    throw std::runtime_error("the dilation factor lambda must be at least 1");
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::runtime_error("the amplitude mu must be positive and finite");
  if (!grid) throw std::runtime_error("a target grid is required");
  if (grid->domain.kind != DomainKind::Ball || grid->domain.p != 2.0 ||
      grid->domain.dimension != phi.dimension)
    throw std::runtime_error(
        "the target grid must be a ball with p = 2 in the base profile's "
        "dimension");
  if (phi.support_radius / lambda > grid->domain.radius * (1.0 + 1e-12))
    throw std::runtime_error(
        "the scaled support does not fit inside the target domain");

  RadialProfile out;
  out.grid = grid;
  out.values.assign(grid->size(), 0.0);
  out.derivs.assign(grid->size(), 0.0);
  out.has_derivs = true;
  out.dirichlet = true;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double y = lambda * grid->nodes[i];
    if (y < phi.support_radius) {
      out.values[i] = mu * std::max(0.0, phi.shot.value_at(y));
      out.derivs[i] = mu * lambda * phi.shot.derivative_at(y);
    }
  }
  return out;
}

FamilyParams family_parameters(int dimension, double r, double vpi, double q,
                               double b0, double phi_w_norm) {
  if (dimension < 3) throw std::runtime_error("dimension must be at least 3");
  check_exponents(q, vpi);
  if (!(b0 > 0.0))
    throw std::runtime_error("the focusing coefficient b0 must be positive");
  if (!(phi_w_norm > 0.0))
    throw std::runtime_error("the base profile W-norm must be positive");
  double n = dimension;
  double two_star = 2.0 * n / (n - 2.0);
  double lower = 2.0 * (1.0 + vpi / n);
  if (!(r > lower && r <= two_star))
    throw std::runtime_error(
        "the growth exponent r must lie in (2(1 + vpi/N), 2N/(N-2)] = (" +
        fmt(lower) + ", " + fmt(two_star) +
        "]: at the lower end the amplitude decay rate reaches 1 and the "
        "family stalls; got r = " + fmt(r));

  FamilyParams fp;
  fp.dimension = dimension;
  fp.r = r;
  fp.vpi = vpi;
  fp.q = q;
  fp.b0 = b0;
  fp.phi_w_norm = phi_w_norm;
  fp.two_star = two_star;
  fp.alpha = (n / two_star) * (two_star - r) / (r - vpi);
  fp.e_scale = std::pow(std::pow(phi_w_norm, r - 2.0) * b0, 1.0 / (r - vpi));
  return fp;
}

double family_mu(const FamilyParams& params, double lambda) {
  if (!(lambda > 0.0)) throw std::runtime_error("lambda must be positive");
  return std::pow(lambda, -params.alpha) / params.e_scale;
}

double family_a(const FamilyParams& params, double lambda) {
  return std::pow(family_mu(params, lambda), params.vpi - params.q) /
         params.b0;
}

double family_unit_threshold(const FamilyParams& params) {
  // a(lambda) < 1 iff lambda^alpha > 1 / (e_scale b0^(1/(vpi-q))).
  double base =
      params.e_scale * std::pow(params.b0, 1.0 / (params.vpi - params.q));
  if (params.alpha == 0.0)
    return base >= 1.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::max(1.0, std::pow(base, -1.0 / params.alpha));
}

GridPtr family_grid(const DomainSpec& domain, double contact,
                    int points_per_cell) {
  const double R = domain.radius;
  if (!(contact > 0.0 && contact < R))
    throw std::runtime_error(
        "the contact point must sit strictly inside the domain; got " +
        fmt(contact) + " against radius " + fmt(R));
  if (points_per_cell < 2)
    throw std::runtime_error("at least 2 quadrature points per cell");
  const int ppc = points_per_cell;
  const int inner = 48, tail = 26, outer = 16;
  std::vector<double> bounds;
  bounds.reserve(inner + tail + outer + 1);
  for (int k = 0; k < inner; ++k) bounds.push_back(contact * k / inner);
  const double h = contact / inner;
  for (int j = 1; j <= tail; ++j)
    bounds.push_back(contact - h * std::pow(0.5, j));
  bounds.push_back(contact);
  for (int k = 1; k <= outer; ++k) {
    double t = double(k) / outer;
    bounds.push_back(contact + (R - contact) * t * t);
  }
  bounds.back() = R;

  auto grid = std::make_shared<RadialGrid>();
  grid->domain = domain;
  grid->grading = 1.0;
  grid->boundaries = bounds;
  std::vector<double> gx, gw;
  gauss_legendre(ppc, gx, gw);
  const int nm1 = domain.dimension - 1;
  grid->nodes.reserve(bounds.size() * (ppc + 1));
  grid->weights.reserve(bounds.size() * (ppc + 1));
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double a = bounds[k], b = bounds[k + 1];
    grid->nodes.push_back(a);
    grid->weights.push_back(0.0);
    const double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    for (int j = 0; j < ppc; ++j) {
      const double rho = mid + hl * gx[j];
      grid->nodes.push_back(rho);
      grid->weights.push_back(hl * gw[j] * std::pow(rho, nm1));
    }
  }
  grid->nodes.push_back(R);
  grid->weights.push_back(0.0);
  return grid;
}

namespace {

double fitted_slope(const std::vector<double>& x,
                    const std::vector<double>& y) {
  double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

FamilyReport verify_family(const FamilyParams& params,
                           const CompactSupportProfile& phi,
                           const std::vector<double>& lambda_ladder) {
  if (!phi.profile.grid || phi.shot.rho.empty())
    throw std::runtime_error("the base profile is empty");
  if (params.dimension != phi.dimension ||
      std::fabs(params.q - phi.q) > 1e-12 ||
      std::fabs(params.vpi - phi.vpi) > 1e-12 ||
      std::fabs(params.b0 - phi.b0) > 1e-12 * phi.b0)
    throw std::runtime_error(
        "the family parameters belong to a different base profile");
  double base_w = sobolev_norm(phi.profile);
  if (std::fabs(base_w - params.phi_w_norm) > 1e-6 * base_w)
    throw std::runtime_error(
        "the recorded base W-norm drifted from the profile; rebuild the "
        "parameters");
  if (lambda_ladder.size() < 2)
    throw std::runtime_error("the ladder needs at least two dilation factors");
  for (std::size_t i = 0; i < lambda_ladder.size(); ++i) {
    if (!(lambda_ladder[i] >= 1.0))
      throw std::runtime_error("ladder entries must be at least 1");
    if (i > 0 && !(lambda_ladder[i] > lambda_ladder[i - 1]))
      throw std::runtime_error("ladder entries must increase");
  }

  // The members live on a ball of twice the base radius, so every support
  // sits compactly inside the domain.
  DomainSpec domain = DomainSpec::ball(phi.dimension, 2.0, 2.0);
  KirchhoffTerm term = KirchhoffTerm::pure_power(2.0, params.r);

  FamilyReport rep;
  rep.params = params;
  rep.lambda_threshold = family_unit_threshold(params);
  std::vector<double> lx, lsup, lc1, lgrad;
  for (double lambda : lambda_ladder) {
    FamilyPoint pt;
    pt.lambda = lambda;
    pt.mu = family_mu(params, lambda);
    pt.a = family_a(params, lambda);
    GridPtr grid = family_grid(domain, phi.support_radius / lambda, 6);
    RadialProfile member = scale_family(phi, lambda, pt.mu, grid);
    pt.sup = sup_norm(member);
    double g = 0.0;
    for (double v : member.derivs) g = std::max(g, std::fabs(v));
    pt.grad_sup = g;
    pt.c1 = std::max(pt.sup, pt.grad_sup);
    pt.w_norm = sobolev_norm(member);
    double closed_sq = pt.mu * pt.mu *
                       std::pow(lambda, 2.0 - params.dimension) *
                       params.phi_w_norm * params.phi_w_norm;
    pt.w_norm_gap = std::fabs(pt.w_norm * pt.w_norm - closed_sq) / closed_sq;
    double m_closed = std::pow(closed_sq, 0.5 * (params.r - 2.0));
    double m_target =
        1.0 / (std::pow(pt.mu, 2.0 - params.vpi) * lambda * lambda * params.b0);
    pt.multiplier_gap = std::fabs(m_closed - m_target) / m_target;
    auto nl =
        Nonlinearity::from_pieces({{-pt.a, phi.q}, {1.0, phi.vpi}}, false);
    pt.residual = weak_residual(member, term, nl, 12).dual_norm;

    rep.points.push_back(pt);
    rep.max_residual = std::max(rep.max_residual, pt.residual);
    rep.max_multiplier_gap = std::max(rep.max_multiplier_gap, pt.multiplier_gap);
    rep.max_w_norm_gap = std::max(rep.max_w_norm_gap, pt.w_norm_gap);
    lx.push_back(std::log(lambda));
    lsup.push_back(std::log(pt.sup));
    lc1.push_back(std::log(pt.c1));
    lgrad.push_back(std::log(pt.grad_sup));
  }
  rep.sup_slope = fitted_slope(lx, lsup);
  rep.c1_slope = fitted_slope(lx, lc1);
  rep.grad_slope = fitted_slope(lx, lgrad);

  if (!(std::fabs(rep.sup_slope + params.alpha) <= 0.05))
    rep.failures.push_back("sup norm slope " + fmt(rep.sup_slope) +
                           " drifts more than 0.05 from " +
                           fmt(-params.alpha));
  if (!(std::fabs(rep.c1_slope - (1.0 - params.alpha)) <= 0.05))
    rep.failures.push_back("C1 norm slope " + fmt(rep.c1_slope) +
                           " drifts more than 0.05 from " +
                           fmt(1.0 - params.alpha));
  for (const FamilyPoint& pt : rep.points) {
    if (!(pt.residual < 1e-6))
      rep.failures.push_back("nonlocal residual " + fmt(pt.residual) +
                             " at lambda = " + fmt(pt.lambda) +
                             " is not below 1e-6");
    if (!(pt.multiplier_gap < 1e-10))
      rep.failures.push_back("multiplier identity gap " +
                             fmt(pt.multiplier_gap) + " at lambda = " +
                             fmt(pt.lambda) + " is not below 1e-10");
    if (pt.lambda >= rep.lambda_threshold && !(pt.a <= 1.0 + 1e-12))
      rep.failures.push_back("absorption coefficient " + fmt(pt.a) +
                             " exceeds 1 at lambda = " + fmt(pt.lambda) +
                             " past the unit threshold " +
                             fmt(rep.lambda_threshold));
  }
  rep.holds = rep.failures.empty();
  return rep;
}

SineBranchReport sine_example(int index) {
  if (index < 1)
    throw std::runtime_error("the branch index must be at least 1");
  const double pi = 3.14159265358979323846;
  const double amp = std::sqrt(2.0 / pi);
  auto grid = build_grid(DomainSpec::interval(pi, 2.0), 8 * index, 1.0, 5);
  RadialProfile u = profile_from_function(
      grid, [amp, index](double x) { return amp * std::sin(index * x); },
      [amp, index](double x) { return amp * index * std::cos(index * x); },
      true);

  SineBranchReport rep;
  rep.index = index;
  double w = sobolev_norm(u);
  rep.w_norm_sq = w * w;
  rep.sup = sup_norm(u);
  double g = 0.0;
  for (double v : u.derivs) g = std::max(g, std::fabs(v));
  rep.grad_sup = g;
  rep.c1 = std::max(rep.sup, rep.grad_sup);
  auto term = KirchhoffTerm::pure_power(2.0, 0.0);  // M(s^2) = s^(-2)
  auto nl = Nonlinearity::from_pieces({{1.0, 2.0}}, false);
  rep.residual = weak_residual(u, term, nl, std::max(12, index + 2)).dual_norm;

  double target = double(index) * double(index);
  if (!(std::fabs(rep.w_norm_sq - target) <= 1e-10))
    rep.failures.push_back("squared W-norm " + fmt(rep.w_norm_sq) +
                           " misses the branch value " + fmt(target));
  if (!(rep.residual < 1e-8))
    rep.failures.push_back("nonlocal residual " + fmt(rep.residual) +
                           " is not below 1e-8");
  if (!(std::fabs(rep.sup - amp) <= 1e-12))
    rep.failures.push_back("sup norm " + fmt(rep.sup) +
                           " misses sqrt(2/pi) = " + fmt(amp));
  rep.holds = rep.failures.empty();
  return rep;
}

}  // namespace kirchhoff
