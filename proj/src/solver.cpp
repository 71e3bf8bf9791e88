#include <kirchhoff/solver.hpp>

#include <kirchhoff/instanton.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace kirchhoff {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double edge_of(const DomainSpec& domain) {
  return domain.kind == DomainKind::Ball ? domain.radius : domain.radius / 2;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

ShootingOptions base_options(const DomainSpec& domain, double max_radius) {
  ShootingOptions opt;
  opt.dimension = domain.kind == DomainKind::Ball ? domain.dimension : 1;
  opt.p = domain.p;
  opt.max_radius = max_radius;
  return opt;
}

// Shot of -(rho^{N-1}|u'|^{p-2}u')' = rho^{N-1} gamma f(u) up to the domain
// edge, continued through sign changes.
ShootingResult edge_shot(double gamma, const Nonlinearity& nonlin, double d,
                         const DomainSpec& domain) {
  ShootingOptions opt = base_options(domain, edge_of(domain));
  opt.stop_at_zero = false;
  opt.potential = [gamma, &nonlin](double v) { return gamma * nonlin.F(v); };
  return shoot_radial([gamma, &nonlin](double v) { return gamma * nonlin.f(v); },
                      d, opt);
}

// Unit-multiplier shot rescaled onto the domain: gamma places the first zero
// on the boundary and the W-norm follows from the reference energy.
struct UnitShot {
  bool crossed = false;
  double y0 = 0;
  double gamma = 0;
  double norm_w_p = 0;
  double gap = kNan;  // gamma M(norm^p) - 1
  ShootingResult ref;
};

UnitShot unit_shot(const KirchhoffTerm& term, const Nonlinearity& nonlin,
                   const DomainSpec& domain, double d, double reference_radius,
                   double max_step = 0) {
  ShootingOptions opt = base_options(domain, reference_radius);
  opt.stop_at_zero = true;
  if (max_step > 0) opt.max_step = std::min(0.02, max_step);
  opt.potential = [&nonlin](double v) { return nonlin.F(v); };
  UnitShot shot{false, 0, 0, 0, kNan,
                shoot_radial([&nonlin](double v) { return nonlin.f(v); }, d, opt)};
  if (!shot.ref.crossed_zero) return shot;
  shot.crossed = true;
  shot.y0 = shot.ref.first_zero;
  double edge = edge_of(domain);
  double n = opt.dimension;
  shot.gamma = std::pow(shot.y0 / edge, domain.p);
  double energy = reference_energy(shot.ref, domain, shot.y0);
  double factor = domain.kind == DomainKind::Interval ? 2.0 : 1.0;
  shot.norm_w_p =
      factor * std::pow(shot.gamma, 1.0 - n / domain.p) * energy;
  shot.gap = shot.gamma * term.M(shot.norm_w_p) - 1.0;
  return shot;
}

// Re-locate a root with the step cap tied to its zero radius. Re-shooting
// alone is not enough: when the root hugs the crossing fold, the gap slope
// in the height is enormous and the fine integrator's fold sits at a
// slightly shifted height, so the gap must be re-bisected under the fine
// discretization before the profile is sampled from it.
std::pair<double, UnitShot> sharpen_root(const KirchhoffTerm& term,
                                         const Nonlinearity& nonlin,
                                         const DomainSpec& domain, double d,
                                         double reference_radius,
                                         const UnitShot& coarse) {
  if (!coarse.crossed || !(coarse.y0 > 0)) return {d, coarse};
  double step = coarse.y0 / 800.0;
  auto fine_shot = [&](double h) {
    return unit_shot(term, nonlin, domain, h, reference_radius, step);
  };
  UnitShot center = fine_shot(d);
  if (!center.crossed) return {d, coarse};
  if (std::abs(center.gap) <= 1e-9) return {d, center};
  // Signed gap with non-crossing heights read as the blown-up fold side.
  auto signed_gap = [&](const UnitShot& s) {
    return s.crossed ? s.gap : std::numeric_limits<double>::infinity();
  };
  for (double width = 1e-8; width <= 2e-3; width *= 10) {
    double lo = d * (1 - width), hi = d * (1 + width);
    UnitShot slo = fine_shot(lo), shi = fine_shot(hi);
    double a, b, ga;
    UnitShot sa;
    if (signed_gap(slo) * center.gap < 0) {
      a = lo;
      b = d;
      ga = signed_gap(slo);
      sa = slo;
    } else if (center.gap * signed_gap(shi) < 0) {
      a = d;
      b = hi;
      ga = center.gap;
      sa = center;
    } else {
      continue;
    }
    UnitShot best = sa.crossed ? sa : center;
    double best_d = sa.crossed ? a : d;
    for (int it = 0; it < 110; ++it) {
      double mid = 0.5 * (a + b);
      UnitShot sm = fine_shot(mid);
      double gm = signed_gap(sm);
      if (sm.crossed && std::abs(sm.gap) < std::abs(best.gap)) {
        best = sm;
        best_d = mid;
      }
      if ((sm.crossed && std::abs(sm.gap) <= 1e-11) ||
          b - a <= 1e-16 * std::max(std::abs(a), std::abs(b)))
        break;
      if (ga * gm < 0) {
        b = mid;
      } else {
        a = mid;
        ga = gm;
      }
    }
    return {best_d, best};
  }
  return {d, center};
}

// Profile of the rescaled shot on the grid; intervals mirror the shot about
// the midpoint.
RadialProfile shot_profile(GridPtr grid, const ShootingResult& ref,
                           double gamma) {
  const DomainSpec& domain = grid->domain;
  if (domain.kind == DomainKind::Ball) return rescaled_profile(grid, ref, gamma);
  double scale = std::pow(gamma, 1.0 / domain.p);
  double center = domain.radius / 2;
  std::vector<double> values(grid->size()), derivs(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double s = std::abs(grid->nodes[i] - center);
    values[i] = ref.value_at(scale * s);
    double sign = grid->nodes[i] >= center ? 1.0 : -1.0;
    derivs[i] = sign * scale * ref.derivative_at(scale * s);
  }
  RadialProfile out;
  out.grid = grid;
  out.values = std::move(values);
  out.derivs = std::move(derivs);
  out.has_derivs = true;
  double sup = 0;
  for (double v : out.values) sup = std::max(sup, std::abs(v));
  double boundary = std::max(std::abs(out.values.front()),
                             std::abs(out.values.back()));
  out.dirichlet = boundary <= 1e-6 * std::max(sup, 1e-300);
  return out;
}

std::vector<double> lebesgue_exponents(const Nonlinearity& nonlin) {
  std::vector<double> out;
  for (const auto& piece : nonlin.pieces) out.push_back(piece.exponent);
  return out;
}

SolveReport finalize_report(RadialProfile profile, double gamma, double d,
                            const KirchhoffTerm& term,
                            const Nonlinearity& nonlin, std::string kind,
                            std::vector<std::string> log) {
  SolveReport rep;
  rep.gamma = gamma;
  rep.d = d;
  rep.kind = std::move(kind);
  rep.log = std::move(log);
  rep.norm_w = sobolev_norm(profile);
  rep.norm_sup = sup_norm(profile);
  for (double e : lebesgue_exponents(nonlin))
    rep.lebesgue.emplace_back(e, lebesgue_norm(profile, std::max(e, 1.0)));
  try {
    rep.j_value = evaluate_J(profile, term, nonlin);
    rep.j_plus_value = evaluate_J_plus(profile, term, nonlin);
  } catch (const std::exception&) {
    rep.j_value = kNan;
    rep.j_plus_value = kNan;
    rep.log.push_back("energy level undefined for this Kirchhoff primitive");
  }
  WeakResidual wr = weak_residual(profile, term, nonlin);
  rep.residual = wr.dual_norm;
  if (wr.degenerate) rep.log.push_back("weak residual degenerate at this norm");
  if (rep.norm_w > 0) {
    double mg = term.M(std::pow(rep.norm_w, profile.grid->domain.p));
    rep.consistency = std::abs(gamma * mg - 1.0);
  } else {
    rep.consistency = 0;
    rep.log.push_back("zero profile, multiplier left as reported");
  }
  double depth = 0;
  for (double v : profile.values) depth = std::min(depth, v);
  if (depth < -1e-8 * std::max(rep.norm_sup, 1.0))
    rep.log.push_back("negative nodal values at depth " + fmt(depth));
  rep.profile = std::move(profile);
  return rep;
}

// Near the height where the unit shot stops crossing zero, the zero radius
// grows without bound and the multiplier gap blows up, so any sign change
// against that fold hides in a sliver of heights the plain scan cannot hit.
// Bisect the crossing predicate down to rounding, then bracket the gap root
// between the fold edge and the far crossing height. Midpoints that lose
// the crossing count as fold-side.
std::optional<std::pair<double, UnitShot>> fold_root(
    const std::function<UnitShot(double)>& gap_at, double d_out, double d_in,
    const UnitShot& far, double tol, std::vector<std::string>& notes) {
  double lo = d_out, hi = d_in;
  UnitShot edge = far;
  double edge_d = d_in;
  for (int it = 0; it < 140; ++it) {
    if (std::abs(hi - lo) <= 4e-16 * std::max(std::abs(hi), std::abs(lo)))
      break;
    double mid = 0.5 * (lo + hi);
    UnitShot sm = gap_at(mid);
    if (sm.crossed) {
      hi = mid;
      edge = sm;
      edge_d = mid;
    } else {
      lo = mid;
    }
  }
  if (!edge.crossed || !std::isfinite(edge.gap)) return std::nullopt;
  if (std::abs(edge.gap) <= tol) return std::make_pair(edge_d, edge);
  if (edge.gap * far.gap >= 0) {
    notes.push_back(
        "multiplier gap kept one sign against the crossing fold near height " +
        fmt(edge_d));
    return std::nullopt;
  }
  double a = edge_d, b = d_in, ga = edge.gap;
  UnitShot best = edge;
  double best_d = edge_d;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (a + b);
    UnitShot sm = gap_at(mid);
    double gm = sm.crossed ? sm.gap : ga;  // lost crossing reads fold-side
    if (sm.crossed && std::abs(sm.gap) < std::abs(best.gap)) {
      best = sm;
      best_d = mid;
    }
    if ((sm.crossed && std::abs(sm.gap) <= tol) ||
        std::abs(b - a) <= 1e-15 * std::max(std::abs(a), std::abs(b))) {
      break;
    }
    if (ga * gm < 0) {
      b = mid;
    } else {
      a = mid;
      ga = gm;
    }
  }
  if (std::abs(best.gap) > 1e-6) {
    notes.push_back("gap root against the fold did not sharpen below " +
                    fmt(best.gap));
    return std::nullopt;
  }
  return std::make_pair(best_d, best);
}

}  // namespace

LocalShot shoot_local(double gamma, const Nonlinearity& nonlin, double d,
                      GridPtr grid) {
  if (!grid) throw std::invalid_argument("grid is required");
  if (!(gamma >= 0))
    throw std::invalid_argument("multiplier must be nonnegative");
  const DomainSpec& domain = grid->domain;
  ShootingResult ref = edge_shot(gamma, nonlin, d, domain);
  LocalShot shot;
  shot.d = d;
  shot.gamma = gamma;
  shot.energy_drift = ref.energy_drift;
  double edge = edge_of(domain);
  shot.boundary_value = ref.value_at(edge);
  if (!ref.zeros.empty() && ref.zeros.front() <= edge) {
    shot.first_zero = ref.zeros.front();
    shot.classification = ShotClass::Crossing;
  } else {
    double scale = std::max(std::abs(d), 1e-300);
    double edge_slope = std::abs(ref.derivative_at(edge));
    if (std::abs(shot.boundary_value) <= 1e-8 * scale &&
        edge_slope > 1e-6 * scale) {
      // Transversal zero landing on the boundary within rounding.
      shot.first_zero = edge;
      shot.classification = ShotClass::Crossing;
    } else if (std::abs(shot.boundary_value) <= 1e-6 * scale &&
               edge_slope <= 1e-6 * scale) {
      shot.classification = ShotClass::FlatLanding;
    } else {
      shot.classification = ShotClass::PositiveAtBoundary;
    }
  }
  shot.profile = shot_profile(grid, ref, 1.0);
  return shot;
}

std::vector<double> solve_dirichlet_branch(double gamma,
                                           const Nonlinearity& nonlin,
                                           GridPtr grid, double d_lo,
                                           double d_hi, int scan_points) {
  if (!grid) throw std::invalid_argument("grid is required");
  if (!(gamma >= 0))
    throw std::invalid_argument("multiplier must be nonnegative");
  if (!(d_lo < d_hi))
    throw std::invalid_argument("height range must satisfy d_lo < d_hi");
  if (scan_points < 2)
    throw std::invalid_argument("scan needs at least two points");
  const DomainSpec& domain = grid->domain;
  double edge = edge_of(domain);
  auto edge_value = [&](double d) {
    return edge_shot(gamma, nonlin, d, domain).value_at(edge);
  };
  std::vector<double> ds(scan_points), vs(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    ds[i] = d_lo + (d_hi - d_lo) * i / (scan_points - 1);
    vs[i] = edge_value(ds[i]);
  }
  std::vector<double> roots;
  auto flat = [&](int i) {
    return std::abs(vs[i]) <= 1e-9 * std::max(std::abs(ds[i]), 1e-12);
  };
  for (int i = 0; i < scan_points; ++i)
    if (flat(i)) roots.push_back(ds[i]);
  for (int i = 0; i + 1 < scan_points; ++i) {
    if (flat(i) || flat(i + 1)) continue;
    if (vs[i] * vs[i + 1] >= 0) continue;
    double a = ds[i], b = ds[i + 1], va = vs[i];
    for (int it = 0; it < 80; ++it) {
      double m = 0.5 * (a + b);
      double vm = edge_value(m);
      if (vm == 0) {
        a = b = m;
        break;
      }
      if (va * vm < 0) {
        b = m;
      } else {
        a = m;
        va = vm;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  std::sort(roots.begin(), roots.end());
  double merge = 1e-12 * (d_hi - d_lo);
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || r - out.back() > merge) out.push_back(r);
  return out;
}

NonlocalScan solve_nonlocal(const KirchhoffTerm& term,
                            const Nonlinearity& nonlin, GridPtr grid,
                            const NonlocalSearch& search) {
  if (!grid) throw std::invalid_argument("grid is required");
  if (!(search.d_lo > 0 && search.d_lo < search.d_hi))
    throw std::invalid_argument(
        "height range must satisfy 0 < d_lo < d_hi");
  if (search.scan_points < 2)
    throw std::invalid_argument("scan needs at least two points");
  if (!(search.reference_radius > 0))
    throw std::invalid_argument("reference radius must be positive");
  const DomainSpec& domain = grid->domain;
  NonlocalScan scan;
  auto gap_at = [&](double d) {
    return unit_shot(term, nonlin, domain, d, search.reference_radius);
  };
  int n = search.scan_points;
  std::vector<UnitShot> shots;
  shots.reserve(n);
  int missed = 0;
  for (int i = 0; i < n; ++i) {
    double d = search.d_lo *
               std::pow(search.d_hi / search.d_lo, double(i) / (n - 1));
    shots.push_back(gap_at(d));
    scan.scan_d.push_back(d);
    scan.scan_gap.push_back(shots.back().gap);
    if (!shots.back().crossed) ++missed;
  }
  if (missed > 0)
    scan.notes.push_back(fmt(missed) + " of " + fmt(n) +
                         " scan heights produced no zero crossing within the "
                         "reference radius");
  auto push_root = [&](double d_coarse, const UnitShot& coarse) {
    for (const SolveReport& prev : scan.roots)
      if (std::abs(prev.d - d_coarse) <= 1e-10 * std::max(d_coarse, prev.d))
        return;
    auto [d, shot] = sharpen_root(term, nonlin, domain, d_coarse,
                                  search.reference_radius, coarse);
    std::vector<std::string> log;
    log.push_back("center height " + fmt(d));
    log.push_back("multiplier " + fmt(shot.gamma));
    log.push_back("first zero of the unit shot at " + fmt(shot.y0));
    log.push_back("consistency gap " + fmt(shot.gap));
    scan.roots.push_back(finalize_report(shot_profile(grid, shot.ref, shot.gamma),
                                         shot.gamma, d, term, nonlin,
                                         "consistency-root", std::move(log)));
  };
  auto gap_shot = std::function<UnitShot(double)>(gap_at);
  for (int i = 0; i + 1 < n; ++i) {
    const UnitShot &a = shots[i], &b = shots[i + 1];
    if (a.crossed != b.crossed) {
      double d_out = a.crossed ? scan.scan_d[i + 1] : scan.scan_d[i];
      double d_in = a.crossed ? scan.scan_d[i] : scan.scan_d[i + 1];
      const UnitShot& far = a.crossed ? a : b;
      auto hit = fold_root(gap_shot, d_out, d_in, far, search.tol, scan.notes);
      if (hit) push_root(hit->first, hit->second);
      continue;
    }
    if (!a.crossed || !b.crossed) continue;
    if (std::abs(a.gap) <= search.tol) {
      push_root(scan.scan_d[i], a);
      continue;
    }
    if (a.gap * b.gap >= 0) continue;
    double lo = scan.scan_d[i], hi = scan.scan_d[i + 1];
    double glo = a.gap;
    UnitShot best = a;
    double best_d = lo;
    bool ok = true;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      UnitShot sm = gap_at(mid);
      if (!sm.crossed) {
        scan.notes.push_back(
            "bisection lost the zero crossing near height " + fmt(mid));
        ok = false;
        break;
      }
      if (std::abs(sm.gap) < std::abs(best.gap)) {
        best = sm;
        best_d = mid;
      }
      if (std::abs(sm.gap) <= search.tol || hi - lo <= 1e-15 * hi) {
        best = sm;
        best_d = mid;
        break;
      }
      if (glo * sm.gap < 0) {
        hi = mid;
      } else {
        lo = mid;
        glo = sm.gap;
      }
    }
    if (ok) push_root(best_d, best);
  }
  if (std::abs(shots.back().gap) <= search.tol && shots.back().crossed)
    push_root(scan.scan_d.back(), shots.back());
  if (scan.roots.empty())
    scan.notes.push_back("no consistency root in the scanned range");
  return scan;
}

// ---------------------------------------------------------------------------
// Nodal functional

// The W part is the exact integral of the piecewise linear interpolant
// through the node values: slopes per segment against the rho^{N-1} segment
// masses. This keeps the discrete seminorm a genuine norm on the pinned
// space, so the restricted functional inherits the coercivity of the full
// one. The force part uses the grid quadrature at the nodes.
struct NodalFunctional::Impl {
  GridPtr grid;
  KirchhoffTerm term;
  Nonlinearity nonlin;
  int m = 0;
  double p = 2;
  double surface = 1;
  std::vector<bool> pinned;
  std::vector<double> seg_len;   // node spacing per segment
  std::vector<double> seg_mass;  // surface * integral of rho^{N-1} over it
  std::vector<double> w;         // rho^{N-1} quadrature weights

  mutable Eigen::SparseMatrix<double> stiff;  // p = 2 stiffness, lazily built
  mutable std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>
      factor;
  mutable Eigen::MatrixXd dense_stiff;
  mutable bool dense_ready = false;

  double slope(const std::vector<double>& u, int j) const {
    return (u[j + 1] - u[j]) / seg_len[j];
  }

  void check_size(const std::vector<double>& u) const {
    if ((int)u.size() != m)
      throw std::invalid_argument("vector length does not match the grid");
  }

  void build_stiffness() const {
    if (factor) return;
    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j + 1 < m; ++j) {
      double s = seg_mass[j] / (seg_len[j] * seg_len[j]);
      int idx[2] = {j, j + 1};
      double sgn[2] = {-1.0, 1.0};
      for (int a = 0; a < 2; ++a) {
        if (pinned[idx[a]]) continue;
        for (int b = 0; b < 2; ++b) {
          if (pinned[idx[b]]) continue;
          trips.emplace_back(idx[a], idx[b], s * sgn[a] * sgn[b]);
        }
      }
    }
    for (int k = 0; k < m; ++k)
      if (pinned[k]) trips.emplace_back(k, k, 1.0);
    stiff.resize(m, m);
    stiff.setFromTriplets(trips.begin(), trips.end());
    double diag_max = 0;
    for (int k = 0; k < m; ++k) diag_max = std::max(diag_max, stiff.coeff(k, k));
    Eigen::SparseMatrix<double> reg(m, m);
    reg.setIdentity();
    stiff += 1e-13 * diag_max * reg;
    factor = std::make_unique<
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    factor->compute(stiff);
    if (factor->info() != Eigen::Success)
      throw std::runtime_error("stiffness factorization failed");
  }

  // Solve (c-weighted stiffness + reg) x = g; for p = 2 the cached
  // factorization is reused and only the Kirchhoff factor rescales.
  std::vector<double> metric_solve(const std::vector<double>& u,
                                   const std::vector<double>& g,
                                   double* quad_form) const {
    double G = norm(u);
    double mg = term.M(G);
    double scale = mg > 1e-14 ? mg : 1.0;
    Eigen::VectorXd rhs(m);
    for (int k = 0; k < m; ++k) rhs[k] = pinned[k] ? 0.0 : g[k];
    Eigen::VectorXd x;
    if (p == 2.0) {
      build_stiffness();
      x = factor->solve(rhs);
    } else {
      int segs = m - 1;
      std::vector<double> c(segs, 0.0);
      std::vector<double> pos;
      for (int j = 0; j < segs; ++j) {
        double a = std::abs(slope(u, j));
        c[j] = a > 0 ? std::pow(a, p - 2.0) : 0.0;
        if (c[j] > 0) pos.push_back(c[j]);
      }
      double med = 1.0;
      if (!pos.empty()) {
        std::nth_element(pos.begin(), pos.begin() + pos.size() / 2, pos.end());
        med = pos[pos.size() / 2];
      }
      for (int j = 0; j < segs; ++j)
        c[j] = std::clamp(c[j], 1e-8 * med, 1e8 * med);
      std::vector<Eigen::Triplet<double>> trips;
      for (int j = 0; j < segs; ++j) {
        double s = c[j] * seg_mass[j] / (seg_len[j] * seg_len[j]);
        int idx[2] = {j, j + 1};
        double sgn[2] = {-1.0, 1.0};
        for (int a = 0; a < 2; ++a) {
          if (pinned[idx[a]]) continue;
          for (int b = 0; b < 2; ++b) {
            if (pinned[idx[b]]) continue;
            trips.emplace_back(idx[a], idx[b], s * sgn[a] * sgn[b]);
          }
        }
      }
      for (int k = 0; k < m; ++k)
        if (pinned[k]) trips.emplace_back(k, k, 1.0);
      Eigen::SparseMatrix<double> A(m, m);
      A.setFromTriplets(trips.begin(), trips.end());
      double diag_max = 0;
      for (int k = 0; k < m; ++k) diag_max = std::max(diag_max, A.coeff(k, k));
      Eigen::SparseMatrix<double> reg(m, m);
      reg.setIdentity();
      A += 1e-13 * std::max(diag_max, 1.0) * reg;
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> local;
      local.compute(A);
      if (local.info() != Eigen::Success)
        throw std::runtime_error("metric factorization failed");
      x = local.solve(rhs);
    }
    if (quad_form) {
      double q = 0;
      for (int k = 0; k < m; ++k)
        if (!pinned[k]) q += g[k] * x[k];
      *quad_form = std::max(q, 0.0) / scale;
    }
    std::vector<double> out(m, 0.0);
    for (int k = 0; k < m; ++k)
      if (!pinned[k]) out[k] = x[k] / scale;
    return out;
  }

  double norm(const std::vector<double>& u) const {
    double G = 0;
    for (int j = 0; j + 1 < m; ++j)
      G += seg_mass[j] * std::pow(std::abs(slope(u, j)), p);
    if (!std::isfinite(G)) return std::numeric_limits<double>::infinity();
    return G;
  }
};

NodalFunctional::NodalFunctional(GridPtr grid, KirchhoffTerm term,
                                 Nonlinearity nonlin, bool positive_part)
    : impl_(std::make_unique<Impl>()) {
  if (!grid) throw std::invalid_argument("grid is required");
  impl_->grid = grid;
  impl_->term = std::move(term);
  impl_->nonlin = std::move(nonlin);
  if (positive_part) impl_->nonlin.positive_part = true;
  impl_->m = (int)grid->size();
  if (impl_->m < 3)
    throw std::invalid_argument("grid must carry at least three nodes");
  impl_->p = grid->domain.p;
  impl_->surface = grid->domain.surface_factor;
  impl_->w = grid->weights;
  impl_->pinned.assign(impl_->m, false);
  impl_->pinned[impl_->m - 1] = true;
  if (grid->domain.kind == DomainKind::Interval) impl_->pinned[0] = true;
  const auto& xs = grid->nodes;
  int dim = grid->domain.dimension;
  impl_->seg_len.resize(impl_->m - 1);
  impl_->seg_mass.resize(impl_->m - 1);
  for (int j = 0; j + 1 < impl_->m; ++j) {
    impl_->seg_len[j] = xs[j + 1] - xs[j];
    impl_->seg_mass[j] = impl_->surface *
                         (std::pow(xs[j + 1], dim) - std::pow(xs[j], dim)) /
                         dim;
  }
}

NodalFunctional::~NodalFunctional() = default;

std::size_t NodalFunctional::size() const { return impl_->m; }

GridPtr NodalFunctional::grid() const { return impl_->grid; }

double NodalFunctional::norm_w_p(const std::vector<double>& u) const {
  impl_->check_size(u);
  return impl_->norm(u);
}

double NodalFunctional::value(const std::vector<double>& u) const {
  impl_->check_size(u);
  double G = impl_->norm(u);
  // Overflowed trial vectors read as +infinity so a line search rejects
  // them instead of propagating NaN.
  if (!std::isfinite(G)) return std::numeric_limits<double>::infinity();
  double pot = 0;
  for (int i = 0; i < impl_->m; ++i)
    if (impl_->w[i] != 0) pot += impl_->w[i] * impl_->nonlin.F(u[i]);
  if (!std::isfinite(pot)) return std::numeric_limits<double>::infinity();
  return impl_->term.m_hat(G) / impl_->p - impl_->surface * pot;
}

std::vector<double> NodalFunctional::gradient(const std::vector<double>& u) const {
  impl_->check_size(u);
  const Impl& s = *impl_;
  double G = s.norm(u);
  double mg = s.term.M(G);
  std::vector<double> g(s.m, 0.0);
  for (int j = 0; j + 1 < s.m; ++j) {
    double sj = s.slope(u, j);
    double flux = mg * s.seg_mass[j] * std::pow(std::abs(sj), s.p - 1.0) *
                  (sj >= 0 ? 1.0 : -1.0) / s.seg_len[j];
    g[j] -= flux;
    g[j + 1] += flux;
  }
  for (int i = 0; i < s.m; ++i)
    if (s.w[i] != 0) g[i] -= s.surface * s.w[i] * s.nonlin.f(u[i]);
  for (int k = 0; k < s.m; ++k)
    if (s.pinned[k]) g[k] = 0;
  return g;
}

double NodalFunctional::dual_norm(const std::vector<double>& u,
                                  const std::vector<double>& g) const {
  impl_->check_size(u);
  impl_->check_size(g);
  double q = 0;
  impl_->metric_solve(u, g, &q);
  return std::sqrt(q);
}

std::vector<double> NodalFunctional::precondition(
    const std::vector<double>& u, const std::vector<double>& g) const {
  impl_->check_size(u);
  impl_->check_size(g);
  return impl_->metric_solve(u, g, nullptr);
}

bool NodalFunctional::newton_step(const std::vector<double>& u,
                                  std::vector<double>& step) const {
  impl_->check_size(u);
  const Impl& s = *impl_;
  if (s.p != 2.0) return false;
  if (!s.dense_ready) {
    s.dense_stiff = Eigen::MatrixXd::Zero(s.m, s.m);
    for (int j = 0; j + 1 < s.m; ++j) {
      double sw = s.seg_mass[j] / (s.seg_len[j] * s.seg_len[j]);
      s.dense_stiff(j, j) += sw;
      s.dense_stiff(j + 1, j + 1) += sw;
      s.dense_stiff(j, j + 1) -= sw;
      s.dense_stiff(j + 1, j) -= sw;
    }
    s.dense_ready = true;
  }
  Eigen::VectorXd uv(s.m);
  for (int k = 0; k < s.m; ++k) uv[k] = u[k];
  Eigen::VectorXd ku = s.dense_stiff * uv;
  double G = std::max(uv.dot(ku), 0.0);
  double mg = s.term.M(G);
  double h = 1e-6 * std::max(G, 1e-12);
  double glo = std::max(G - h, 0.0);
  double mp = (s.term.M(G + h) - s.term.M(glo)) / (G + h - glo);
  Eigen::MatrixXd H = mg * s.dense_stiff + 2.0 * mp * ku * ku.transpose();
  for (int i = 0; i < s.m; ++i) {
    if (s.w[i] == 0) continue;
    double v = u[i];
    if (s.nonlin.positive_part && v <= 0) continue;
    double fp = 0;
    for (const auto& piece : s.nonlin.pieces) {
      double e = piece.exponent;
      double av = std::abs(v);
      if (e < 2.0 && av < 1e-12) continue;
      fp += piece.coefficient * (e - 1.0) * std::pow(av, e - 2.0);
    }
    H(i, i) -= s.surface * s.w[i] * fp;
  }
  std::vector<double> g = gradient(u);
  Eigen::VectorXd rhs(s.m);
  for (int k = 0; k < s.m; ++k) rhs[k] = g[k];
  for (int k = 0; k < s.m; ++k) {
    if (!s.pinned[k]) continue;
    H.row(k).setZero();
    H.col(k).setZero();
    H(k, k) = 1.0;
    rhs[k] = 0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(H);
  Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) return false;
  step.assign(s.m, 0.0);
  for (int k = 0; k < s.m; ++k)
    if (!s.pinned[k]) step[k] = sol[k];
  return true;
}

RadialProfile NodalFunctional::to_profile(const std::vector<double>& u) const {
  impl_->check_size(u);
  RadialProfile out;
  out.grid = impl_->grid;
  out.values = u;
  out.derivs = fd_derivative(*impl_->grid, u);
  out.has_derivs = true;
  out.dirichlet = true;
  return out;
}

std::vector<double> NodalFunctional::from_profile(const RadialProfile& u) const {
  if (u.grid != impl_->grid)
    throw std::invalid_argument("profile lives on a different grid");
  std::vector<double> out = u.values;
  for (int k = 0; k < impl_->m; ++k)
    if (impl_->pinned[k]) out[k] = 0;
  return out;
}

// ---------------------------------------------------------------------------
// Descent and path methods

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Scale u onto the ball |u|_W <= radius; returns true when it projected.
bool project_ball(const NodalFunctional& F, std::vector<double>& u,
                  double radius, double p) {
  if (radius <= 0) return false;
  double n = std::pow(F.norm_w_p(u), 1.0 / p);
  if (n <= radius) return false;
  double s = radius / n;
  for (double& v : u) v *= s;
  return true;
}

struct ArmijoState {
  double step = 1.0;
};

// One backtracking move along the preconditioned direction; returns true
// when the point moved.
bool armijo_move(const NodalFunctional& F, std::vector<double>& u, double& J,
                 ArmijoState& state, double ball_radius, double p) {
  std::vector<double> g = F.gradient(u);
  std::vector<double> dir = F.precondition(u, g);
  double gs = dot(g, dir);
  if (!(gs > 0)) {
    dir = g;
    gs = dot(g, g);
    if (!(gs > 0)) return false;
  }
  double t = state.step;
  for (int tries = 0; tries < 60 && t > 1e-18; ++tries, t /= 2) {
    std::vector<double> trial(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) trial[k] = u[k] - t * dir[k];
    bool projected = project_ball(F, trial, ball_radius, p);
    double Jt = F.value(trial);
    bool ok = projected ? Jt < J : Jt <= J - 1e-4 * t * gs;
    if (ok) {
      u = std::move(trial);
      J = Jt;
      state.step = std::min(t * 1.7, 1e6);
      return true;
    }
  }
  state.step = std::max(state.step / 4, 1e-18);
  return false;
}

void newton_polish(const NodalFunctional& F, std::vector<double>& u,
                   int max_iter, std::vector<std::string>& log) {
  std::vector<double> g = F.gradient(u);
  double res = F.dual_norm(u, g);
  int used = 0;
  for (; used < max_iter; ++used) {
    if (res < 1e-13) break;
    std::vector<double> step;
    if (!F.newton_step(u, step)) break;
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h < 25; ++h, scale /= 2) {
      std::vector<double> trial(u.size());
      for (std::size_t k = 0; k < u.size(); ++k)
        trial[k] = u[k] - scale * step[k];
      std::vector<double> gt = F.gradient(trial);
      double rt = F.dual_norm(trial, gt);
      if (rt < res) {
        u = std::move(trial);
        res = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (used > 0)
    log.push_back("second order polish, " + fmt(used) +
                  " steps, residual " + fmt(res));
}

}  // namespace

SolveReport minimize_j_plus(const KirchhoffTerm& term,
                            const Nonlinearity& nonlin, GridPtr grid,
                            const RadialProfile& init,
                            const DescentConfig& config) {
  NodalFunctional F(grid, term, nonlin, true);
  Nonlinearity nl_plus = nonlin;
  nl_plus.positive_part = true;
  double p = grid->domain.p;
  std::vector<double> u = F.from_profile(init);
  project_ball(F, u, config.ball_radius, p);
  std::vector<std::string> log;
  if (F.norm_w_p(u) == 0) {
    std::vector<double> g = F.gradient(u);
    if (F.dual_norm(u, g) < std::max(config.tolerance, 1e-12)) {
      log.push_back("degenerate critical point, J = 0");
      return finalize_report(F.to_profile(u), 0.0, 0.0, term, nl_plus,
                             "local-min", std::move(log));
    }
  }
  double J = F.value(u);
  ArmijoState state;
  int iter = 0;
  double res = 0;
  for (; iter < config.max_iterations; ++iter) {
    std::vector<double> g = F.gradient(u);
    res = F.dual_norm(u, g);
    if (res < config.tolerance) break;
    if (!armijo_move(F, u, J, state, config.ball_radius, p)) {
      log.push_back("descent stalled at residual " + fmt(res));
      break;
    }
  }
  log.push_back("descent iterations " + fmt(iter) + ", residual " + fmt(res));
  if (config.ball_radius > 0) {
    double n = std::pow(F.norm_w_p(u), 1.0 / p);
    if (n >= config.ball_radius * (1 - 1e-9))
      log.push_back("stopped on the norm ball boundary");
  }
  if (config.newton_polish) newton_polish(F, u, config.max_newton, log);
  double G = F.norm_w_p(u);
  double mg = term.M(G);
  double gamma = (G > 0 && mg > 0) ? 1.0 / mg : 0.0;
  double d = u.empty() ? 0.0 : u[0];
  if (grid->domain.kind == DomainKind::Interval) {
    double center = grid->domain.radius / 2;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid->size(); ++i) {
      double gap = std::abs(grid->nodes[i] - center);
      if (gap < best) {
        best = gap;
        d = u[i];
      }
    }
  }
  return finalize_report(F.to_profile(u), gamma, d, term, nl_plus, "local-min",
                         std::move(log));
}

SolveReport mountain_pass(const KirchhoffTerm& term, const Nonlinearity& nonlin,
                          GridPtr grid, const RadialProfile& endpoint,
                          const PathConfig& config) {
  NodalFunctional F(grid, term, nonlin, true);
  Nonlinearity nl_plus = nonlin;
  nl_plus.positive_part = true;
  double p = grid->domain.p;
  std::vector<double> e = F.from_profile(endpoint);
  double Je = F.value(e);
  if (!(Je < 0))
    throw std::invalid_argument("path endpoint must have negative level");
  int K = std::max(config.nodes, 8);
  std::vector<std::vector<double>> z(K + 1, std::vector<double>(F.size(), 0.0));
  for (int k = 0; k <= K; ++k) {
    double t = std::pow(double(k) / K, 2.0);
    for (std::size_t i = 0; i < F.size(); ++i) z[k][i] = t * e[i];
  }
  std::vector<ArmijoState> states(K + 1);
  std::vector<double> levels(K + 1);
  auto path_levels = [&]() {
    for (int k = 0; k <= K; ++k) levels[k] = F.value(z[k]);
  };
  auto path_max = [&]() {
    int kb = 1;
    for (int k = 1; k < K; ++k)
      if (levels[k] > levels[kb]) kb = k;
    return kb;
  };
  auto seg_norm = [&](const std::vector<double>& a,
                      const std::vector<double>& b) {
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return std::pow(F.norm_w_p(diff), 1.0 / p);
  };
  path_levels();
  std::vector<double> level_history;
  int sweeps = 0;
  int stall = 0;
  double res = std::numeric_limits<double>::infinity();
  for (; sweeps < config.max_sweeps; ++sweeps) {
    for (int k = 1; k < K; ++k) {
      double J = levels[k];
      if (armijo_move(F, z[k], J, states[k], config.ball_radius, p))
        levels[k] = J;
    }
    // Arclength reparametrization keeps the string from sliding off the
    // ridge into the basins; interpolation can lift the running level by a
    // curvature-times-spacing-squared amount, which the log reports.
    {
      std::vector<double> arc(K + 1, 0.0);
      for (int k = 1; k <= K; ++k)
        arc[k] = arc[k - 1] + seg_norm(z[k], z[k - 1]);
      if (arc[K] > 0) {
        std::vector<std::vector<double>> fresh(K + 1);
        fresh[0] = z[0];
        fresh[K] = z[K];
        int seg = 1;
        for (int k = 1; k < K; ++k) {
          double target = arc[K] * k / K;
          while (seg < K && arc[seg] < target) ++seg;
          double lo = arc[seg - 1], hi = arc[seg];
          double t = hi > lo ? (target - lo) / (hi - lo) : 0.0;
          fresh[k].resize(F.size());
          for (std::size_t i = 0; i < F.size(); ++i)
            fresh[k][i] = (1 - t) * z[seg - 1][i] + t * z[seg][i];
        }
        for (int k = 1; k < K; ++k) {
          z[k] = std::move(fresh[k]);
          levels[k] = F.value(z[k]);
        }
      }
    }
    int kb = path_max();
    double level = levels[kb];
    level_history.push_back(level);
    std::vector<double> g = F.gradient(z[kb]);
    res = F.dual_norm(z[kb], g);
    if (res < config.tolerance) break;
    if (level_history.size() > 1) {
      double drop = level_history[level_history.size() - 2] - level;
      if (drop < config.level_tolerance * (1 + std::abs(level)))
        ++stall;
      else
        stall = 0;
      if (stall > 60) break;
    }
  }
  int kb = path_max();
  std::vector<double> u = z[kb];
  std::vector<std::string> log;
  log.push_back("string sweeps " + fmt(sweeps) + ", bottleneck residual " +
                fmt(res));
  if (!level_history.empty()) {
    log.push_back("level start " + fmt(level_history.front()) + ", end " +
                  fmt(level_history.back()));
    double worst = 0;
    for (std::size_t i = 1; i < level_history.size(); ++i)
      worst = std::max(worst, level_history[i] - level_history[i - 1]);
    log.push_back("largest level increase between sweeps " + fmt(worst));
    std::size_t tail =
        level_history.size() > 10 ? level_history.size() - 10 : 1;
    double tail_worst = 0;
    for (std::size_t i = tail; i < level_history.size(); ++i)
      tail_worst =
          std::max(tail_worst, level_history[i] - level_history[i - 1]);
    log.push_back("largest level increase over the final sweeps " +
                  fmt(tail_worst));
  }
  double floor = std::max(levels[0], levels[K]);
  if (levels[kb] <= floor + 1e-12 * (1 + std::abs(floor)))
    log.push_back("path collapsed: no barrier above the endpoints persisted");
  if (config.newton_polish) newton_polish(F, u, 60, log);
  double G = F.norm_w_p(u);
  double mg = term.M(G);
  double gamma = (G > 0 && mg > 0) ? 1.0 / mg : 0.0;
  return finalize_report(F.to_profile(u), gamma, u.empty() ? 0.0 : u[0], term,
                         nl_plus, "mountain-pass", std::move(log));
}

std::optional<CrossValidation> cross_validate(const SolveReport& candidate,
                                              const KirchhoffTerm& term,
                                              const Nonlinearity& nonlin,
                                              GridPtr grid, double window) {
  if (!grid) throw std::invalid_argument("grid is required");
  double dc = candidate.d > 0 ? candidate.d : candidate.norm_sup;
  if (!(dc > 0) || !(window > 0)) return std::nullopt;
  const DomainSpec& domain = grid->domain;
  double reference_radius = 240.0;
  auto gap_at = [&](double d) {
    return unit_shot(term, nonlin, domain, d, reference_radius);
  };
  int n = 25;
  double lo = dc / (1 + window), hi = dc * (1 + window);
  std::vector<double> ds(n);
  std::vector<UnitShot> shots;
  for (int i = 0; i < n; ++i) {
    ds[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    shots.push_back(gap_at(ds[i]));
  }
  double best_gap = std::numeric_limits<double>::infinity();
  double root_d = 0;
  UnitShot root_shot;
  bool found = false;
  auto gap_shot = std::function<UnitShot(double)>(gap_at);
  std::vector<std::string> fold_notes;
  auto offer = [&](double d, const UnitShot& shot) {
    double score = std::abs(std::log(d / dc));
    if (shot.crossed && std::abs(shot.gap) < 1e-8 && score < best_gap) {
      best_gap = score;
      root_d = d;
      root_shot = shot;
      found = true;
    }
  };
  for (int i = 0; i + 1 < n; ++i) {
    const UnitShot &a = shots[i], &b = shots[i + 1];
    if (a.crossed != b.crossed) {
      double d_out = a.crossed ? ds[i + 1] : ds[i];
      double d_in = a.crossed ? ds[i] : ds[i + 1];
      const UnitShot& far = a.crossed ? a : b;
      auto hit = fold_root(gap_shot, d_out, d_in, far, 1e-12, fold_notes);
      if (hit) offer(hit->first, hit->second);
      continue;
    }
    if (!a.crossed || !b.crossed) continue;
    if (a.gap * b.gap > 0) continue;
    double dlo = ds[i], dhi = ds[i + 1], glo = a.gap;
    UnitShot cur = a;
    double cur_d = dlo;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (dlo + dhi);
      UnitShot sm = gap_at(mid);
      if (!sm.crossed) break;
      cur = sm;
      cur_d = mid;
      if (std::abs(sm.gap) <= 1e-12 || dhi - dlo <= 1e-15 * dhi) break;
      if (glo * sm.gap < 0) {
        dhi = mid;
      } else {
        dlo = mid;
        glo = sm.gap;
      }
    }
    offer(cur_d, cur);
  }
  if (!found) return std::nullopt;
  std::tie(root_d, root_shot) =
      sharpen_root(term, nonlin, domain, root_d, reference_radius, root_shot);
  CrossValidation out;
  std::vector<std::string> log;
  log.push_back("refined center height " + fmt(root_d));
  log.push_back("refined multiplier " + fmt(root_shot.gamma));
  out.refined = finalize_report(shot_profile(grid, root_shot.ref,
                                             root_shot.gamma),
                                root_shot.gamma, root_d, term, nonlin,
                                "consistency-root", std::move(log));
  out.d_gap = std::abs(root_d - candidate.d) / root_d;
  out.gamma_gap = candidate.gamma > 0
                      ? std::abs(root_shot.gamma - candidate.gamma) /
                            root_shot.gamma
                      : 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Scenario drivers

namespace {

RadialProfile scaled_profile(const RadialProfile& u, double s) {
  RadialProfile out = u;
  for (double& v : out.values) v *= s;
  if (out.has_derivs)
    for (double& v : out.derivs) v *= s;
  return out;
}

RadialProfile diff_profile(const RadialProfile& a, const RadialProfile& b) {
  RadialProfile out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] -= b.values[i];
  if (out.has_derivs && b.has_derivs)
    for (std::size_t i = 0; i < out.derivs.size(); ++i)
      out.derivs[i] -= b.derivs[i];
  return out;
}

RadialProfile normalized_bump(GridPtr grid) {
  double R = grid->domain.radius;
  RadialProfile bump = profile_from_function(
      grid, [R](double rho) { return 1.0 - (rho / R) * (rho / R); },
      [R](double rho) { return -2.0 * rho / (R * R); }, true);
  double n = sobolev_norm(bump);
  RadialProfile out = scaled_profile(bump, 1.0 / n);
  out.dirichlet = true;
  return out;
}

// Unit-norm directions spanning both spread and concentrated shapes, used
// to sample spheres in the W norm.
std::vector<RadialProfile> sphere_directions(GridPtr grid,
                                             const RadialProfile& phi,
                                             std::mt19937_64& rng) {
  std::vector<RadialProfile> dirs;
  dirs.push_back(phi);
  double R = grid->domain.radius;
  for (double width : {0.03, 0.1, 0.3}) {
    double wr = width * R;
    RadialProfile bump = profile_from_function(
        grid,
        [wr](double rho) {
          double t = rho / wr;
          return t < 1 ? (1 - t * t) : 0.0;
        },
        [wr](double rho) {
          double t = rho / wr;
          return t < 1 ? -2 * rho / (wr * wr) : 0.0;
        },
        true);
    double n = sobolev_norm(bump);
    if (n > 0) dirs.push_back(scaled_profile(bump, 1.0 / n));
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    std::array<double, 5> a{};
    for (double& c : a) c = gauss(rng);
    RadialProfile mix = profile_from_function(
        grid,
        [R, a](double rho) {
          double t = rho / R;
          double poly = 0, tp = 1;
          for (double c : a) {
            poly += c * tp;
            tp *= t;
          }
          return poly * (1 - t * t);
        },
        [R, a](double rho) {
          double t = rho / R;
          double poly = 0, dpoly = 0, tp = 1;
          for (std::size_t j = 0; j < a.size(); ++j) {
            poly += a[j] * tp;
            if (j + 1 < a.size()) dpoly += a[j + 1] * (j + 1) * tp;
            tp *= t;
          }
          return (dpoly * (1 - t * t) - 2 * t * poly) / R;
        },
        true);
    double n = sobolev_norm(mix);
    if (n > 0) dirs.push_back(scaled_profile(mix, 1.0 / n));
  }
  for (auto& dir : dirs) dir.dirichlet = true;
  return dirs;
}

}  // namespace

ThreeSolutionsResult three_solutions_scenario(double q, double r, double sigma,
                                              double vpi, double mu,
                                              double lambda, GridPtr grid,
                                              unsigned long long seed) {
  if (!grid) throw std::invalid_argument("grid is required");
  const DomainSpec& domain = grid->domain;
  if (domain.kind != DomainKind::Ball || domain.p != 2.0)
    throw std::invalid_argument("scenario requires a ball domain with p = 2");
  if (!(1 < q && q < sigma && sigma < vpi))
    throw std::invalid_argument("exponents must satisfy 1 < q < sigma < vpi");
  if (!(mu > 0 && lambda > 0))
    throw std::invalid_argument("mu and lambda must be positive");
  KirchhoffTerm term = KirchhoffTerm::pure_power(2.0, r);
  Nonlinearity full = Nonlinearity::model_three(q, sigma, vpi, mu, lambda, true);
  Nonlinearity aux =
      Nonlinearity::from_pieces({{-1.0, q}, {mu, sigma}}, true);

  ThreeSolutionsResult result;
  ThreeSolutionsCertificate& cert = result.certificate;
  RadialProfile phi = normalized_bump(grid);
  RayDecomposition ray_aux = ray_decomposition(phi, aux);
  RayDecomposition ray_full = ray_decomposition(phi, full);

  cert.k_at_phi = ray_aux.value(1.0, term);
  if (!(cert.k_at_phi < 0))
    cert.failures.push_back("auxiliary level at the bump is not negative");
  double k_hump = 0;
  int samples = 4000;
  for (int i = 1; i <= samples; ++i) {
    double tau = double(i) / samples;
    k_hump = std::max(k_hump, ray_aux.value(tau, term));
  }
  cert.k_max_segment = k_hump;
  cert.s_level =
      std::max(2.0 * k_hump, 1e-10 * (1 + std::abs(cert.k_at_phi)));

  cert.j_at_phi = ray_full.value(1.0, term);
  if (!(cert.j_at_phi < 0))
    cert.failures.push_back("full level at the bump is not negative");
  double j_seg = 0;
  for (int i = 1; i <= samples; ++i) {
    double tau = double(i) / samples;
    j_seg = std::max(j_seg, ray_full.value(tau, term));
  }
  cert.j_segment_max = j_seg;
  if (!(j_seg < cert.s_level))
    cert.failures.push_back("segment level reaches the barrier");

  std::mt19937_64 rng(seed);
  std::vector<RadialProfile> dirs = sphere_directions(grid, phi, rng);
  std::vector<RayDecomposition> rays;
  for (const auto& dir : dirs) rays.push_back(ray_decomposition(dir, full));
  cert.radius = 0;
  for (double rc = 2; rc <= double(1 << 20); rc *= 2) {
    double low = std::numeric_limits<double>::infinity();
    for (const auto& ray : rays) low = std::min(low, ray.value(rc, term));
    if (low >= 2 * cert.s_level) {
      cert.radius = rc;
      cert.sphere_min = low;
      break;
    }
  }
  if (cert.radius == 0)
    cert.failures.push_back("no sampled sphere radius separates the barrier");

  double t_far = std::max(2.0 * cert.radius, 2.0);
  while (ray_full.value(t_far, term) >= 0 && t_far < 1e9) t_far *= 2;
  cert.t_far = t_far;
  cert.j_at_far = ray_full.value(t_far, term);
  if (!(cert.j_at_far < 0))
    cert.failures.push_back("no far endpoint with negative level");
  cert.holds = cert.failures.empty();

  DescentConfig down;
  down.ball_radius = cert.radius > 0 ? cert.radius : 0;
  down.tolerance = 1e-11;
  result.inner_min = minimize_j_plus(term, full, grid, phi, down);
  result.inner_min.log.push_back("search confined to the certificate ball");

  PathConfig low_path;
  low_path.nodes = 32;
  low_path.tolerance = 1e-11;
  result.low_pass = mountain_pass(term, full, grid, phi, low_path);

  PathConfig high_path;
  high_path.nodes = 36;
  high_path.tolerance = 1e-9;
  high_path.ball_radius = 2.0 * t_far;
  result.high_pass =
      mountain_pass(term, full, grid, scaled_profile(phi, t_far), high_path);

  double ab =
      sobolev_norm(diff_profile(result.inner_min.profile,
                                result.low_pass.profile));
  double ac = sobolev_norm(diff_profile(result.inner_min.profile,
                                        result.high_pass.profile));
  double bc = sobolev_norm(diff_profile(result.low_pass.profile,
                                        result.high_pass.profile));
  result.min_pairwise_distance = std::min({ab, ac, bc});
  return result;
}

MinPowerResult min_power_scenario(double r1, double r2, double q, double vpi,
                                  double lambda, GridPtr grid,
                                  unsigned long long seed) {
  if (!grid) throw std::invalid_argument("grid is required");
  const DomainSpec& domain = grid->domain;
  if (domain.kind != DomainKind::Ball || domain.p != 2.0)
    throw std::invalid_argument("scenario requires a ball domain with p = 2");
  if (!(r2 < r1))
    throw std::invalid_argument("exponents must satisfy r2 < r1");
  if (!(1 < q && q < vpi))
    throw std::invalid_argument("exponents must satisfy 1 < q < vpi");
  KirchhoffTerm term = KirchhoffTerm::min_power(2.0, r1, r2);
  Nonlinearity nonlin = Nonlinearity::model(q, vpi, lambda, true);
  double pstar = critical_exponent(domain);

  MinPowerResult result;
  result.high_first_exponent = r1 > pstar;
  RadialProfile phi = normalized_bump(grid);
  std::mt19937_64 rng(seed);
  std::vector<RadialProfile> dirs = sphere_directions(grid, phi, rng);

  // Concentration family for the unit-norm ball, where the Kirchhoff
  // primitive still follows the first exponent. Polynomial bells cover the
  // domain-scale regime and truncated bubbles the concentrated one.
  std::vector<RadialProfile> witnesses;
  const double radius = domain.radius;
  for (double h : {1.0, 0.6, 0.35}) {
    for (int k : {1, 2}) {
      const double width = h * radius;
      witnesses.push_back(profile_from_function(
          grid,
          [width, k](double rho) {
            double z = 1.0 - (rho / width) * (rho / width);
            return z > 0 ? std::pow(z, k) : 0.0;
          },
          true));
    }
  }
  if (domain.dimension > 2)
    for (double eps : {0.02, 0.06, 0.18})
      witnesses.push_back(truncated_instanton(grid, domain.dimension, 2.0,
                                              eps * radius, 1.5 / radius));

  double floor = std::numeric_limits<double>::infinity();
  for (const auto& dir : dirs)
    floor = std::min(floor, ray_decomposition(dir, nonlin).value(1.0, term));
  double best_level = std::numeric_limits<double>::infinity();
  RadialProfile best_seed;
  for (const auto& w : witnesses) {
    double wn = sobolev_norm(w);
    if (!(wn > 0) || !std::isfinite(wn)) continue;
    RayDecomposition ray = ray_decomposition(w, nonlin);
    floor = std::min(floor, ray.value(1.0 / wn, term));
    for (int i = 0; i <= 140; ++i) {
      double target = 0.03 * std::pow(0.999 / 0.03, i / 140.0);
      double level = ray.value(target / wn, term);
      if (level < best_level) {
        best_level = level;
        best_seed = scaled_profile(w, target / wn);
      }
    }
  }
  result.sphere_floor = floor;
  if (!(floor > 0))
    result.notes.push_back("sampled sphere floor is not positive");

  RayDecomposition ray_phi = ray_decomposition(phi, nonlin);
  double t_far = 2;
  while (ray_phi.value(t_far, term) >= 0 && t_far < 1e9) t_far *= 2;
  result.notes.push_back("far endpoint multiplier " + fmt(t_far));

  PathConfig path;
  path.nodes = 28;
  path.tolerance = 1e-10;
  path.ball_radius = 4.0 * t_far;
  result.pass =
      mountain_pass(term, nonlin, grid, scaled_profile(phi, t_far), path);

  // The most negative scaled member seeds the descent. A seed below zero
  // stays interior when the sphere floor is positive, since the descent
  // never raises the level.
  if (best_level < 0)
    result.notes.push_back("concentration witness at level " +
                           fmt(best_level) + ", norm " +
                           fmt(sobolev_norm(best_seed)));
  else
    result.notes.push_back(
        "no negative concentration witness inside the unit ball, best level " +
        fmt(best_level));
  DescentConfig probe;
  probe.ball_radius = 1.0;
  probe.tolerance = 1e-12;
  probe.max_iterations = 8000;
  SolveReport inner = minimize_j_plus(term, nonlin, grid, best_seed, probe);
  if (inner.j_plus_value < -1e-9 && inner.norm_w > 1e-3 &&
      inner.norm_w < 1.0) {
    result.inner_min = std::move(inner);
  } else {
    result.notes.push_back(
        "concentration seeded descent collapsed toward the origin (level " +
        fmt(inner.j_plus_value) + ", norm " + fmt(inner.norm_w) + ")");
  }
  return result;
}

}  // namespace kirchhoff
