#include <kirchhoff/shooting.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace kirchhoff {

namespace {

double sign_of(double x) { return (x > 0) - (x < 0); }

struct HermiteSpan {
  double a = 0, b = 0;
  double ua = 0, ub = 0, da = 0, db = 0;

  double value(double r) const {
    double h = b - a;
    double t = (r - a) / h;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ua + (t3 - 2 * t2 + t) * h * da +
           (-2 * t3 + 3 * t2) * ub + (t3 - t2) * h * db;
  }

  double derivative(double r) const {
    double h = b - a;
    double t = (r - a) / h;
    double t2 = t * t;
    return ((6 * t2 - 6 * t) * ua + (3 * t2 - 4 * t + 1) * h * da +
            (-6 * t2 + 6 * t) * ub + (3 * t2 - 2 * t) * h * db) /
           h;
  }
};

// Bisection for g(root) = 0 on [a, b] with g(a) g(b) <= 0.
template <typename G>
double bisect(G&& g, double a, double b) {
  double ga = g(a);
  if (ga == 0) return a;
  for (int it = 0; it < 120 && b - a > 1e-16 * (std::abs(a) + std::abs(b)); ++it) {
    double mid = 0.5 * (a + b);
    double gm = g(mid);
    if (gm == 0) return mid;
    if ((ga > 0) == (gm > 0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

struct State {
  double u = 0, w = 0;
};

}  // namespace

double ShootingResult::value_at(double r) const {
  if (rho.empty()) throw std::runtime_error("empty trajectory");
  if (r <= rho.front()) {
    return start_value -
           series_coeff * std::pow(std::max(r, 0.0), series_power) / series_power;
  }
  if (r > rho.back() * (1 + 1e-12) && r > rho.back() + 1e-300)
    throw std::runtime_error("evaluation beyond the computed trajectory");
  std::size_t hi =
      std::upper_bound(rho.begin(), rho.end(), r) - rho.begin();
  if (hi >= rho.size()) hi = rho.size() - 1;
  std::size_t lo = hi - 1;
  HermiteSpan span{rho[lo], rho[hi], u[lo], u[hi], du[lo], du[hi]};
  return span.value(std::min(r, rho.back()));
}

double ShootingResult::derivative_at(double r) const {
  if (rho.empty()) throw std::runtime_error("empty trajectory");
  if (r <= rho.front()) {
    if (r <= 0) return 0.0;
    return -series_coeff * std::pow(r, series_power - 1);
  }
  if (r > rho.back() * (1 + 1e-12) && r > rho.back() + 1e-300)
    throw std::runtime_error("evaluation beyond the computed trajectory");
  std::size_t hi =
      std::upper_bound(rho.begin(), rho.end(), r) - rho.begin();
  if (hi >= rho.size()) hi = rho.size() - 1;
  std::size_t lo = hi - 1;
  HermiteSpan span{rho[lo], rho[hi], u[lo], u[hi], du[lo], du[hi]};
  return span.derivative(std::min(r, rho.back()));
}

ShootingResult shoot_radial(const std::function<double(double)>& force,
                            double center_value, const ShootingOptions& opt) {
  if (!force) throw std::invalid_argument("force term is required");
  if (opt.dimension < 1) throw std::invalid_argument("dimension must be at least 1");
  if (!(opt.p > 1)) throw std::invalid_argument("p must exceed 1");
  if (!(opt.max_radius > 0)) throw std::invalid_argument("max radius must be positive");
  if (!(opt.rel_tol > 0) || !(opt.abs_tol > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(opt.start_radius > 0) || opt.start_radius >= 0.5 * opt.max_radius)
    throw std::invalid_argument("start radius must be positive and small");
  if (opt.delta_stop < 0) throw std::invalid_argument("floor level must be nonnegative");
  if (opt.max_step < 0) throw std::invalid_argument("step ceiling must be nonnegative");

  const double p = opt.p;
  const double pe = 1.0 / (p - 1.0);
  const double pprime = p / (p - 1.0);
  const int N = opt.dimension;
  const double fd = force(center_value);
  if (!std::isfinite(fd)) throw std::runtime_error("force term is not finite at the center value");

  ShootingResult res;
  res.start_value = center_value;
  res.dimension = N;
  res.p = p;
  res.series_power = pprime;
  res.series_coeff = sign_of(fd) * std::pow(std::abs(fd) / N, pe);

  auto rhs = [&](double r, const State& y) {
    State dy;
    double geo = std::pow(r, N - 1);
    if (y.w == 0)
      dy.u = 0;
    else
      dy.u = sign_of(y.w) * std::pow(std::abs(y.w) / geo, pe);
    double f = force(y.u);
    if (!std::isfinite(f)) throw std::runtime_error("force term is not finite along the trajectory");
    dy.w = -geo * f;
    return dy;
  };

  // Series launch: with f frozen at the center value the flux integral is
  // exact, w = -rho^N f(d) / N.
  double r0 = opt.start_radius;
  State y;
  y.u = center_value - res.series_coeff * std::pow(r0, pprime) / pprime;
  y.w = -std::pow(r0, N) * fd / N;

  auto push = [&](double r, const State& s) {
    double geo = std::pow(r, N - 1);
    double d = (s.w == 0) ? 0.0 : sign_of(s.w) * std::pow(std::abs(s.w) / geo, pe);
    res.rho.push_back(r);
    res.u.push_back(s.u);
    res.du.push_back(d);
  };
  push(r0, y);

  double energy_prev = 0.0;
  bool track_energy = static_cast<bool>(opt.potential);
  auto energy = [&](double uu, double dd) {
    return (1.0 - 1.0 / p) * std::pow(std::abs(dd), p) + opt.potential(uu);
  };
  if (track_energy) energy_prev = energy(res.u.back(), res.du.back());

  // Dormand-Prince 5(4) pair.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                      e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                      e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  double h_cap = opt.max_step > 0 ? opt.max_step
                                  : std::min(0.02, opt.max_radius / 600.0);
  double r = r0;
  double h = std::min(1e-3, h_cap);
  const bool track_floor = opt.delta_stop > 0 && std::abs(center_value) > opt.delta_stop;
  bool done = false;
  std::size_t steps = 0;

  while (!done) {
    if (++steps > 2000000) throw std::runtime_error("step limit exceeded in the radial integration");
    bool last = false;
    if (r + h >= opt.max_radius) {
      h = opt.max_radius - r;
      last = true;
    }
    if (h < 1e-14 * std::max(1.0, r))
      throw std::runtime_error("integration step collapsed");

    State k1 = rhs(r, y);
    State k2 = rhs(r + c2 * h, {y.u + h * a21 * k1.u, y.w + h * a21 * k1.w});
    State k3 = rhs(r + c3 * h, {y.u + h * (a31 * k1.u + a32 * k2.u),
                                y.w + h * (a31 * k1.w + a32 * k2.w)});
    State k4 = rhs(r + c4 * h,
                   {y.u + h * (a41 * k1.u + a42 * k2.u + a43 * k3.u),
                    y.w + h * (a41 * k1.w + a42 * k2.w + a43 * k3.w)});
    State k5 = rhs(r + c5 * h,
                   {y.u + h * (a51 * k1.u + a52 * k2.u + a53 * k3.u + a54 * k4.u),
                    y.w + h * (a51 * k1.w + a52 * k2.w + a53 * k3.w + a54 * k4.w)});
    State k6 = rhs(r + h, {y.u + h * (a61 * k1.u + a62 * k2.u + a63 * k3.u +
                                      a64 * k4.u + a65 * k5.u),
                           y.w + h * (a61 * k1.w + a62 * k2.w + a63 * k3.w +
                                      a64 * k4.w + a65 * k5.w)});
    State ynew{y.u + h * (b1 * k1.u + b3 * k3.u + b4 * k4.u + b5 * k5.u + b6 * k6.u),
               y.w + h * (b1 * k1.w + b3 * k3.w + b4 * k4.w + b5 * k5.w + b6 * k6.w)};
    State k7 = rhs(r + h, ynew);

    double err_u = h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u +
                        e6 * k6.u + e7 * k7.u);
    double err_w = h * (e1 * k1.w + e3 * k3.w + e4 * k4.w + e5 * k5.w +
                        e6 * k6.w + e7 * k7.w);
    double sc_u = opt.abs_tol + opt.rel_tol * std::max(std::abs(y.u), std::abs(ynew.u));
    double sc_w = opt.abs_tol + opt.rel_tol * std::max(std::abs(y.w), std::abs(ynew.w));
    double err = std::sqrt(0.5 * ((err_u / sc_u) * (err_u / sc_u) +
                                  (err_w / sc_w) * (err_w / sc_w)));

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    double rnew = r + h;
    double geo = std::pow(rnew, N - 1);
    double dnew = (ynew.w == 0) ? 0.0
                                : sign_of(ynew.w) * std::pow(std::abs(ynew.w) / geo, pe);
    HermiteSpan span{r, rnew, y.u, ynew.u, res.du.back(), dnew};

    // Event scan over the accepted step, earliest stopping event wins.
    double stop_at = -1.0;
    enum { None, Zero, Floor, Turn } stop_kind = None;

    double u_old = y.u;
    if (u_old * ynew.u < 0 || (ynew.u == 0 && u_old != 0)) {
      double z = (ynew.u == 0)
                     ? rnew
                     : bisect([&](double x) { return span.value(x); }, r, rnew);
      res.zeros.push_back(z);
      if (!res.crossed_zero) {
        res.crossed_zero = true;
        res.first_zero = z;
      }
      if (opt.stop_at_zero) {
        stop_at = z;
        stop_kind = Zero;
      }
    }
    if (track_floor) {
      double ga = std::abs(u_old) - opt.delta_stop;
      double gb = std::abs(ynew.u) - opt.delta_stop;
      if (ga > 0 && gb <= 0) {
        double z = bisect(
            [&](double x) { return std::abs(span.value(x)) - opt.delta_stop; }, r,
            rnew);
        if (stop_kind == None || z < stop_at) {
          stop_at = z;
          stop_kind = Floor;
        }
      }
    }
    {
      double da = res.du.back();
      if (da * dnew < 0 || (dnew == 0 && da != 0 && !last)) {
        double z = bisect([&](double x) { return span.derivative(x); }, r, rnew);
        res.turns.push_back(z);
        if (opt.stop_at_turn && (stop_kind == None || z < stop_at)) {
          stop_at = z;
          stop_kind = Turn;
        }
      }
    }

    if (stop_kind != None) {
      double uz = span.value(stop_at);
      double dz = span.derivative(stop_at);
      if (stop_kind == Zero) uz = 0.0;
      res.rho.push_back(stop_at);
      res.u.push_back(uz);
      res.du.push_back(dz);
      if (stop_kind == Floor) {
        res.hit_floor = true;
        res.floor_rho = stop_at;
      }
      res.end_rho = stop_at;
      done = true;
    } else {
      r = rnew;
      y = ynew;
      push(rnew, ynew);
      if (last) {
        res.end_rho = rnew;
        done = true;
      }
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
      h = std::min(h, h_cap);
    }

    if (track_energy) {
      double e_now = energy(res.u.back(), res.du.back());
      res.energy_drift = std::max(res.energy_drift, e_now - energy_prev);
      energy_prev = e_now;
    }
  }

  return res;
}

double reference_energy(const ShootingResult& ref, const DomainSpec& domain,
                        double y_end) {
  if (ref.rho.size() < 2) throw std::invalid_argument("trajectory has no extent");
  if (!(y_end > 0)) throw std::invalid_argument("integration end must be positive");
  if (y_end > ref.rho.back() * (1 + 1e-9))
    throw std::invalid_argument("integration end exceeds the computed trajectory");
  y_end = std::min(y_end, ref.rho.back());

  std::vector<double> gx, gw;
  gauss_legendre(4, gx, gw);
  const double p = domain.p;
  const int N = domain.dimension;

  double total = 0.0;
  // Series segment below the first sample.
  {
    double b = std::min(ref.rho.front(), y_end);
    for (std::size_t k = 0; k < gx.size(); ++k) {
      double x = 0.5 * b * (1 + gx[k]);
      double d = ref.derivative_at(x);
      total += 0.5 * b * gw[k] * std::pow(std::abs(d), p) * std::pow(x, N - 1);
    }
  }
  for (std::size_t i = 0; i + 1 < ref.rho.size(); ++i) {
    double a = ref.rho[i];
    double b = std::min(ref.rho[i + 1], y_end);
    if (b <= a) break;
    HermiteSpan span{ref.rho[i], ref.rho[i + 1], ref.u[i], ref.u[i + 1],
                     ref.du[i], ref.du[i + 1]};
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t k = 0; k < gx.size(); ++k) {
      double x = mid + half * gx[k];
      double d = span.derivative(x);
      total += half * gw[k] * std::pow(std::abs(d), p) * std::pow(x, N - 1);
    }
  }
  return domain.surface_factor * total;
}

RadialProfile rescaled_profile(GridPtr grid, const ShootingResult& ref,
                               double gamma) {
  if (!grid) throw std::invalid_argument("grid is required");
  if (!(gamma > 0)) throw std::invalid_argument("rescaling factor must be positive");
  const double p = grid->domain.p;
  const double scale = std::pow(gamma, 1.0 / p);
  const double radius = grid->domain.radius;
  if (scale * radius > ref.rho.back() * (1 + 1e-9))
    throw std::invalid_argument("rescaling exceeds the computed trajectory");

  RadialProfile prof;
  prof.grid = grid;
  prof.values.resize(grid->nodes.size());
  prof.derivs.resize(grid->nodes.size());
  prof.has_derivs = true;
  double sup = 0.0;
  for (std::size_t i = 0; i < grid->nodes.size(); ++i) {
    double y = std::min(scale * grid->nodes[i], ref.rho.back());
    prof.values[i] = ref.value_at(y);
    prof.derivs[i] = scale * ref.derivative_at(y);
    sup = std::max(sup, std::abs(prof.values[i]));
  }
  double boundary = std::abs(prof.values.back());
  prof.dirichlet = boundary <= 1e-6 * std::max(sup, 1e-300);
  return prof;
}

}  // namespace kirchhoff
