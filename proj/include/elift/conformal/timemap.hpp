#ifndef ELIFT_CONFORMAL_TIMEMAP_HPP
#define ELIFT_CONFORMAL_TIMEMAP_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace elift::conformal {

enum class MapKind { FRACTIONAL_LINEAR, GENERAL };

// Smooth time reparameterization t_* = f(t) carrying its first three
// derivatives: the Schwarzian needs f''', the velocity law needs f''.
// FRACTIONAL_LINEAR maps keep their matrix so inversion and composition
// stay exact; GENERAL maps hold user-supplied derivative callables or,
// failing that, nested central differences (flagged lower-accuracy).
struct TimeMap {
  MapKind kind = MapKind::GENERAL;
  std::function<double(double)> f, df, d2f, d3f;
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  bool analytic_derivatives = true;
  double A = 1, B = 0, C = 0, D = 1;  // meaningful for FRACTIONAL_LINEAR only
};

// Bundle of f and its derivatives at one time, with the f' != 0 gate that
// every downstream formula divides by.
struct MapJet {
  double f = 0, fp = 0, fpp = 0, fppp = 0;
};

inline MapJet map_jet(const TimeMap& m, double t) {
  MapJet j;
  j.f = m.f(t);
  j.fp = m.df(t);
  if (j.fp == 0.0 || !std::isfinite(j.fp))
    throw std::domain_error("time map is singular: f'(t) = 0");
  j.fpp = m.d2f(t);
  j.fppp = m.d3f(t);
  return j;
}

inline TimeMap fractional_linear(double A, double B, double C, double D) {
  const double w = A * D - B * C;
  if (w == 0.0)
    throw std::invalid_argument("fractional_linear: AD - BC must be nonzero");
  TimeMap m;
  m.kind = MapKind::FRACTIONAL_LINEAR;
  m.A = A; m.B = B; m.C = C; m.D = D;
  m.f = [A, B, C, D](double t) { return (A * t + B) / (C * t + D); };
  m.df = [C, D, w](double t) {
    const double den = C * t + D;
    return w / (den * den);
  };
  m.d2f = [C, D, w](double t) {
    const double den = C * t + D;
    return -2.0 * C * w / (den * den * den);
  };
  m.d3f = [C, D, w](double t) {
    const double den = C * t + D;
    return 6.0 * C * C * w / (den * den * den * den);
  };
  return m;
}

inline TimeMap identity_map() { return fractional_linear(1, 0, 0, 1); }

// t_* = 1/(omega^2 t); the map behind the stationary-field correspondence.
inline TimeMap lynden_bell_map(double omega) {
  return fractional_linear(0.0, 1.0, omega * omega, 0.0);
}

// General map from explicit derivative callables.
inline TimeMap general_map(std::function<double(double)> f,
                           std::function<double(double)> df,
                           std::function<double(double)> d2f,
                           std::function<double(double)> d3f,
                           double t_lo = -std::numeric_limits<double>::infinity(),
                           double t_hi = std::numeric_limits<double>::infinity()) {
  TimeMap m;
  m.f = std::move(f);
  m.df = std::move(df);
  m.d2f = std::move(d2f);
  m.d3f = std::move(d3f);
  m.t_lo = t_lo;
  m.t_hi = t_hi;
  return m;
}

// General map from f alone; derivatives by nested central differences.
// Third differences amplify roundoff, so results carry ~1e-6 accuracy and
// the map is flagged non-analytic.
inline TimeMap general_map_numeric(std::function<double(double)> f,
                                   double t_lo, double t_hi,
                                   double step = 1e-3) {
  TimeMap m;
  m.f = f;
  m.df = [f, step](double t) {
    return (f(t + step) - f(t - step)) / (2.0 * step);
  };
  m.d2f = [f, step](double t) {
    return (f(t + step) - 2.0 * f(t) + f(t - step)) / (step * step);
  };
  m.d3f = [f, step](double t) {
    return (f(t + 2 * step) - 2.0 * f(t + step) + 2.0 * f(t - step) -
            f(t - 2 * step)) /
           (2.0 * step * step * step);
  };
  m.t_lo = t_lo;
  m.t_hi = t_hi;
  m.analytic_derivatives = false;
  return m;
}

// {f, t} = f'''/f' - 3/2 (f''/f')^2; zero exactly on fractional linear maps.
inline double schwarzian(const TimeMap& m, double t) {
  const MapJet j = map_jet(m, t);
  const double r = j.fpp / j.fp;
  return j.fppp / j.fp - 1.5 * r * r;
}

// Exact inverse for fractional linear maps; Newton seeded by bisection on
// the declared interval otherwise.
inline TimeMap inverse_map(const TimeMap& m) {
  if (m.kind == MapKind::FRACTIONAL_LINEAR)
    return fractional_linear(m.D, -m.B, -m.C, m.A);
  if (!std::isfinite(m.t_lo) || !std::isfinite(m.t_hi))
    throw std::invalid_argument(
        "inverse_map: a general map needs a finite declared interval");
  auto fwd = m.f;
  auto dfwd = m.df;
  const double lo = m.t_lo, hi = m.t_hi;
  auto solve = [fwd, dfwd, lo, hi](double s) {
    double a = lo, b = hi;
    double fa = fwd(a) - s, fb = fwd(b) - s;
    if (fa * fb > 0.0)
      throw std::domain_error("inverse_map: value outside the mapped interval");
    for (int k = 0; k < 60; ++k) {
      double mid = 0.5 * (a + b);
      double fm = fwd(mid) - s;
      if (fa * fm <= 0.0) { b = mid; fb = fm; }
      else { a = mid; fa = fm; }
    }
    double t = 0.5 * (a + b);
    for (int k = 0; k < 8; ++k) t -= (fwd(t) - s) / dfwd(t);
    return t;
  };
  TimeMap inv;
  inv.f = solve;
  inv.df = [solve, dfwd](double s) { return 1.0 / dfwd(solve(s)); };
  inv.d2f = [solve, dfwd, m](double s) {
    const double t = solve(s);
    const double fp = dfwd(t);
    return -m.d2f(t) / (fp * fp * fp);
  };
  inv.d3f = [solve, dfwd, m](double s) {
    const double t = solve(s);
    const double fp = dfwd(t), fpp = m.d2f(t), fppp = m.d3f(t);
    return (3.0 * fpp * fpp - fp * fppp) / std::pow(fp, 5);
  };
  inv.analytic_derivatives = m.analytic_derivatives;
  return inv;
}

// g followed by f: t -> f(g(t)). Fractional linear maps compose through
// their matrices and stay exact; otherwise chain rule on the derivatives.
inline TimeMap compose(const TimeMap& f, const TimeMap& g) {
  if (f.kind == MapKind::FRACTIONAL_LINEAR &&
      g.kind == MapKind::FRACTIONAL_LINEAR)
    return fractional_linear(f.A * g.A + f.B * g.C, f.A * g.B + f.B * g.D,
                             f.C * g.A + f.D * g.C, f.C * g.B + f.D * g.D);
  TimeMap m;
  m.f = [f, g](double t) { return f.f(g.f(t)); };
  m.df = [f, g](double t) { return f.df(g.f(t)) * g.df(t); };
  m.d2f = [f, g](double t) {
    const double gp = g.df(t);
    return f.d2f(g.f(t)) * gp * gp + f.df(g.f(t)) * g.d2f(t);
  };
  m.d3f = [f, g](double t) {
    const double s = g.f(t), gp = g.df(t), gpp = g.d2f(t);
    return f.d3f(s) * gp * gp * gp + 3.0 * f.d2f(s) * gp * gpp +
           f.df(s) * g.d3f(t);
  };
  m.t_lo = g.t_lo;
  m.t_hi = g.t_hi;
  m.analytic_derivatives = f.analytic_derivatives && g.analytic_derivatives;
  return m;
}

// One Newtonian state on either side of the correspondence.
struct MapState {
  double t = 0.0;
  Eigen::VectorXd x, v;  // position and dx/dt
};

// t_* = f(t), x_* = sqrt|f'| x, and the velocity picks up the drag term
//   dx_*/dt_* = sgn(f')/sqrt|f'| dx/dt + 1/2 f''/|f'|^{3/2} x.
inline MapState transform_state(const TimeMap& m, const MapState& st) {
  const MapJet j = map_jet(m, st.t);
  const double s = std::sqrt(std::abs(j.fp));
  const double sgn = j.fp > 0 ? 1.0 : -1.0;
  MapState out;
  out.t = j.f;
  out.x = s * st.x;
  out.v = (sgn / s) * st.v + (0.5 * j.fpp / (s * s * s)) * st.x;
  return out;
}

} // namespace elift::conformal

#endif
