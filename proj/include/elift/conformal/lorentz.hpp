#ifndef ELIFT_CONFORMAL_LORENTZ_HPP
#define ELIFT_CONFORMAL_LORENTZ_HPP

#include <cmath>
#include <stdexcept>

#include "../core/field.hpp"
#include "../dynamics/integrate.hpp"
#include "timemap.hpp"

namespace elift::conformal {

// Electric and magnetic fields carried as raw vector fields of (t, x).
// A mapped pair generally violates Faraday's law, so it cannot be folded
// into a gauge potential; the Lorentz dynamics below work on values only.
struct MaxwellPair {
  JetField E, B;  // rank 1, d = 3
};

inline Eigen::Vector3d cross3(const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b) {
  return a.cross(b);
}

inline MaxwellPair zero_fields() {
  MaxwellPair p;
  p.E = make_jet_constant(1, 3, Eigen::Vector3d::Zero());
  p.B = make_jet_constant(1, 3, Eigen::Vector3d::Zero());
  return p;
}

// Pull a starred field pair back to unstarred time:
//   E(t, x) = |f'|^{3/2} E_* + 1/2 (f''/sqrt|f'|) x_* x B_*
//   B(t, x) = f' B_*
// with the starred fields read at t_* = f(t), x_* = sqrt|f'| x.
inline MaxwellPair transform_fields(const TimeMap& m, const MaxwellPair& star) {
  const JetField Es = star.E, Bs = star.B;
  MaxwellPair out;
  out.E = make_jet_numeric(1, 3, [m, Es, Bs](double t,
                                                   const Eigen::VectorXd& x) {
    const MapJet j = map_jet(m, t);
    const double s = std::sqrt(std::abs(j.fp));
    const Eigen::VectorXd xs = s * x;
    const Eigen::Vector3d e = Es.value(j.f, xs);
    const Eigen::Vector3d b = Bs.value(j.f, xs);
    return Eigen::VectorXd(s * s * s * e + 0.5 * (j.fpp / s) * cross3(xs, b));
  });
  out.B = make_jet_numeric(1, 3, [m, Bs](double t,
                                               const Eigen::VectorXd& x) {
    const MapJet j = map_jet(m, t);
    return Eigen::VectorXd(j.fp *
                           Bs.value(j.f, std::sqrt(std::abs(j.fp)) * x));
  });
  return out;
}

// Direct charged-particle flow m x'' = q (E + x' x B); state y = [x; v].
inline dynamics::Trajectory lorentz_flow(const MaxwellPair& fields,
                                         const MapState& st0,
                                         const dynamics::IntegratorConfig& cfg,
                                         double q = 1.0, double mass = 1.0) {
  if (mass <= 0.0) throw std::invalid_argument("lorentz_flow: mass must be > 0");
  const JetField E = fields.E, B = fields.B;
  dynamics::Rhs rhs = [E, B, q, mass](double t, const Eigen::VectorXd& y) {
    const Eigen::Vector3d x = y.head(3), v = y.tail(3);
    Eigen::VectorXd dy(6);
    dy.head(3) = v;
    dy.tail(3) =
        (q / mass) * (E.value(t, x) + cross3(v, B.value(t, x))).eval();
    return dy;
  };
  Eigen::VectorXd y0(6);
  y0.head(3) = st0.x;
  y0.tail(3) = st0.v;
  dynamics::Trajectory tr = integrate_rk54(rhs, st0.t, y0, cfg);
  tr.model_id = "lorentz";
  return tr;
}

// Residuals of the mapped equation of motion
//   m x'' + 1/2 {f,t} m x = q (E + x' x B)
// along a starred trajectory transformed pointwise. The starred acceleration
// is read from the starred Lorentz law (the trajectory solves it by
// hypothesis), so the report isolates the transformation identity itself.
// with_schwarzian = false ablates the linear-in-x term.
struct SolutionMapReport {
  double max_residual = 0.0;
  int n_points = 0;
};

inline SolutionMapReport verify_solution_map(const TimeMap& m,
                                             const MaxwellPair& star,
                                             const dynamics::Trajectory& traj,
                                             double q = 1.0, double mass = 1.0,
                                             bool with_schwarzian = true) {
  const TimeMap inv = inverse_map(m);
  const MaxwellPair mapped = transform_fields(m, star);
  SolutionMapReport rep;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double ts = traj.param[k];
    const Eigen::Vector3d xs = traj.y[k].head(3), vs = traj.y[k].tail(3);
    const double t = inv.f(ts);
    const MapJet j = map_jet(m, t);
    const double s = std::sqrt(std::abs(j.fp));
    const double sgn = j.fp > 0 ? 1.0 : -1.0;

    const Eigen::Vector3d as =
        (q / mass) *
        (star.E.value(ts, xs) + cross3(vs, star.B.value(ts, xs))).eval();

    // x = x_*/s and two t-derivatives of it, with dx_*/dt = f' v_*
    const double sd = sgn * j.fpp / (2.0 * s);              // ds/dt
    const Eigen::Vector3d x = xs / s;
    const Eigen::Vector3d xsd = j.fp * vs;                  // dx_*/dt
    const Eigen::Vector3d xsdd =
        j.fpp * vs + j.fp * j.fp * as;                      // d2x_*/dt2
    const double sdd =
        sgn * (j.fppp / (2.0 * s) - j.fpp * j.fpp / (4.0 * s * s * s) * sgn);
    const Eigen::Vector3d v = xsd / s - xs * sd / (s * s);
    const Eigen::Vector3d a = xsdd / s - 2.0 * xsd * sd / (s * s) -
                              xs * sdd / (s * s) +
                              2.0 * xs * sd * sd / (s * s * s);

    Eigen::Vector3d lhs = mass * a;
    if (with_schwarzian) {
      const double r = j.fpp / j.fp;
      const double sch = j.fppp / j.fp - 1.5 * r * r;
      lhs += 0.5 * sch * mass * x;
    }
    const Eigen::Vector3d rhs =
        q * (mapped.E.value(t, x) + cross3(v, mapped.B.value(t, x))).eval();
    rep.max_residual = std::max(rep.max_residual, (lhs - rhs).cwiseAbs().maxCoeff());
    ++rep.n_points;
  }
  return rep;
}

// Drift of (x_* - 2 |f'|^2/f'' dx_*/dt_*)^2 along a starred trajectory.
// Conserved when {f,t} = 0, f'' != 0 and the mapped electric field vanishes;
// the specific reciprocal map turns it into (x_* - v_* t_*)^2.
struct BoostSquare {
  double first = 0.0;
  double max_drift = 0.0;
};

inline BoostSquare boost_square_invariant(const TimeMap& m,
                                          const dynamics::Trajectory& traj) {
  const TimeMap inv = inverse_map(m);
  BoostSquare out;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = inv.f(traj.param[k]);
    const MapJet j = map_jet(m, t);
    if (std::abs(j.fpp) < 1e-14)
      throw std::domain_error(
          "boost_square_invariant: f'' = 0 reduces to the plain boost case");
    const Eigen::Vector3d xs = traj.y[k].head(3), vs = traj.y[k].tail(3);
    const Eigen::Vector3d w = xs - 2.0 * (j.fp * j.fp / j.fpp) * vs;
    const double val = w.squaredNorm();
    if (k == 0) out.first = val;
    out.max_drift = std::max(out.max_drift, std::abs(val - out.first));
  }
  return out;
}

} // namespace elift::conformal

#endif
