#ifndef ELIFT_CONFORMAL_VLB_HPP
#define ELIFT_CONFORMAL_VLB_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace elift::conformal {

// Parameters of the conformal map that trades a time-dependent coupling
// G(u_*) |Omega(u_*)| = G0 for the static one: x_* = Omega(u) x with
// Omega = a/(u+b), u_* = -a^2/(u+b) + c, v_* = v + x^2/(2(u+b)) + d.
struct VlbParams {
  double a = 1.0, b = 0.0, c = 0.0, d = 0.0;
};

struct VlbState {
  Eigen::VectorXd x;
  double u = 0.0, v = 0.0;
};

inline double vlb_omega(const VlbParams& P, double u) {
  if (u + P.b == 0.0)
    throw std::domain_error("vlb: u = -b is the map's pole");
  return P.a / (u + P.b);
}

// Omega reexpressed in the image time; the two agree along the map.
inline double vlb_omega_star(const VlbParams& P, double u_star) {
  return -(u_star - P.c) / P.a;
}

inline VlbState vlb_transform(const VlbParams& P, const VlbState& st) {
  if (P.a == 0.0)
    throw std::invalid_argument("vlb_transform: a must be nonzero");
  const double den = st.u + P.b;
  if (den == 0.0)
    throw std::domain_error("vlb_transform: u = -b is the map's pole");
  VlbState out;
  out.x = (P.a / den) * st.x;
  out.u = -P.a * P.a / den + P.c;
  out.v = st.v + st.x.squaredNorm() / (2.0 * den) + P.d;
  return out;
}

// The coupling law that makes the correspondence exact.
inline double vlb_g_law(double G0, const VlbParams& P, double u_star) {
  const double om = vlb_omega_star(P, u_star);
  if (om == 0.0)
    throw std::domain_error("vlb_g_law: Omega vanishes at this time");
  return G0 / std::abs(om);
}

// Runge-Lenz vector exported to the decaying-coupling Kepler problem,
//   A = Omega (x x x') x x' + (1/a) (x x x') x x - Omega V x
// with x' the velocity in the image time and V = -G(u_*) M / |x|.
// A.W is conserved for every constant W.
inline Eigen::Vector3d time_dependent_rl(const VlbParams& P, double G0M,
                                         double u_star,
                                         const Eigen::Vector3d& x_star,
                                         const Eigen::Vector3d& v_star) {
  const double om = vlb_omega_star(P, u_star);
  const double r = x_star.norm();
  if (r == 0.0)
    throw std::domain_error("time_dependent_rl: x = 0");
  const double V = -(G0M / std::abs(om)) / r;
  const Eigen::Vector3d L = x_star.cross(v_star);
  return om * L.cross(v_star) + (1.0 / P.a) * L.cross(x_star) -
         om * V * x_star;
}

} // namespace elift::conformal

#endif
