#ifndef ELIFT_CONFORMAL_BARGMANN_HPP
#define ELIFT_CONFORMAL_BARGMANN_HPP

#include <random>
#include <vector>

#include "../lift/natural_system.hpp"
#include "timemap.hpp"

namespace elift::conformal {

struct BargmannPoint {
  Eigen::VectorXd x;
  double u = 0.0, v = 0.0;
};

namespace detail {

// Brinkmann metric components in coordinate order (x^1..x^d, u, v),
// assembled from the system's (h, N, Phi) read at t = -u/q, with Phi and N
// supplied explicitly so both sides of the conformal identity share code.
inline Eigen::MatrixXd brinkmann_matrix(const Eigen::MatrixXd& h,
                                        const Eigen::VectorXd& N,
                                        double Phi) {
  const int d = static_cast<int>(N.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d + 2, d + 2);
  g.topLeftCorner(d, d) = h;
  g(d, d + 1) = g(d + 1, d) = 1.0;
  g(d, d) = -2.0 * Phi;
  g.block(d, 0, 1, d) = N.transpose();
  g.block(0, d, d, 1) = N;
  return g;
}

} // namespace detail

// Pull the starred Brinkmann metric back through
//   x_* = sqrt|f'| x,  u_* = -q f(-u/q),  v_* = sgn(f')(v + (f''/f') x.h.x/4q)
// with the starred fields read at (t_*, x_*) and the unstarred pair defined
// by q Phi = q|f'| Phi_* + (f''/2|f'|) x_*.N_*, N = sgn(f') sqrt|f'| N_*.
// Returns the worst component deviation from |f'| times the unstarred
// metric. The identity needs a spatially constant h (every catalogued use
// is flat), which is why h enters both sides at face value.
inline double verify_bargmann_conformal(const TimeMap& m,
                                        const lift::NaturalSystem& sys,
                                        const std::vector<BargmannPoint>& pts) {
  const int d = sys.d();
  const double q = sys.q;
  double worst = 0.0;
  for (const BargmannPoint& pt : pts) {
    const double t = -pt.u / q;
    const MapJet j = map_jet(m, t);
    const double s = std::sqrt(std::abs(j.fp));
    const double sgn = j.fp > 0 ? 1.0 : -1.0;
    const double ts = j.f;
    const Eigen::VectorXd xs = s * pt.x;

    const Eigen::MatrixXd h = sys.h.value_matrix(t, pt.x);
    const Eigen::MatrixXd hs = sys.h.value_matrix(ts, xs);
    const Eigen::VectorXd Ns = sys.N.value(ts, xs);
    const double Phis = sys.Phi.value(ts, xs)(0);
    const double xhx = pt.x.dot(h * pt.x);

    // starred metric at the image point
    const Eigen::MatrixXd Gs = detail::brinkmann_matrix(hs, Ns, Phis);

    // Jacobian of (x_*, u_*, v_*) with respect to (x, u, v)
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d + 2, d + 2);
    J.topLeftCorner(d, d) = s * Eigen::MatrixXd::Identity(d, d);
    J.block(0, d, d, 1) = -(sgn * j.fpp / (2.0 * q * s)) * pt.x;
    J(d, d) = j.fp;
    J.block(d + 1, 0, 1, d) =
        (sgn * j.fpp / (2.0 * q * j.fp)) * (h * pt.x).transpose();
    J(d + 1, d) = -sgn * xhx / (4.0 * q * q) *
                  (j.fppp * j.fp - j.fpp * j.fpp) / (j.fp * j.fp);
    J(d + 1, d + 1) = sgn;

    // unstarred pair from the potential transformation law
    const double Phi =
        std::abs(j.fp) * Phis + j.fpp / (2.0 * q * std::abs(j.fp)) * xs.dot(Ns);
    const Eigen::VectorXd N = sgn * s * Ns;
    const Eigen::MatrixXd G = detail::brinkmann_matrix(h, N, Phi);

    const Eigen::MatrixXd dev =
        J.transpose() * Gs * J - std::abs(j.fp) * G;
    worst = std::max(worst, dev.cwiseAbs().maxCoeff());
  }
  return worst;
}

// Convenience sampler: n points with x from the system box, t uniform in
// [t_lo, t_hi] (translated to u = -q t), v uniform in [-1, 1].
inline double verify_bargmann_conformal(const TimeMap& m,
                                        const lift::NaturalSystem& sys,
                                        int n_points, double t_lo, double t_hi,
                                        unsigned seed = 11u) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(t_lo, t_hi), uv(-1.0, 1.0);
  std::vector<BargmannPoint> pts;
  pts.reserve(n_points);
  for (int k = 0; k < n_points; ++k) {
    BargmannPoint p;
    p.x = lift::sample_point(sys.box, rng);
    p.u = -sys.q * ut(rng);
    p.v = uv(rng);
    pts.push_back(std::move(p));
  }
  return verify_bargmann_conformal(m, sys, pts);
}

} // namespace elift::conformal

#endif
