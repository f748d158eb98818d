#ifndef ELIFT_DYNAMICS_FLOWS_HPP
#define ELIFT_DYNAMICS_FLOWS_HPP

#include <cmath>

#include "../lift/brinkmann.hpp"
#include "integrate.hpp"

namespace elift::dynamics {

// Upstairs ODE state layout: (x^1..x^d, u, v, p̂_1..p̂_d, p̂_u, p̂_v).
inline Eigen::VectorXd pack_up(const lift::UpState& st) {
  const int d = st.x.size();
  Eigen::VectorXd y(2 * d + 4);
  y.head(d) = st.x;
  y(d) = st.u;
  y(d + 1) = st.v;
  y.segment(d + 2, d) = st.ph;
  y(2 * d + 2) = st.pu;
  y(2 * d + 3) = st.pv;
  return y;
}

inline lift::UpState unpack_up(const Eigen::VectorXd& y) {
  const int d = (y.size() - 4) / 2;
  lift::UpState st;
  st.x = y.head(d);
  st.u = y(d);
  st.v = y(d + 1);
  st.ph = y.segment(d + 2, d);
  st.pu = y(2 * d + 2);
  st.pv = y(2 * d + 3);
  return st;
}

// Downstairs ODE state layout: (x^1..x^d, p_1..p_d).
inline Eigen::VectorXd pack_down(const lift::DownState& st) {
  const int d = st.x.size();
  Eigen::VectorXd y(2 * d);
  y.head(d) = st.x;
  y.tail(d) = st.p;
  return y;
}

inline lift::DownState unpack_down(double t, const Eigen::VectorXd& y) {
  const int d = y.size() / 2;
  return {t, y.head(d), y.tail(d)};
}

// Canonical flow of hamiltonian_down. cfg.t_end is the final downstairs
// time; partials of H come from the field jets.
inline Trajectory flow_down(const lift::NaturalSystem& sys,
                            const lift::DownState& st0,
                            const IntegratorConfig& cfg) {
  const int d = sys.d();
  const double q = sys.q;

  Rhs rhs = [&sys, d, q](double t, const Eigen::VectorXd& y) {
    FieldJet hj = sys.h.at(t, y.head(d));
    FieldJet Nj = sys.N.at(t, y.head(d));
    FieldJet Pj = sys.Phi.at(t, y.head(d));

    Eigen::MatrixXd h(d, d);
    Eigen::VectorXd Pi(d);
    for (int i = 0; i < d; ++i) {
      Pi(i) = y(d + i) + q * Nj.vec(i).v;
      for (int j = 0; j < d; ++j) h(i, j) = hj.mat(i, j).v;
    }
    Eigen::VectorXd w = h.ldlt().solve(Pi);

    Eigen::VectorXd dy(2 * d);
    dy.head(d) = w;
    for (int i = 0; i < d; ++i) {
      double dih = 0.0, diN = 0.0;
      for (int j = 0; j < d; ++j) {
        diN += w(j) * Nj.vec(j).g(xslot(i));
        for (int k = 0; k < d; ++k)
          dih += w(j) * w(k) * hj.mat(j, k).g(xslot(i));
      }
      dy(d + i) = 0.5 * dih - q * diN - q * q * Pj.s().g(xslot(i));
    }
    return dy;
  };

  DomainFn dom = nullptr;
  if (sys.box.lo.size() == d)
    dom = [&sys, d](double, const Eigen::VectorXd& y) {
      return sys.box.contains(y.head(d));
    };

  Trajectory tr = integrate_rk54(rhs, st0.t, pack_down(st0), cfg, nullptr, dom);
  tr.integrator_id += "/down";
  return tr;
}

// Null-geodesic flow of hamiltonian_up in the affine parameter lambda
// (du = q dlambda, t = -lambda for states lifted at u0 = 0). cfg.t_end is
// the final lambda. p̂_v never acquires a nonzero increment, so the RK
// update keeps it bit-exact.
inline Trajectory flow_up(const lift::NaturalSystem& sys,
                          const lift::UpState& st0,
                          const IntegratorConfig& cfg) {
  const int d = sys.d();
  const double q = sys.q;

  if (std::abs(lift::hamiltonian_up(sys, st0)) >= cfg.abs_tol * 100)
    throw std::invalid_argument("flow_up: initial state is not null");

  Rhs rhs = [&sys, d, q](double, const Eigen::VectorXd& y) {
    const double t = -y(d) / q;  // field time from upstairs u
    const Eigen::VectorXd x = y.head(d);
    const double pv = y(2 * d + 3);

    FieldJet hj = sys.h.at(t, x);
    FieldJet Nj = sys.N.at(t, x);
    FieldJet Pj = sys.Phi.at(t, x);

    Eigen::MatrixXd h(d, d);
    Eigen::VectorXd Pih(d), N(d);
    for (int i = 0; i < d; ++i) {
      N(i) = Nj.vec(i).v;
      Pih(i) = y(d + 2 + i) - pv * N(i);
      for (int j = 0; j < d; ++j) h(i, j) = hj.mat(i, j).v;
    }
    Eigen::VectorXd w = h.ldlt().solve(Pih);

    Eigen::VectorXd dy(2 * d + 4);
    dy.head(d) = w;
    dy(d) = pv;
    dy(d + 1) = y(2 * d + 2) + 2.0 * Pj.s().v * pv - w.dot(N);
    for (int i = 0; i < d; ++i) {
      double dih = 0.0, diN = 0.0;
      for (int j = 0; j < d; ++j) {
        diN += w(j) * Nj.vec(j).g(xslot(i));
        for (int k = 0; k < d; ++k)
          dih += w(j) * w(k) * hj.mat(j, k).g(xslot(i));
      }
      dy(d + 2 + i) = 0.5 * dih + pv * diN - pv * pv * Pj.s().g(xslot(i));
    }
    // d_u of field data is -(1/q) d_t.
    double duh = 0.0, duN = 0.0;
    for (int j = 0; j < d; ++j) {
      duN += w(j) * (-(1.0 / q) * Nj.vec(j).g(tslot()));
      for (int k = 0; k < d; ++k)
        duh += w(j) * w(k) * (-(1.0 / q) * hj.mat(j, k).g(tslot()));
    }
    double duPhi = -(1.0 / q) * Pj.s().g(tslot());
    dy(2 * d + 2) = 0.5 * duh + pv * duN - pv * pv * duPhi;
    dy(2 * d + 3) = 0.0;
    return dy;
  };

  ConstraintFn cons = [&sys](double, const Eigen::VectorXd& y) {
    return lift::hamiltonian_up(sys, unpack_up(y));
  };
  DomainFn dom = nullptr;
  if (sys.box.lo.size() == d)
    dom = [&sys, d](double, const Eigen::VectorXd& y) {
      return sys.box.contains(y.head(d));
    };

  Trajectory tr =
      integrate_rk54(rhs, 0.0, pack_up(st0), cfg, cons, dom);
  tr.integrator_id += "/up";
  return tr;
}

struct EquivalenceReport {
  double max_dx = 0.0;   // max over common times of |x_up - x_down|
  double max_dp = 0.0;   // max of |p̂_i + p_i|
  double tol = 0.0;
  bool pass = false;
};

// Integrate the lifted and the downstairs flow of the same initial data
// and compare x(t) and the momentum identification on a common time grid
// (t = -lambda; dense output bridges the two step sequences).
inline EquivalenceReport project_equivalence(const lift::NaturalSystem& sys,
                                             const lift::DownState& down0,
                                             const IntegratorConfig& cfg,
                                             int n_compare = 200) {
  Trajectory down = flow_down(sys, down0, cfg);

  IntegratorConfig up_cfg = cfg;
  up_cfg.t_end = -cfg.t_end;
  Trajectory up = flow_up(sys, lift::lift_state(sys, down0), up_cfg);

  const int d = sys.d();
  EquivalenceReport rep;
  rep.tol = 100.0 * cfg.rel_tol;
  for (int k = 0; k <= n_compare; ++k) {
    double t = down0.t + (cfg.t_end - down0.t) * k / n_compare;
    Eigen::VectorXd yd = down.at(t);
    Eigen::VectorXd yu = up.at(-t);
    rep.max_dx =
        std::max(rep.max_dx, (yd.head(d) - yu.head(d)).cwiseAbs().maxCoeff());
    rep.max_dp = std::max(
        rep.max_dp,
        (yu.segment(d + 2, d) + yd.tail(d)).cwiseAbs().maxCoeff());
  }
  rep.pass = rep.max_dx < rep.tol && rep.max_dp < rep.tol;
  return rep;
}

// Downstairs Verlet driver; requires N = 0, u-independent fields, and a
// constant metric (checked at the initial point).
inline Trajectory flow_down_verlet(const lift::NaturalSystem& sys,
                                   const lift::DownState& st0, double dt,
                                   const IntegratorConfig& cfg) {
  const int d = sys.d();
  const double q = sys.q;
  FieldJet hj = sys.h.at(st0.t, st0.x);
  FieldJet Nj = sys.N.at(st0.t, st0.x);
  double dev = 0.0;
  for (int i = 0; i < d; ++i) {
    dev = std::max(dev, std::abs(Nj.vec(i).v));
    for (int j = 0; j < d; ++j) {
      dev = std::max(dev, std::abs(hj.mat(i, j).g(tslot())));
      for (int k = 0; k < d; ++k)
        dev = std::max(dev, std::abs(hj.mat(i, j).g(xslot(k))));
    }
  }
  if (dev > 1e-12)
    throw std::invalid_argument(
        "flow_down_verlet: needs N = 0 and a constant base metric");

  Eigen::MatrixXd h = sys.h.value_matrix(st0.t, st0.x);
  Eigen::MatrixXd hinv = Eigen::PartialPivLU<Eigen::MatrixXd>(h).inverse();
  auto gradV = [&sys, d, q](const Eigen::VectorXd& x) {
    FieldJet Pj = sys.Phi.at(0.0, x);
    Eigen::VectorXd g(d);
    for (int i = 0; i < d; ++i) g(i) = q * q * Pj.s().g(xslot(i));
    return g;
  };
  Trajectory tr =
      integrate_verlet(gradV, hinv, st0.t, st0.x, st0.p, dt, cfg);
  tr.integrator_id += "/down";
  return tr;
}

} // namespace elift::dynamics

#endif
