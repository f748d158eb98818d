#ifndef ELIFT_LIFT_BRINKMANN_HPP
#define ELIFT_LIFT_BRINKMANN_HPP

#include <stdexcept>

#include <Eigen/Dense>

#include "../geometry/christoffel.hpp"
#include "natural_system.hpp"

namespace elift::lift {

struct Metric {
  Eigen::MatrixXd g, ginv;
};

// Brinkmann metric at upstairs time u, coordinate order (x^1..x^d, u, v):
//   g_ij = h_ij, g_iu = N_i, g_uu = -2*Phi, g_uv = 1, rest zero.
inline Metric metric_at(const NaturalSystem& sys, double u,
                        const Eigen::VectorXd& x) {
  const int d = sys.d(), n = d + 2, U = d, V = d + 1;
  const double t = -u / sys.q;

  Eigen::MatrixXd h = sys.h.value_matrix(t, x);
  Eigen::VectorXd N = sys.N.value(t, x);
  double Phi = sys.Phi.value(t, x)(0);

  Metric m;
  m.g = Eigen::MatrixXd::Zero(n, n);
  m.g.topLeftCorner(d, d) = h;
  m.g.col(U).head(d) = N;
  m.g.row(U).head(d) = N.transpose();
  m.g(U, U) = -2.0 * Phi;
  m.g(U, V) = m.g(V, U) = 1.0;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  const auto& sv = svd.singularValues();
  if (sv(d - 1) < 1e-12 * std::max(1.0, sv(0)))
    throw std::domain_error("metric_at: base metric singular at point");

  m.ginv = Eigen::PartialPivLU<Eigen::MatrixXd>(m.g).inverse();
  return m;
}

// H = 1/2 h^{ij} Pi_i Pi_j + q^2 Phi with Pi = p + q N.
inline double hamiltonian_down(const NaturalSystem& sys, const DownState& st) {
  Eigen::MatrixXd h = sys.h.value_matrix(st.t, st.x);
  Eigen::VectorXd Pi = covariant_momentum(sys, st);
  double Phi = sys.Phi.value(st.t, st.x)(0);
  return 0.5 * Pi.dot(h.ldlt().solve(Pi)) + sys.q * sys.q * Phi;
}

// Geodesic Hamiltonian of the lift, evaluated in closed form:
//   1/2 g^{mu nu} p̂_mu p̂_nu = p̂_u p̂_v + Phi p̂_v^2 + 1/2 h^{ij} Pîhat_i Pîhat_j.
inline double hamiltonian_up(const NaturalSystem& sys, const UpState& st) {
  const double t = st.t(sys.q);
  Eigen::MatrixXd h = sys.h.value_matrix(t, st.x);
  Eigen::VectorXd Pih = covariant_momentum_up(sys, st);
  double Phi = sys.Phi.value(t, st.x)(0);
  return st.pu * st.pv + Phi * st.pv * st.pv +
         0.5 * Pih.dot(h.ldlt().solve(Pih));
}

// Embed a downstairs state as a null geodesic initial condition:
// p̂_v = q, p̂_i = -p_i, p̂_u = -H/q, u = -q t + u0, v = v0.
inline UpState lift_state(const NaturalSystem& sys, const DownState& down,
                          double u0 = 0.0, double v0 = 0.0) {
  if (sys.q == 0.0) throw std::domain_error("lift_state: q = 0");
  UpState up;
  up.u = -sys.q * down.t + u0;
  up.v = v0;
  up.x = down.x;
  up.pv = sys.q;
  up.ph = -down.p;
  up.pu = -hamiltonian_down(sys, down) / sys.q;
  return up;
}

inline DownState project_state(const NaturalSystem& sys, const UpState& up) {
  DownState down;
  down.t = up.t(sys.q);
  down.x = up.x;
  down.p = -up.ph;
  return down;
}

// v -> v + Lambda re-parameterization of the lift:
//   Phi' = Phi + d_u Lambda, N'_i = N_i - d_i Lambda, h' = h.
// Lambda is a function of (t, x); d_u Lambda = -(1/q) d_t Lambda. Third
// derivatives of Lambda enter only the Hessian slots of the transformed
// fields and are recovered by central differences of Lambda's exact
// Hessian (exact for polynomial Lambda of degree <= 3).
inline NaturalSystem gauge_transform(const NaturalSystem& sys,
                                     const JetField& Lambda,
                                     double step = 1e-4) {
  if (Lambda.rank() != 0)
    throw std::invalid_argument("gauge_transform: Lambda must be rank 0");
  const int d = sys.d();
  const double q = sys.q;

  // d3[a](b,c) = d_a d_b d_c Lambda at (t,x), slot indices over (t, x...).
  auto third = [Lambda, d, step](double t, const Eigen::VectorXd& x) {
    const int n = 1 + d;
    std::vector<Eigen::MatrixXd> T(n);
    for (int a = 0; a < n; ++a) {
      double ha = step;
      double tp = t, tm = t;
      Eigen::VectorXd xp = x, xm = x;
      if (a == tslot()) {
        ha = step * std::max(1.0, std::abs(t));
        tp += ha;
        tm -= ha;
      } else {
        int i = a - 1;
        ha = step * std::max(1.0, std::abs(x(i)));
        xp(i) += ha;
        xm(i) -= ha;
      }
      T[a] = (Lambda.at(tp, xp).s().H - Lambda.at(tm, xm).s().H) / (2.0 * ha);
    }
    return T;
  };

  JetField N2 = JetField(
      1, d, [base = sys.N, Lambda, third, d](double t, const Eigen::VectorXd& x) {
        FieldJet f = base.at(t, x);
        FieldJet Lj = Lambda.at(t, x);
        auto T = third(t, x);
        for (int j = 0; j < d; ++j) {
          Jet2& c = f.vec(j);
          c.v -= Lj.s().g(xslot(j));
          c.g -= Lj.s().H.col(xslot(j));
          for (int a = 0; a < 1 + d; ++a)
            for (int b = 0; b < 1 + d; ++b) c.H(a, b) -= T[a](b, xslot(j));
        }
        return f;
      });

  auto phi_shift = [Lambda, third, q, d](JetField base) {
    return JetField(
        0, d, [base, Lambda, third, q, d](double t, const Eigen::VectorXd& x) {
          FieldJet f = base.at(t, x);
          FieldJet Lj = Lambda.at(t, x);
          auto T = third(t, x);
          Jet2& c = f.s();
          c.v += -(1.0 / q) * Lj.s().g(tslot());
          c.g += -(1.0 / q) * Lj.s().H.col(tslot());
          for (int a = 0; a < 1 + d; ++a)
            for (int b = 0; b < 1 + d; ++b)
              c.H(a, b) += -(1.0 / q) * T[a](b, tslot());
          return f;
        });
  };

  NaturalSystem out = sys;
  out.N = N2;
  out.Phi = phi_shift(sys.Phi);
  if (sys.Phi1.valid()) out.Phi1 = phi_shift(sys.Phi1);
  return out;
}

struct FieldStrength {
  Eigen::MatrixXd F;   // F_{ij} = d_i N_j - d_j N_i
  Eigen::VectorXd Ft;  // F_{ti} = d_t N_i - q d_i Phi_1
  bool phi_split_used = false;  // false: Phi_1 := Phi substituted
};

inline FieldStrength field_strength(const NaturalSystem& sys, double t,
                                    const Eigen::VectorXd& x) {
  const int d = sys.d();
  FieldJet Nj = sys.N.at(t, x);
  const JetField& phi1 = sys.has_phi_split() ? sys.Phi1 : sys.Phi;
  FieldJet Pj = phi1.at(t, x);

  FieldStrength fs;
  fs.phi_split_used = sys.has_phi_split();
  fs.F.resize(d, d);
  fs.Ft.resize(d);
  for (int i = 0; i < d; ++i) {
    fs.Ft(i) = Nj.vec(i).g(tslot()) - sys.q * Pj.s().g(xslot(i));
    for (int j = 0; j < d; ++j)
      fs.F(i, j) = Nj.vec(j).g(xslot(i)) - Nj.vec(i).g(xslot(j));
  }
  return fs;
}

// Split-independent flux d_t N_i - q d_i Phi = F_{ti} - q d_i Phi_2; the
// only combination of the gauge split the symmetry equations see.
inline Eigen::VectorXd flux_t(const NaturalSystem& sys, double t,
                              const Eigen::VectorXd& x) {
  const int d = sys.d();
  FieldJet Nj = sys.N.at(t, x);
  FieldJet Pj = sys.Phi.at(t, x);
  Eigen::VectorXd f(d);
  for (int i = 0; i < d; ++i)
    f(i) = Nj.vec(i).g(tslot()) - sys.q * Pj.s().g(xslot(i));
  return f;
}

// Riemannian (d+1)-metric of the u-independent reduction, coordinate
// order (x^1..x^d, v):
//   ds^2 = h_ij dx^i dx^j + (1/(2 Phi)) (dv + N_i dx^i)^2.
// Its geodesic Hamiltonian at p_v = -q equals hamiltonian_down exactly.
struct MetricD1 {
  Eigen::MatrixXd A, Ainv;
};

inline MetricD1 metric_d1(const NaturalSystem& sys, double t,
                          const Eigen::VectorXd& x) {
  const int d = sys.d(), n = d + 1, V = d;

  FieldJet hj = sys.h.at(t, x);
  FieldJet Nj = sys.N.at(t, x);
  FieldJet Pj = sys.Phi.at(t, x);
  double udev = std::abs(Pj.s().g(tslot()));
  for (int i = 0; i < d; ++i) {
    udev = std::max(udev, std::abs(Nj.vec(i).g(tslot())));
    for (int j = 0; j < d; ++j)
      udev = std::max(udev, std::abs(hj.mat(i, j).g(tslot())));
  }
  if (udev > 1e-12)
    throw std::domain_error("metric_d1: fields depend on u at point");

  double Phi = Pj.s().v;
  if (std::abs(Phi) < 1e-14)
    throw std::domain_error("metric_d1: Phi = 0, metric signature degenerates");

  Eigen::MatrixXd h = sys.h.value_matrix(t, x);
  Eigen::VectorXd N = sys.N.value(t, x);

  MetricD1 m;
  m.A = Eigen::MatrixXd::Zero(n, n);
  m.A.topLeftCorner(d, d) = h + N * N.transpose() / (2.0 * Phi);
  m.A.col(V).head(d) = N / (2.0 * Phi);
  m.A.row(V).head(d) = N.transpose() / (2.0 * Phi);
  m.A(V, V) = 1.0 / (2.0 * Phi);
  m.Ainv = Eigen::PartialPivLU<Eigen::MatrixXd>(m.A).inverse();
  return m;
}

inline double hamiltonian_d1(const NaturalSystem& sys, double t,
                             const Eigen::VectorXd& x,
                             const Eigen::VectorXd& p, double pv) {
  MetricD1 m = metric_d1(sys, t, x);
  Eigen::VectorXd pm(sys.d() + 1);
  pm.head(sys.d()) = p;
  pm(sys.d()) = pv;
  return 0.5 * pm.dot(m.Ainv * pm);
}

} // namespace elift::lift

#endif
