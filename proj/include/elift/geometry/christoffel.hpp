#ifndef ELIFT_GEOMETRY_CHRISTOFFEL_HPP
#define ELIFT_GEOMETRY_CHRISTOFFEL_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "../core/field.hpp"
#include "../lift/natural_system.hpp"

namespace elift::geometry {

struct BaseChristoffel {
  // G[i](j,k) = Gamma^i_{jk} of the base metric h.
  std::vector<Eigen::MatrixXd> G;
  Eigen::MatrixXd h, hinv;
  double cond = 0.0;  // spectral condition number of h at the point
};

// Levi-Civita connection of h at (t, x):
//   Gamma^i_{jk} = 1/2 h^{il} (d_j h_{lk} + d_k h_{lj} - d_l h_{jk}).
// Throws if h is numerically singular at the point.
inline BaseChristoffel christoffel_base(const JetField& h, double t,
                                        const Eigen::VectorXd& x) {
  const int d = h.dim();
  FieldJet hj = h.at(t, x);

  BaseChristoffel out;
  out.h.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.h(i, j) = hj.mat(i, j).v;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.h);
  const auto& sv = svd.singularValues();
  double scale = sv(0);
  if (sv(d - 1) < 1e-12 * std::max(1.0, scale))
    throw std::domain_error("christoffel_base: metric singular at point");
  out.cond = sv(0) / sv(d - 1);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(out.h);
  out.hinv = lu.inverse();

  // dh[l](j,k) = d_l h_{jk}
  std::vector<Eigen::MatrixXd> dh(d, Eigen::MatrixXd(d, d));
  for (int l = 0; l < d; ++l)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) dh[l](j, k) = hj.mat(j, k).g(xslot(l));

  out.G.assign(d, Eigen::MatrixXd::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = j; k < d; ++k) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
          s += out.hinv(i, l) * (dh[j](l, k) + dh[k](j, l) - dh[l](j, k));
        out.G[i](j, k) = 0.5 * s;
        out.G[i](k, j) = out.G[i](j, k);
      }
  return out;
}

// Nonvanishing Christoffel blocks of the Brinkmann metric
//   ds^2 = h_ij dx^i dx^j + 2 du (dv - Phi du + N_i dx^i),
// coordinate order (x^1..x^d, u, v). Every Gamma^u block and every block
// with a lower v index vanishes identically; v_* names the upper-v blocks
// and i_* the upper-spatial ones.
struct LiftedChristoffel {
  double v_uu = 0.0;
  Eigen::VectorXd v_iu;                // [i]    Gamma^v_{iu}
  Eigen::MatrixXd v_ij;                // (i,j)  Gamma^v_{ij}
  Eigen::VectorXd i_uu;                // [i]    Gamma^i_{uu}
  Eigen::MatrixXd i_ju;                // (i,j)  Gamma^i_{ju}
  std::vector<Eigen::MatrixXd> i_jk;   // base Gamma^i_{jk}
  Eigen::MatrixXd hinv;
  double cond = 0.0;
};

// Closed-form connection of the lifted metric at upstairs time u.
// Fields are read at t = -u/q; u-derivatives of field data are -(1/q) d_t.
inline LiftedChristoffel christoffel_lifted(const lift::NaturalSystem& sys,
                                            double u,
                                            const Eigen::VectorXd& x) {
  const int d = sys.d();
  const double q = sys.q;
  const double t = -u / q;

  BaseChristoffel base = christoffel_base(sys.h, t, x);
  FieldJet hj = sys.h.at(t, x);
  FieldJet Nj = sys.N.at(t, x);
  FieldJet Pj = sys.Phi.at(t, x);

  Eigen::VectorXd Nlo(d), dPhi(d), duN(d);
  for (int i = 0; i < d; ++i) {
    Nlo(i) = Nj.vec(i).v;
    dPhi(i) = Pj.s().g(xslot(i));
    duN(i) = -(1.0 / q) * Nj.vec(i).g(tslot());
  }
  double duPhi = -(1.0 / q) * Pj.s().g(tslot());

  Eigen::MatrixXd dN(d, d);  // dN(i,j) = d_i N_j
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) dN(i, j) = Nj.vec(j).g(xslot(i));
  Eigen::MatrixXd F = dN - dN.transpose();  // F_{ij} = d_i N_j - d_j N_i

  Eigen::MatrixXd duh(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      duh(i, j) = -(1.0 / q) * hj.mat(i, j).g(tslot());

  Eigen::VectorXd Nup = base.hinv * Nlo;

  LiftedChristoffel out;
  out.hinv = base.hinv;
  out.cond = base.cond;
  out.i_jk = base.G;

  out.v_uu = -Nup.dot(dPhi) - duPhi - Nup.dot(duN);

  out.v_iu.resize(d);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int l = 0; l < d; ++l) s += Nup(l) * (0.5 * F(l, i) - 0.5 * duh(l, i));
    out.v_iu(i) = s - dPhi(i);
  }

  out.v_ij.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double cov = 0.5 * (dN(i, j) + dN(j, i));
      for (int l = 0; l < d; ++l) cov -= base.G[l](i, j) * Nlo(l);
      out.v_ij(i, j) = cov - 0.5 * duh(i, j);
    }

  out.i_uu = base.hinv * (dPhi + duN);
  out.i_ju = base.hinv * (-0.5 * F + 0.5 * duh);
  return out;
}

// Closed-form blocks rearranged into the dense (d+2)^3 table
// G[mu](nu, rho), coordinate order (x..., u, v).
inline std::vector<Eigen::MatrixXd> to_full(const LiftedChristoffel& c,
                                            int d) {
  const int n = d + 2, U = d, V = d + 1;
  std::vector<Eigen::MatrixXd> G(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) G[i](j, k) = c.i_jk[i](j, k);
      G[i](j, U) = G[i](U, j) = c.i_ju(i, j);
    }
    G[i](U, U) = c.i_uu(i);
  }
  for (int i = 0; i < d; ++i) {
    G[V](i, U) = G[V](U, i) = c.v_iu(i);
    for (int j = 0; j < d; ++j) G[V](i, j) = c.v_ij(i, j);
  }
  G[V](U, U) = c.v_uu;
  return G;
}

// Generic-formula connection of the lifted metric, assembled from the
// (d+2)x(d+2) metric and its coordinate derivatives. Cross-check oracle
// for christoffel_lifted; O(d^4), not for inner loops.
inline std::vector<Eigen::MatrixXd> christoffel_generic(
    const lift::NaturalSystem& sys, double u, const Eigen::VectorXd& x) {
  const int d = sys.d(), n = d + 2, U = d, V = d + 1;
  const double q = sys.q;
  const double t = -u / q;

  FieldJet hj = sys.h.at(t, x);
  FieldJet Nj = sys.N.at(t, x);
  FieldJet Pj = sys.Phi.at(t, x);

  // slot s of the jet -> derivative d_sigma upstairs: x-slots map directly,
  // the t-slot maps to d_u with factor -(1/q), d_v of any field is zero.
  auto dcomp = [&](const Jet2& c, int sigma) -> double {
    if (sigma < d) return c.g(xslot(sigma));
    if (sigma == U) return -(1.0 / q) * c.g(tslot());
    return 0.0;
  };

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = hj.mat(i, j).v;
    g(i, U) = g(U, i) = Nj.vec(i).v;
  }
  g(U, U) = -2.0 * Pj.s().v;
  g(U, V) = g(V, U) = 1.0;

  std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd::Zero(n, n));
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) dg[s](i, j) = dcomp(hj.mat(i, j), s);
      dg[s](i, U) = dg[s](U, i) = dcomp(Nj.vec(i), s);
    }
    dg[s](U, U) = -2.0 * dcomp(Pj.s(), s);
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
  Eigen::MatrixXd ginv = lu.inverse();

  std::vector<Eigen::MatrixXd> G(n, Eigen::MatrixXd::Zero(n, n));
  for (int m = 0; m < n; ++m)
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        double s = 0.0;
        for (int c = 0; c < n; ++c)
          s += ginv(m, c) * (dg[a](c, b) + dg[b](a, c) - dg[c](a, b));
        G[m](a, b) = 0.5 * s;
        G[m](b, a) = G[m](a, b);
      }
  return G;
}

// Largest absolute entry-wise deviation between two full tables.
inline double table_deviation(const std::vector<Eigen::MatrixXd>& A,
                              const std::vector<Eigen::MatrixXd>& B) {
  double m = 0.0;
  for (size_t i = 0; i < A.size(); ++i)
    m = std::max(m, (A[i] - B[i]).cwiseAbs().maxCoeff());
  return m;
}

} // namespace elift::geometry

#endif
