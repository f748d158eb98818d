#ifndef ELIFT_OBSERVABLES_BRACKET_HPP
#define ELIFT_OBSERVABLES_BRACKET_HPP

#include "../geometry/christoffel.hpp"
#include "../lift/brinkmann.hpp"
#include "lifted.hpp"

namespace elift::observables {

// Covariant downstairs bracket
//   {A,B} = D_i A dB/dPi_i - dA/dPi_i D_i B - q F_{ij} dA/dPi_i dB/dPi_j,
//   D_i f = df/dx^i|_Pi + Gamma^k_{ij} Pi_k df/dPi_j.
inline double poisson_down(const PolyObservable& A, const PolyObservable& B,
                           const lift::NaturalSystem& sys,
                           const lift::DownState& st) {
  const int d = sys.d();
  PolyObservable Ap = convert_basis(A, sys, MomentumBasis::COVARIANT_PI);
  PolyObservable Bp = convert_basis(B, sys, MomentumBasis::COVARIANT_PI);

  Eigen::VectorXd Pi = lift::covariant_momentum(sys, st);
  DownEval a = eval_down_full(Ap, st.t, st.x, Pi);
  DownEval b = eval_down_full(Bp, st.t, st.x, Pi);

  geometry::BaseChristoffel G = geometry::christoffel_base(sys.h, st.t, st.x);
  Eigen::VectorXd Da(d), Db(d);
  for (int i = 0; i < d; ++i) {
    double ca = 0.0, cb = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        ca += G.G[k](i, j) * Pi(k) * a.dmom(j);
        cb += G.G[k](i, j) * Pi(k) * b.dmom(j);
      }
    Da(i) = a.dx(i) + ca;
    Db(i) = b.dx(i) + cb;
  }

  lift::FieldStrength fs = lift::field_strength(sys, st.t, st.x);
  double br = Da.dot(b.dmom) - a.dmom.dot(Db);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      br -= sys.q * fs.F(i, j) * a.dmom(i) * b.dmom(j);
  return br;
}

// Cross-check path: the same bracket in flat canonical (x, p) variables.
inline double poisson_down_canonical(const PolyObservable& A,
                                     const PolyObservable& B,
                                     const lift::NaturalSystem& sys,
                                     const lift::DownState& st) {
  PolyObservable Ap = convert_basis(A, sys, MomentumBasis::CANONICAL_P);
  PolyObservable Bp = convert_basis(B, sys, MomentumBasis::CANONICAL_P);
  DownEval a = eval_down_full(Ap, st.t, st.x, st.p);
  DownEval b = eval_down_full(Bp, st.t, st.x, st.p);
  return a.dx.dot(b.dmom) - a.dmom.dot(b.dx);
}

// Canonical upstairs bracket over (x^i, u, v; p̂_i, p̂_u, p̂_v); the v row
// drops out because lifted observables never depend on v.
inline double poisson_up(const LiftedObservable& A, const LiftedObservable& B,
                         const lift::NaturalSystem& sys,
                         const lift::UpState& st) {
  UpEval a = eval_up_full(A, sys, st);
  UpEval b = eval_up_full(B, sys, st);
  return a.dx.dot(b.dph) - a.dph.dot(b.dx) + a.du * b.dpu - a.dpu * b.du;
}

// Independent finite-difference oracle for poisson_up built only on
// eval_up (no shared derivative code paths).
inline double poisson_up_fd(const LiftedObservable& A,
                            const LiftedObservable& B,
                            const lift::NaturalSystem& sys,
                            const lift::UpState& st, double step = 1e-5) {
  const int d = sys.d();
  auto shifted = [&](const lift::UpState& s0, int var,
                     double h) -> lift::UpState {
    lift::UpState s = s0;
    if (var < d) s.x(var) += h;
    else if (var == d) s.u += h;
    else if (var == d + 1) s.v += h;
    else if (var < 2 * d + 2) s.ph(var - d - 2) += h;
    else if (var == 2 * d + 2) s.pu += h;
    else s.pv += h;
    return s;
  };
  auto d_of = [&](const LiftedObservable& O, int var) {
    double h = step;
    return (eval_up(O, sys, shifted(st, var, h)) -
            eval_up(O, sys, shifted(st, var, -h))) /
           (2.0 * h);
  };
  double br = 0.0;
  for (int i = 0; i < d + 2; ++i) {
    int pi = i + d + 2;
    br += d_of(A, i) * d_of(B, pi) - d_of(A, pi) * d_of(B, i);
  }
  return br;
}

} // namespace elift::observables

#endif
