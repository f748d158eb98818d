#ifndef ELIFT_OBSERVABLES_LIFTED_HPP
#define ELIFT_OBSERVABLES_LIFTED_HPP

#include "poly.hpp"

namespace elift::observables {

// Homogeneous degree-m symmetric tensor on the lifted manifold, stored by
// momentum block: blocks[a][b] holds the components Chat^{u^a v^b sigma}
// (sigma a spatial multiset in SymLayout(d, m-a-b) order). Fields are
// functions of (t, x) read at t = -u/q; nothing depends on v, so the
// v-independence invariant is structural. Evaluation contracts against
// (p̂_u, p̂_v, Pîhat) with weight mult(sigma)/(a! b! c!), which equals the
// full (1/m!) symmetric contraction of the assembled tensor.
struct LiftedObservable {
  int m = 0;
  int d = 0;
  std::vector<std::vector<JetField>> blocks;  // [a][b], a+b <= m
  std::string name;

  bool has_block(int a, int b) const {
    return a >= 0 && b >= 0 && a + b <= m && blocks[a][b].valid();
  }
};

inline LiftedObservable make_lifted(int d, int m, std::string name = "") {
  LiftedObservable lo;
  lo.m = m;
  lo.d = d;
  lo.name = std::move(name);
  lo.blocks.assign(m + 1, std::vector<JetField>(m + 1));
  return lo;
}

inline void set_block(LiftedObservable& lo, int a, int b, JetField comp) {
  const int c = lo.m - a - b;
  if (c < 0) throw std::invalid_argument("set_block: a + b exceeds degree");
  if (comp.ncomp() != static_cast<int>(nsym(lo.d, c)))
    throw std::invalid_argument("set_block: component count mismatch");
  lo.blocks[a][b] = std::move(comp);
}

inline double eval_up(const LiftedObservable& lo,
                      const lift::NaturalSystem& sys,
                      const lift::UpState& st) {
  const double t = st.t(sys.q);
  Eigen::VectorXd Pih = lift::covariant_momentum_up(sys, st);
  double val = 0.0;
  for (int a = 0; a <= lo.m; ++a)
    for (int b = 0; a + b <= lo.m; ++b) {
      if (!lo.has_block(a, b)) continue;
      FieldJet fj = lo.blocks[a][b].at(t, st.x);
      SymLayout L(lo.d, lo.m - a - b);
      double w = std::pow(st.pu, a) * std::pow(st.pv, b) /
                 (factorial(a) * factorial(b));
      val += w * L.contract([&](int s) { return fj.c[s].v; }, Pih);
    }
  return val;
}

// Value and all first partials in canonical upstairs coordinates
// (x, u, v; p̂_i, p̂_u, p̂_v); d/dv = 0 by construction.
struct UpEval {
  double value = 0.0;
  double du = 0.0, dpu = 0.0, dpv = 0.0;
  Eigen::VectorXd dx, dph;
};

inline UpEval eval_up_full(const LiftedObservable& lo,
                           const lift::NaturalSystem& sys,
                           const lift::UpState& st) {
  const int d = lo.d;
  const double q = sys.q;
  const double t = st.t(q);

  FieldJet Nj = sys.N.at(t, st.x);
  Eigen::VectorXd N(d), Pih(d);
  for (int i = 0; i < d; ++i) {
    N(i) = Nj.vec(i).v;
    Pih(i) = st.ph(i) - st.pv * N(i);
  }

  UpEval ev;
  ev.dx = Eigen::VectorXd::Zero(d);
  ev.dph = Eigen::VectorXd::Zero(d);

  for (int a = 0; a <= lo.m; ++a)
    for (int b = 0; a + b <= lo.m; ++b) {
      if (!lo.has_block(a, b)) continue;
      FieldJet fj = lo.blocks[a][b].at(t, st.x);
      SymLayout L(d, lo.m - a - b);
      auto val = [&](int s) { return fj.c[s].v; };

      const double pua = std::pow(st.pu, a), pvb = std::pow(st.pv, b);
      const double w = pua * pvb / (factorial(a) * factorial(b));
      const double con = L.contract(val, Pih);

      ev.value += w * con;
      if (a >= 1)
        ev.dpu += a * std::pow(st.pu, a - 1) * pvb /
                  (factorial(a) * factorial(b)) * con;
      if (b >= 1)
        ev.dpv += pua * b * std::pow(st.pv, b - 1) /
                  (factorial(a) * factorial(b)) * con;

      Eigen::VectorXd gcon(d);
      for (int j = 0; j < d; ++j) gcon(j) = L.contract_grad(val, Pih, j);

      // dPihat_j/dp̂_v = -N_j; dPihat_j/dx^i = -p̂_v d_i N_j
      ev.dpv += w * gcon.dot(-N);
      for (int j = 0; j < d; ++j) ev.dph(j) += w * gcon(j);

      double dtcon =
          L.contract([&](int s) { return fj.c[s].g(tslot()); }, Pih);
      double dtPi = 0.0;
      for (int j = 0; j < d; ++j)
        dtPi += gcon(j) * (-st.pv * Nj.vec(j).g(tslot()));
      ev.du += -(1.0 / q) * w * (dtcon + dtPi);

      for (int i = 0; i < d; ++i) {
        double dxcon =
            L.contract([&](int s) { return fj.c[s].g(xslot(i)); }, Pih);
        double dxPi = 0.0;
        for (int j = 0; j < d; ++j)
          dxPi += gcon(j) * (-st.pv * Nj.vec(j).g(xslot(i)));
        ev.dx(i) += w * (dxcon + dxPi);
      }
    }
  return ev;
}

// Scale every component of a coefficient field by a constant.
inline JetField scale_field(const JetField& f, double c) {
  return JetField(f.ncomp(), f.dim(),
                  [f, c](double t, const Eigen::VectorXd& x) {
                    FieldJet fj = f.at(t, x);
                    for (auto& comp : fj.c) {
                      comp.v *= c;
                      comp.g *= c;
                      comp.H *= c;
                    }
                    return fj;
                  },
                  0);
}

// Lift of a degree-m polynomial observable: Chat = sum_r (p̂_v/q)^{m-r}
// C'_(r)(x, -Pîhat). Only p̂_v blocks appear; the spatial sign map
// contributes (-1)^r per rank. The observable is converted to the
// covariant-Pi basis first when needed.
inline LiftedObservable lift_observable(const PolyObservable& obs,
                                        const lift::NaturalSystem& sys) {
  PolyObservable pi = convert_basis(obs, sys, MomentumBasis::COVARIANT_PI);
  LiftedObservable lo = make_lifted(obs.d, obs.m, obs.name);
  for (int r = 0; r <= obs.m; ++r) {
    if (!pi.has_rank(r)) continue;
    const int b = obs.m - r;
    const double scale = factorial(b) * std::pow(-1.0, r) /
                         std::pow(sys.q, b);
    set_block(lo, 0, b, scale_field(pi.coeffs[r], scale));
  }
  return lo;
}

// Component jets of the inverse base metric h^{ij} (row-major), derived
// from h's jets via d(h^-1) = -h^-1 (dh) h^-1.
inline JetField inverse_metric_field(const JetField& h) {
  const int d = h.dim();
  return JetField(2, d, [h, d](double t, const Eigen::VectorXd& x) {
    const int n = 1 + d;
    FieldJet hj = h.at(t, x);

    Eigen::MatrixXd hv(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) hv(i, j) = hj.mat(i, j).v;
    Eigen::MatrixXd M = Eigen::PartialPivLU<Eigen::MatrixXd>(hv).inverse();

    std::vector<Eigen::MatrixXd> dh(n, Eigen::MatrixXd(d, d)), dM(n);
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) dh[a](i, j) = hj.mat(i, j).g(a);
      dM[a] = -M * dh[a] * M;
    }

    FieldJet out;
    out.rank = 2;
    out.d = d;
    out.c.assign(d * d, Jet2(0.0, n));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Jet2& c = out.c[i * d + j];
        c.v = M(i, j);
        for (int a = 0; a < n; ++a) c.g(a) = dM[a](i, j);
      }
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        Eigen::MatrixXd dd(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) dd(i, j) = hj.mat(i, j).H(a, b);
        Eigen::MatrixXd H2 = -dM[b] * dh[a] * M - M * dd * M - M * dh[a] * dM[b];
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            out.c[i * d + j].H(a, b) = H2(i, j);
            out.c[i * d + j].H(b, a) = H2(i, j);
          }
      }
    return out;
  });
}

// Convert a rank-0/1/2 tensor field into SymLayout component order.
inline JetField to_sym_components(const JetField& f) {
  const int d = f.dim();
  if (f.rank() == 0 || f.rank() == 1) return f;
  if (f.rank() != 2)
    throw std::invalid_argument("to_sym_components: only ranks 0..2");
  SymLayout L(d, 2);
  return JetField(L.size(), d,
                  [f, d, L](double t, const Eigen::VectorXd& x) {
                    FieldJet fj = f.at(t, x);
                    FieldJet out;
                    out.rank = -1;
                    out.d = d;
                    out.c.reserve(L.size());
                    for (int s = 0; s < L.size(); ++s) {
                      auto tup = L.tuple(s);
                      out.c.push_back(fj.mat(tup[0], tup[1]));
                    }
                    return out;
                  },
                  0);
}

// The geodesic Hamiltonian as a degree-2 lifted observable:
// Chat^{uv} = 1, Chat^{vv} = 2 Phi, Chat^{ij} = h^{ij}.
inline LiftedObservable hamiltonian_up_observable(
    const lift::NaturalSystem& sys) {
  const int d = sys.d();
  LiftedObservable lo = make_lifted(d, 2, "hamiltonian");
  set_block(lo, 1, 1, const_sym_coeff(d, 0, Eigen::VectorXd::Ones(1)));
  set_block(lo, 0, 2, scale_field(sys.Phi, 2.0));
  set_block(lo, 0, 0, to_sym_components(inverse_metric_field(sys.h)));
  return lo;
}

// Downstairs-projection combinations of a rank-2 lifted observable
// (substituting the null relations q p̂_u = -H, p̂_v = q): the d_(k)
// coefficient functions of the degree-4..0 momentum expansion.
struct Rank2Projection {
  double d0 = 0.0;
  Eigen::VectorXd d1;
  double d2 = 0.0;
  Eigen::VectorXd d3;
  double d4 = 0.0;
};

inline Rank2Projection project_rank2(const LiftedObservable& lo,
                                     const lift::NaturalSystem& sys,
                                     double t, const Eigen::VectorXd& x) {
  if (lo.m != 2) throw std::invalid_argument("project_rank2: degree != 2");
  const int d = lo.d;
  const double Phi = sys.Phi.value(t, x)(0);

  auto block_val = [&](int a, int b) -> Eigen::VectorXd {
    if (!lo.has_block(a, b))
      return Eigen::VectorXd::Zero(nsym(d, lo.m - a - b));
    return lo.blocks[a][b].value(t, x);
  };

  double Cuu = block_val(2, 0)(0);
  double Cuv = block_val(1, 1)(0);
  double Cvv = block_val(0, 2)(0);
  Eigen::VectorXd Cui = block_val(1, 0);
  Eigen::VectorXd Cvi = block_val(0, 1);

  Rank2Projection pr;
  pr.d0 = 3.0 * Cuu;
  pr.d1 = 3.0 * Cui;
  pr.d2 = -Cuv + Cuu * Phi;
  pr.d3 = -Cvi + Phi * Cui;
  pr.d4 = 0.5 * (Cvv + Cuu * Phi * Phi - 2.0 * Cuv * Phi);
  return pr;
}

} // namespace elift::observables

#endif
