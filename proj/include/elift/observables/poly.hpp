#ifndef ELIFT_OBSERVABLES_POLY_HPP
#define ELIFT_OBSERVABLES_POLY_HPP

#include <string>
#include <vector>

#include "../core/symtensor.hpp"
#include "../lift/natural_system.hpp"

namespace elift::observables {

enum class MomentumBasis { CANONICAL_P, COVARIANT_PI };

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// C = sum_r (1/r!) C_(r)^{i1..ir}(t, x) m_{i1}..m_{ir} with m either the
// canonical p or the gauge-covariant Pi = p + qN. Coefficient tensors are
// stored in SymLayout slot order (one component per sorted index tuple).
struct PolyObservable {
  int m = 0;
  int d = 0;
  MomentumBasis basis = MomentumBasis::COVARIANT_PI;
  std::vector<JetField> coeffs;  // r = 0..m; invalid() entries are zero
  std::string name;

  bool has_rank(int r) const {
    return r >= 0 && r < static_cast<int>(coeffs.size()) && coeffs[r].valid();
  }
};

inline PolyObservable make_poly(int d, int m, MomentumBasis basis,
                                std::vector<JetField> coeffs,
                                std::string name = "") {
  if (static_cast<int>(coeffs.size()) != m + 1)
    throw std::invalid_argument("make_poly: need one coefficient field per rank 0..m");
  for (int r = 0; r <= m; ++r)
    if (coeffs[r].valid() &&
        coeffs[r].ncomp() != static_cast<int>(nsym(d, r)))
      throw std::invalid_argument("make_poly: rank " + std::to_string(r) +
                                  " component count mismatch");
  PolyObservable obs;
  obs.m = m;
  obs.d = d;
  obs.basis = basis;
  obs.coeffs = std::move(coeffs);
  obs.name = std::move(name);
  return obs;
}

inline Eigen::VectorXd basis_momenta(const PolyObservable& obs,
                                     const lift::NaturalSystem& sys,
                                     const lift::DownState& st) {
  if (obs.basis == MomentumBasis::CANONICAL_P) return st.p;
  return st.p + sys.q * sys.N.value(st.t, st.x);
}

inline double eval_down(const PolyObservable& obs,
                        const lift::NaturalSystem& sys,
                        const lift::DownState& st) {
  Eigen::VectorXd mom = basis_momenta(obs, sys, st);
  double val = 0.0;
  for (int r = 0; r <= obs.m; ++r) {
    if (!obs.has_rank(r)) continue;
    FieldJet fj = obs.coeffs[r].at(st.t, st.x);
    SymLayout L(obs.d, r);
    val += L.contract([&](int s) { return fj.c[s].v; }, mom);
  }
  return val;
}

// Value and first derivatives at fixed basis momenta: dmom is analytic
// from the polynomial structure, dx/dt come from the coefficient jets.
struct DownEval {
  double value = 0.0;
  double dt = 0.0;
  Eigen::VectorXd dmom, dx;
};

inline DownEval eval_down_full(const PolyObservable& obs, double t,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& mom) {
  const int d = obs.d;
  DownEval ev;
  ev.dmom = Eigen::VectorXd::Zero(d);
  ev.dx = Eigen::VectorXd::Zero(d);
  for (int r = 0; r <= obs.m; ++r) {
    if (!obs.has_rank(r)) continue;
    FieldJet fj = obs.coeffs[r].at(t, x);
    SymLayout L(d, r);
    auto val = [&](int s) { return fj.c[s].v; };
    ev.value += L.contract(val, mom);
    ev.dt += L.contract([&](int s) { return fj.c[s].g(tslot()); }, mom);
    for (int i = 0; i < d; ++i) {
      ev.dx(i) +=
          L.contract([&](int s) { return fj.c[s].g(xslot(i)); }, mom);
      ev.dmom(i) += L.contract_grad(val, mom, i);
    }
  }
  return ev;
}

// Re-express the observable in the other momentum basis. With m = p + A
// (A = +qN when moving PI -> P, A = -qN for P -> PI), the new rank-k
// coefficients are partial contractions of the old ones with A:
//   B_(k)^{j1..jk} = sum_{r>=k} (1/(r-k)!) C_(r)^{j1..jk, i...} A_{i}...
// computed pointwise in jet arithmetic so derivatives stay exact.
inline PolyObservable convert_basis(const PolyObservable& obs,
                                    const lift::NaturalSystem& sys,
                                    MomentumBasis target) {
  if (target == obs.basis) return obs;
  const int d = obs.d, m = obs.m;
  const double Asign = (obs.basis == MomentumBasis::COVARIANT_PI) ? 1.0 : -1.0;
  const double q = sys.q;

  PolyObservable out;
  out.m = m;
  out.d = d;
  out.basis = target;
  out.name = obs.name;
  out.coeffs.resize(m + 1);

  for (int k = 0; k <= m; ++k) {
    bool any = false;
    for (int r = k; r <= m; ++r) any = any || obs.has_rank(r);
    if (!any) continue;

    auto at = [obs, Nf = sys.N, d, m, k, Asign, q](
                  double t, const Eigen::VectorXd& x) -> FieldJet {
      const int n = 1 + d;
      FieldJet Nj = Nf.at(t, x);
      std::vector<Jet2> A(d);
      for (int i = 0; i < d; ++i) A[i] = Nj.vec(i) * (Asign * q);

      SymLayout Lk(d, k);
      FieldJet out_fj;
      out_fj.rank = -1;
      out_fj.d = d;
      out_fj.c.assign(Lk.size(), Jet2(0.0, n));

      for (int r = k; r <= m; ++r) {
        if (!obs.has_rank(r)) continue;
        FieldJet Cj = obs.coeffs[r].at(t, x);
        SymLayout Lr(d, r), Lj(d, r - k);
        double wj = 1.0 / factorial(r - k);
        for (int s = 0; s < Lk.size(); ++s) {
          const std::vector<int>& head = Lk.tuple(s);
          for (int sp = 0; sp < Lj.size(); ++sp) {
            std::vector<int> full = head;
            const std::vector<int>& tail = Lj.tuple(sp);
            full.insert(full.end(), tail.begin(), tail.end());
            Jet2 term = Cj.c[Lr.slot(full)] * (wj * Lj.mult(sp));
            for (int i : tail) term = term * A[i];
            out_fj.c[s] += term;
          }
        }
      }
      return out_fj;
    };
    out.coeffs[k] = JetField(static_cast<int>(nsym(d, k)), d, at, 0);
  }
  return out;
}

// Convenience builders -----------------------------------------------------

// Constant-coefficient rank-r tensor given by its SymLayout components.
inline JetField const_sym_coeff(int d, int r, const Eigen::VectorXd& comps) {
  if (comps.size() != nsym(d, r))
    throw std::invalid_argument("const_sym_coeff: component count mismatch");
  const int n = 1 + d;
  return JetField(static_cast<int>(comps.size()), d,
                  [comps, d, n](double, const Eigen::VectorXd&) {
                    FieldJet f;
                    f.rank = -1;
                    f.d = d;
                    f.c.reserve(comps.size());
                    for (int s = 0; s < comps.size(); ++s)
                      f.c.push_back(Jet2::constant(comps(s), n));
                    return f;
                  },
                  0);
}

// Rank-r coefficient built from a jet program over (t, x); the program
// must return nsym(d, r) components in SymLayout slot order.
inline JetField sym_coeff(int d, int r, JetField::JetFn fn) {
  JetField f = make_jet_components(static_cast<int>(nsym(d, r)), d, std::move(fn));
  return f;
}

} // namespace elift::observables

#endif
