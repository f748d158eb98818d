#ifndef ELIFT_KILLING_ANSATZ_HPP
#define ELIFT_KILLING_ANSATZ_HPP

#include <string>
#include <vector>

#include "../observables/lifted.hpp"
#include "residual.hpp"

namespace elift::killing {

// One polynomial basis element t^a x_1^{e_1}..x_d^{e_d}.
struct Monomial {
  int tdeg = 0;
  std::vector<int> xdeg;

  int total() const {
    int s = tdeg;
    for (int e : xdeg) s += e;
    return s;
  }
};

inline Jet2 ipow_jet(const Jet2& b, int e) {
  Jet2 out = Jet2::constant(1.0, b.g.size());
  for (int k = 0; k < e; ++k) out = out * b;
  return out;
}

inline Jet2 monomial_jet(const Monomial& mo, const Jet2& t,
                         const std::vector<Jet2>& x) {
  Jet2 out = ipow_jet(t, mo.tdeg);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (mo.xdeg[i] > 0) out = out * ipow_jet(x[i], mo.xdeg[i]);
  return out;
}

inline std::vector<Monomial> enumerate_monomials(int d, int degree) {
  std::vector<Monomial> out;
  std::vector<int> e(1 + d, 0);
  // odometer over exponent vectors with total degree <= degree
  while (true) {
    int tot = 0;
    for (int v : e) tot += v;
    if (tot <= degree) {
      Monomial mo;
      mo.tdeg = e[0];
      mo.xdeg.assign(e.begin() + 1, e.end());
      out.push_back(std::move(mo));
    }
    int k = 0;
    while (k <= d && e[k] == degree) e[k++] = 0;
    if (k > d) break;
    ++e[k];
  }
  return out;
}

struct AnsatzBlock {
  std::string name;
  int tensor_rank = 0;  // contravariant; symmetric components when rank >= 2
  int ncomp = 1;
};

// Unknown coefficient fields, each component expanded in the shared monomial
// basis. Parameter layout: block-major, then component-major, then monomial.
struct AnsatzSpace {
  int d = 0;
  int rank = 1;
  int poly_degree = 0;
  std::vector<Monomial> monomials;
  std::vector<AnsatzBlock> blocks;
  int n_params = 0;

  int offset(int b) const {
    int off = 0;
    for (int k = 0; k < b; ++k)
      off += blocks[k].ncomp * static_cast<int>(monomials.size());
    return off;
  }
};

inline AnsatzSpace make_ansatz(int d, int rank, int poly_degree) {
  if (rank != 1 && rank != 2)
    throw std::invalid_argument("make_ansatz: only ranks 1 and 2 have block ansatze");
  AnsatzSpace sp;
  sp.d = d;
  sp.rank = rank;
  sp.poly_degree = poly_degree;
  sp.monomials = enumerate_monomials(d, poly_degree);
  if (rank == 1) {
    sp.blocks = {{"C0", 0, 1}, {"C1", 1, d}, {"Cu", 0, 1}};
  } else {
    sp.blocks = {{"d0", 0, 1},  {"d1", 1, d},
                 {"d2", 0, 1},  {"Cij", 2, static_cast<int>(nsym(d, 2))},
                 {"d3", 1, d},  {"d4", 0, 1}};
  }
  for (const auto& b : sp.blocks)
    sp.n_params += b.ncomp * static_cast<int>(sp.monomials.size());
  return sp;
}

inline AnsatzSpace make_ansatz_rank1(int d, int poly_degree) {
  return make_ansatz(d, 1, poly_degree);
}
inline AnsatzSpace make_ansatz_rank2(int d, int poly_degree) {
  return make_ansatz(d, 2, poly_degree);
}

// Field for one ansatz block under the coefficient vector w.
inline JetField block_field(const AnsatzSpace& sp, const Eigen::VectorXd& w,
                            int b) {
  const AnsatzBlock blk = sp.blocks[b];
  const int off = sp.offset(b);
  const int nm = static_cast<int>(sp.monomials.size());
  const std::vector<Monomial> mono = sp.monomials;
  Eigen::VectorXd chunk = w.segment(off, blk.ncomp * nm);
  return make_jet_components(
      blk.ncomp, sp.d,
      [mono, chunk, nm, nc = blk.ncomp](const Jet2& t,
                                        const std::vector<Jet2>& x) {
        // evaluate only the monomials that actually carry weight
        std::vector<Jet2> mj(mono.size());
        std::vector<bool> have(mono.size(), false);
        std::vector<Jet2> out(nc, Jet2::constant(0.0, t.g.size()));
        for (int c = 0; c < nc; ++c)
          for (int m = 0; m < nm; ++m) {
            const double wv = chunk(c * nm + m);
            if (wv == 0.0) continue;
            if (!have[m]) {
              mj[m] = monomial_jet(mono[m], t, x);
              have[m] = true;
            }
            out[c] = out[c] + wv * mj[m];
          }
        return out;
      });
}

inline Rank1Fields materialize_rank1(const AnsatzSpace& sp,
                                     const Eigen::VectorXd& w) {
  if (sp.rank != 1) throw std::invalid_argument("materialize_rank1: rank != 1");
  Rank1Fields f;
  f.C0 = block_field(sp, w, 0);
  f.C1 = block_field(sp, w, 1);
  f.Cu = block_field(sp, w, 2);
  return f;
}

inline Rank2Blocks materialize_rank2(const AnsatzSpace& sp,
                                     const Eigen::VectorXd& w) {
  if (sp.rank != 2) throw std::invalid_argument("materialize_rank2: rank != 2");
  Rank2Blocks blk;
  blk.d0 = block_field(sp, w, 0);
  blk.d1 = block_field(sp, w, 1);
  blk.d2 = block_field(sp, w, 2);
  blk.Cij = block_field(sp, w, 3);
  blk.d3 = block_field(sp, w, 4);
  blk.d4 = block_field(sp, w, 5);
  return blk;
}

// Downstairs charge of a rank-1 generator,
//   C = C0 + C1^i Pi_i + (1/2) Cu h^{ij} Pi_i Pi_j.
inline observables::PolyObservable rank1_observable(
    const lift::NaturalSystem& sys, const Rank1Fields& f,
    std::string name = "") {
  const int d = sys.d();
  JetField hup = observables::inverse_metric_field(sys.h);
  JetField c2(static_cast<int>(nsym(d, 2)), d,
              [hup, Cu = f.Cu, d](double t, const Eigen::VectorXd& x) {
    FieldJet hj = hup.at(t, x);
    FieldJet cu = Cu.at(t, x);
    SymLayout L(d, 2);
    FieldJet out;
    out.rank = -1;
    out.d = d;
    out.c.resize(L.size());
    for (std::size_t s = 0; s < L.size(); ++s) {
      auto tup = L.tuple(s);
      out.c[s] = cu.s() * hj.mat(tup[0], tup[1]);
    }
    return out;
  }, 0);
  return observables::make_poly(
      d, 2, observables::MomentumBasis::COVARIANT_PI,
      {f.C0, f.C1, std::move(c2)}, std::move(name));
}

// Moment map of the generating vector on the lifted geometry:
//   Chat = Cu phat_u + (1/q) C1^i Pihat_i + (Cu Phi - C0/q^2) phat_v.
// On the null shell it evaluates to -C/q.
inline observables::LiftedObservable rank1_lifted(
    const lift::NaturalSystem& sys, const Rank1Fields& f,
    std::string name = "") {
  const int d = sys.d();
  const double q = sys.q;
  observables::LiftedObservable lo =
      observables::make_lifted(d, 1, std::move(name));
  observables::set_block(lo, 1, 0, f.Cu);
  observables::set_block(lo, 0, 0, observables::scale_field(f.C1, 1.0 / q));
  JetField cv(0, d, [C0 = f.C0, Cu = f.Cu, Phi = sys.Phi, q, d](
                        double t, const Eigen::VectorXd& x) {
    FieldJet c0 = C0.at(t, x);
    FieldJet cu = Cu.at(t, x);
    FieldJet ph = Phi.at(t, x);
    FieldJet out;
    out.rank = 0;
    out.d = d;
    out.c.resize(1);
    out.c[0] = cu.s() * ph.s() + (-1.0 / (q * q)) * c0.s();
    return out;
  });
  observables::set_block(lo, 0, 1, std::move(cv));
  return lo;
}

// Downstairs charge of a rank-2 block set,
//   C = d0/4! (hPiPi)^2 + q/3! d1.Pi (hPiPi)
//       + q^2/2 (d2 h^{ij} + C^{ij}) Pi_i Pi_j + q^3 d3.Pi + q^4 d4.
inline observables::PolyObservable rank2_observable(
    const lift::NaturalSystem& sys, const Rank2Blocks& blk,
    std::string name = "") {
  const int d = sys.d();
  const double q = sys.q;
  JetField hup = observables::inverse_metric_field(sys.h);

  JetField c4(static_cast<int>(nsym(d, 4)), d,
              [hup, d0 = blk.d0, d](double t, const Eigen::VectorXd& x) {
    FieldJet hj = hup.at(t, x);
    FieldJet jd0 = d0.at(t, x);
    SymLayout L(d, 4);
    FieldJet out;
    out.rank = -1;
    out.d = d;
    out.c.resize(L.size());
    for (std::size_t s = 0; s < L.size(); ++s) {
      auto u = L.tuple(s);
      Jet2 sym = hj.mat(u[0], u[1]) * hj.mat(u[2], u[3]) +
                 hj.mat(u[0], u[2]) * hj.mat(u[1], u[3]) +
                 hj.mat(u[0], u[3]) * hj.mat(u[1], u[2]);
      out.c[s] = (1.0 / 3.0) * jd0.s() * sym;
    }
    return out;
  }, 0);

  JetField c3(static_cast<int>(nsym(d, 3)), d,
              [hup, d1 = blk.d1, q, d](double t, const Eigen::VectorXd& x) {
    FieldJet hj = hup.at(t, x);
    FieldJet jd1 = d1.at(t, x);
    SymLayout L(d, 3);
    FieldJet out;
    out.rank = -1;
    out.d = d;
    out.c.resize(L.size());
    for (std::size_t s = 0; s < L.size(); ++s) {
      auto u = L.tuple(s);
      Jet2 sym = jd1.vec(u[0]) * hj.mat(u[1], u[2]) +
                 jd1.vec(u[1]) * hj.mat(u[0], u[2]) +
                 jd1.vec(u[2]) * hj.mat(u[0], u[1]);
      out.c[s] = (q / 3.0) * sym;
    }
    return out;
  }, 0);

  JetField c2(static_cast<int>(nsym(d, 2)), d,
              [hup, d2 = blk.d2, Cij = blk.Cij, q, d](
                  double t, const Eigen::VectorXd& x) {
    FieldJet hj = hup.at(t, x);
    FieldJet jd2 = d2.at(t, x);
    FieldJet jC = Cij.at(t, x);
    SymLayout L(d, 2);
    FieldJet out;
    out.rank = -1;
    out.d = d;
    out.c.resize(L.size());
    for (std::size_t s = 0; s < L.size(); ++s) {
      auto u = L.tuple(s);
      out.c[s] = (q * q) * (jd2.s() * hj.mat(u[0], u[1]) + jC.c[s]);
    }
    return out;
  }, 0);

  JetField c1 = observables::scale_field(blk.d3, q * q * q);
  JetField c0 = observables::scale_field(blk.d4, q * q * q * q);
  return observables::make_poly(
      d, 4, observables::MomentumBasis::COVARIANT_PI,
      {std::move(c0), std::move(c1), std::move(c2), std::move(c3),
       std::move(c4)},
      std::move(name));
}

// Lifted form of a rank-2 block set, for classification:
//   Chat^{uu} = d0/3,             Chat^{ui} = d1^i/3,
//   Chat^{uv} = Chat^{uu} Phi - d2,
//   Chat^{ij} = C^{ij},           Chat^{vi} = Phi Chat^{ui} - d3^i,
//   Chat^{vv} = 2 d4 + Chat^{uu} Phi^2 - 2 d2 Phi.
inline observables::LiftedObservable rank2_lifted(
    const lift::NaturalSystem& sys, const Rank2Blocks& blk,
    std::string name = "") {
  const int d = sys.d();
  observables::LiftedObservable lo =
      observables::make_lifted(d, 2, std::move(name));
  observables::set_block(lo, 2, 0, observables::scale_field(blk.d0, 1.0 / 3.0));
  observables::set_block(lo, 1, 0, observables::scale_field(blk.d1, 1.0 / 3.0));
  observables::set_block(lo, 0, 0, blk.Cij);

  JetField cuv(0, d, [d0 = blk.d0, d2 = blk.d2, Phi = sys.Phi, d](
                         double t, const Eigen::VectorXd& x) {
    FieldJet j0 = d0.at(t, x), j2 = d2.at(t, x), ph = Phi.at(t, x);
    FieldJet out;
    out.rank = 0;
    out.d = d;
    out.c.resize(1);
    out.c[0] = (1.0 / 3.0) * j0.s() * ph.s() + (-1.0) * j2.s();
    return out;
  });
  observables::set_block(lo, 1, 1, std::move(cuv));

  JetField cvi(1, d, [d1 = blk.d1, d3 = blk.d3, Phi = sys.Phi, d](
                         double t, const Eigen::VectorXd& x) {
    FieldJet j1 = d1.at(t, x), j3 = d3.at(t, x), ph = Phi.at(t, x);
    FieldJet out;
    out.rank = 1;
    out.d = d;
    out.c.resize(d);
    for (int i = 0; i < d; ++i)
      out.c[i] = (1.0 / 3.0) * ph.s() * j1.vec(i) + (-1.0) * j3.vec(i);
    return out;
  });
  observables::set_block(lo, 0, 1, std::move(cvi));

  JetField cvv(0, d, [d0 = blk.d0, d2 = blk.d2, d4 = blk.d4, Phi = sys.Phi, d](
                         double t, const Eigen::VectorXd& x) {
    FieldJet j0 = d0.at(t, x), j2 = d2.at(t, x), j4 = d4.at(t, x),
             ph = Phi.at(t, x);
    FieldJet out;
    out.rank = 0;
    out.d = d;
    out.c.resize(1);
    out.c[0] = 2.0 * j4.s() + (1.0 / 3.0) * j0.s() * sq(ph.s()) +
               (-2.0) * j2.s() * ph.s();
    return out;
  });
  observables::set_block(lo, 0, 2, std::move(cvv));
  return lo;
}

} // namespace elift::killing

#endif
