#ifndef ELIFT_KILLING_RESIDUAL_HPP
#define ELIFT_KILLING_RESIDUAL_HPP

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "../geometry/christoffel.hpp"
#include "../lift/brinkmann.hpp"
#include "../observables/poly.hpp"

namespace elift::killing {

struct SamplePoint {
  double t = 0.0;
  Eigen::VectorXd x;
};

// Uniform draws from the time window times the spatial box shrunk by 10%.
inline std::vector<SamplePoint> make_samples(const lift::NaturalSystem& sys,
                                             int n, std::mt19937_64& rng) {
  std::vector<SamplePoint> s(n);
  for (int k = 0; k < n; ++k) {
    s[k].t = lift::sample_time(sys.box, rng);
    s[k].x = lift::sample_point(sys.box, rng);
  }
  return s;
}

// Dense tensor of doubles with rank r over d spatial indices.
struct DenseT {
  int d = 0, r = 0;
  std::vector<double> v;

  DenseT() = default;
  DenseT(int dd, int rr) : d(dd), r(rr) {
    std::size_t n = 1;
    for (int k = 0; k < rr; ++k) n *= dd;
    v.assign(n, 0.0);
  }
  std::size_t size() const { return v.size(); }
  double& at(const std::vector<int>& idx) { return v[lin(idx)]; }
  double at(const std::vector<int>& idx) const { return v[lin(idx)]; }
  std::size_t lin(const std::vector<int>& idx) const {
    std::size_t s = 0;
    for (int k = 0; k < r; ++k) s = s * d + idx[k];
    return s;
  }
  void unlin(std::size_t s, std::vector<int>& idx) const {
    idx.assign(r, 0);
    for (int k = r - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(s % d);
      s /= d;
    }
  }
};

inline const std::vector<std::vector<int>>& index_permutations(int r) {
  static std::vector<std::vector<std::vector<int>>> cache(8);
  if (r < 0 || r > 7) throw std::invalid_argument("rank out of range");
  if (cache[r].empty()) {
    std::vector<int> p(r);
    std::iota(p.begin(), p.end(), 0);
    do {
      cache[r].push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    if (cache[r].empty()) cache[r].push_back({});
  }
  return cache[r];
}

// Average over all permutations of the free indices.
inline DenseT symmetrize(const DenseT& T) {
  if (T.r <= 1) return T;
  const auto& perms = index_permutations(T.r);
  DenseT out(T.d, T.r);
  std::vector<int> idx, pidx(T.r);
  for (std::size_t s = 0; s < T.size(); ++s) {
    T.unlin(s, idx);
    double acc = 0.0;
    for (const auto& p : perms) {
      for (int k = 0; k < T.r; ++k) pidx[k] = idx[p[k]];
      acc += T.v[T.lin(pidx)];
    }
    out.v[s] = acc / static_cast<double>(perms.size());
  }
  return out;
}

// Expansion of a symmetric-component FieldJet (SymLayout order) into dense
// value, time-derivative and spatial-derivative tensors.
struct DenseJet {
  DenseT val, dt;
  std::vector<DenseT> dx;
};

inline DenseJet dense_expand(const FieldJet& fj, const SymLayout& L) {
  const int d = L.d(), r = L.r();
  DenseJet out;
  out.val = DenseT(d, r);
  out.dt = DenseT(d, r);
  out.dx.assign(d, DenseT(d, r));
  std::vector<int> idx, sorted;
  for (std::size_t s = 0; s < out.val.size(); ++s) {
    out.val.unlin(s, idx);
    sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    const int slot = L.slot(sorted);
    out.val.v[s] = fj.c[slot].v;
    out.dt.v[s] = fj.c[slot].g(tslot());
    for (int k = 0; k < d; ++k) out.dx[k].v[s] = fj.c[slot].g(xslot(k));
  }
  return out;
}

// Per-sample geometric data shared by all residual equations.
struct GeomCache {
  double t;
  Eigen::VectorXd x;
  Eigen::MatrixXd h, hinv;      // h_{ij} and h^{ij}
  Eigen::MatrixXd dth_up;       // d_t h^{ij}
  std::vector<Eigen::MatrixXd> dxh_up;  // d_k h^{ij}
  std::vector<Eigen::MatrixXd> Gamma;   // Gamma[k](i,j) = Gamma^k_{ij}
  Eigen::MatrixXd F;            // F_{ij} = d_i N_j - d_j N_i
  Eigen::MatrixXd Fup;          // F^i_l = h^{ik} F_{kl}
  Eigen::VectorXd flux;         // d_t N_i - q d_i Phi
  Eigen::VectorXd flux_up;      // h^{ij} flux_j
};

inline GeomCache geom_cache(const lift::NaturalSystem& sys, double t,
                            const Eigen::VectorXd& x) {
  const int d = sys.d();
  GeomCache g;
  g.t = t;
  g.x = x;

  geometry::BaseChristoffel bc = geometry::christoffel_base(sys.h, t, x);
  g.h = bc.h;
  g.hinv = bc.hinv;
  g.Gamma = bc.G;

  FieldJet hj = sys.h.at(t, x);
  Eigen::MatrixXd dth(d, d);
  std::vector<Eigen::MatrixXd> dxh(d, Eigen::MatrixXd(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      dth(i, j) = hj.mat(i, j).g(tslot());
      for (int k = 0; k < d; ++k) dxh[k](i, j) = hj.mat(i, j).g(xslot(k));
    }
  g.dth_up = -g.hinv * dth * g.hinv;
  g.dxh_up.resize(d);
  for (int k = 0; k < d; ++k) g.dxh_up[k] = -g.hinv * dxh[k] * g.hinv;

  lift::FieldStrength fs = lift::field_strength(sys, t, x);
  g.F = fs.F;
  g.Fup = g.hinv * g.F;
  g.flux = lift::flux_t(sys, t, x);
  g.flux_up = g.hinv * g.flux;
  return g;
}

// Covariant spatial derivative of a dense contravariant rank-r tensor:
// nabla_k C^J = d_k C^J + sum_s Gamma^{J_s}_{k l} C^{J, J_s -> l}.
inline DenseT covariant_derivative(const GeomCache& g, const DenseJet& C,
                                   int k) {
  const int d = C.val.d, r = C.val.r;
  DenseT out = C.dx[k];
  std::vector<int> idx, mod;
  for (std::size_t s = 0; s < out.size(); ++s) {
    out.unlin(s, idx);
    double acc = 0.0;
    for (int pos = 0; pos < r; ++pos) {
      mod = idx;
      for (int l = 0; l < d; ++l) {
        mod[pos] = l;
        acc += g.Gamma[idx[pos]](k, l) * C.val.v[C.val.lin(mod)];
      }
    }
    out.v[s] += acc;
  }
  return out;
}

struct EquationResidual {
  std::string label;
  std::vector<Eigen::VectorXd> values;  // flattened tensor per sample
  double max_abs = 0.0;
  double rms = 0.0;
};

struct KillingResidual {
  int rank = 0;
  std::vector<EquationResidual> equations;
  bool phi2_defaulted = false;  // no declared Phi split; Phi2 := Phi

  double max_abs() const {
    double m = 0.0;
    for (const auto& e : equations) m = std::max(m, e.max_abs);
    return m;
  }
};

inline void finish_norms(KillingResidual& kr) {
  for (auto& eq : kr.equations) {
    double sq = 0.0;
    std::size_t n = 0;
    for (const auto& v : eq.values) {
      eq.max_abs = std::max(eq.max_abs, v.cwiseAbs().maxCoeff());
      sq += v.squaredNorm();
      n += v.size();
    }
    eq.rms = n ? std::sqrt(sq / static_cast<double>(n)) : 0.0;
  }
}

inline Eigen::VectorXd flatten(const DenseT& T) {
  return Eigen::Map<const Eigen::VectorXd>(T.v.data(), T.v.size());
}

// --- rank 1 ----------------------------------------------------------------
//
// Charge family C = C_(0) + C_(1)^i Pi_i + (1/2) Chat^u h^{ij} Pi_i Pi_j,
// with C_(0) the fully expanded rank-0 coefficient. The four equations:
//   eq1: d_i Chat^u = 0 (time dependence only),
//   eq2: nabla^(i C_(1)^j) + (1/2) d_t(Chat^u h^{ij}) = 0,
//   eq3: nabla^i C_(0) + d_t C_(1)^i + q C_(1)^l F^i_l
//        + q Chat^u h^{ij}(d_t N_j - q d_j Phi) = 0,
//   eq4: d_t C_(0) + q C_(1)^i (d_t N_i - q d_i Phi) = 0.
// Every flux bracket F_{tj} - q nabla_j Phi2 collapses to d_t N - q grad Phi,
// so the equations are independent of how Phi is split.
struct Rank1Fields {
  JetField C0;  // scalar
  JetField C1;  // contravariant vector, d components
  JetField Cu;  // scalar
};

// Rows of the rank-1 system at one cached sample; shared by the residual
// report and the ansatz collocation matrix.
inline std::vector<Eigen::VectorXd> rank1_rows(const lift::NaturalSystem& sys,
                                               const GeomCache& g,
                                               const Rank1Fields& f) {
  const int d = sys.d();
  const double q = sys.q;
  FieldJet c0 = f.C0.at(g.t, g.x);
  FieldJet c1 = f.C1.at(g.t, g.x);
  FieldJet cu = f.Cu.at(g.t, g.x);

  Eigen::VectorXd eq1(d);
  for (int i = 0; i < d; ++i) eq1(i) = cu.s().g(xslot(i));

  Eigen::MatrixXd gradC1(d, d);  // gradC1(k, j) = d_k C1^j
  Eigen::VectorXd c1v(d), dtC1(d);
  for (int j = 0; j < d; ++j) {
    c1v(j) = c1.vec(j).v;
    dtC1(j) = c1.vec(j).g(tslot());
    for (int k = 0; k < d; ++k) gradC1(k, j) = c1.vec(j).g(xslot(k));
  }

  Eigen::MatrixXd nab(d, d);  // nab(i, j) = nabla^i C1^j
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) {
        double cov = gradC1(k, j);
        for (int l = 0; l < d; ++l) cov += g.Gamma[j](k, l) * c1v(l);
        acc += g.hinv(i, k) * cov;
      }
      nab(i, j) = acc;
    }
  const double cuv = cu.s().v, dtCu = cu.s().g(tslot());
  Eigen::MatrixXd eq2 =
      0.5 * (nab + nab.transpose()) + 0.5 * (dtCu * g.hinv + cuv * g.dth_up);

  Eigen::VectorXd gradC0(d);
  for (int k = 0; k < d; ++k) gradC0(k) = c0.s().g(xslot(k));
  Eigen::VectorXd eq3 = g.hinv * gradC0 + dtC1 + q * (g.Fup * c1v) +
                        q * cuv * g.flux_up;

  Eigen::VectorXd eq4(1);
  eq4(0) = c0.s().g(tslot()) + q * c1v.dot(g.flux);

  return {eq1, Eigen::Map<Eigen::VectorXd>(eq2.data(), d * d), eq3, eq4};
}

inline KillingResidual residual_rank1(const lift::NaturalSystem& sys,
                                      const JetField& C0, const JetField& C1,
                                      const JetField& Cu,
                                      const std::vector<SamplePoint>& samples);

inline KillingResidual residual_rank1(const lift::NaturalSystem& sys,
                                      const Rank1Fields& f,
                                      const std::vector<SamplePoint>& samples) {
  KillingResidual kr;
  kr.rank = 1;
  kr.phi2_defaulted = !sys.has_phi_split();
  kr.equations.resize(4);
  for (int e = 0; e < 4; ++e)
    kr.equations[e].label = "rank1.eq" + std::to_string(e + 1);
  for (const auto& s : samples) {
    GeomCache g = geom_cache(sys, s.t, s.x);
    std::vector<Eigen::VectorXd> rows = rank1_rows(sys, g, f);
    for (int e = 0; e < 4; ++e) kr.equations[e].values.push_back(rows[e]);
  }
  finish_norms(kr);
  return kr;
}

inline KillingResidual residual_rank1(const lift::NaturalSystem& sys,
                                      const JetField& C0, const JetField& C1,
                                      const JetField& Cu,
                                      const std::vector<SamplePoint>& samples) {
  Rank1Fields f;
  f.C0 = C0;
  f.C1 = C1;
  f.Cu = Cu;
  return residual_rank1(sys, f, samples);
}

// --- rank 2 ----------------------------------------------------------------
//
// Blocks of the degree-2 family in its downstairs expansion
//   C = d0/4! (hPiPi)^2 + q/3! d1.Pi (hPiPi) + q^2/2 (d2 h + C^{ij}) PiPi
//       + q^3 d3.Pi + q^4 d4,
// with Cij stored as nsym(d,2) symmetric components.
struct Rank2Blocks {
  JetField d0;   // scalar
  JetField d1;   // contravariant vector
  JetField d2;   // scalar
  JetField Cij;  // symmetric contravariant rank 2, SymLayout components
  JetField d3;   // contravariant vector
  JetField d4;   // scalar
};

inline std::vector<Eigen::VectorXd> rank2_rows(const lift::NaturalSystem& sys,
                                               const GeomCache& g,
                                               const Rank2Blocks& blk) {
  const int d = sys.d();
  const double q = sys.q;
  FieldJet jd0 = blk.d0.at(g.t, g.x);
  FieldJet jd1 = blk.d1.at(g.t, g.x);
  FieldJet jd2 = blk.d2.at(g.t, g.x);
  FieldJet jC = blk.Cij.at(g.t, g.x);
  FieldJet jd3 = blk.d3.at(g.t, g.x);
  FieldJet jd4 = blk.d4.at(g.t, g.x);

  const double d0 = jd0.s().v, dtd0 = jd0.s().g(tslot());
  const double d2v = jd2.s().v, dtd2 = jd2.s().g(tslot());
  const double d4v = jd4.s().v, dtd4 = jd4.s().g(tslot());
  (void)d4v;
  Eigen::VectorXd gd0(d), gd2(d), gd4(d);
  Eigen::VectorXd d1v(d), dtd1(d), d3v(d), dtd3(d);
  Eigen::MatrixXd gd1(d, d), gd3(d, d);  // (k, j) = d_k X^j
  for (int k = 0; k < d; ++k) {
    gd0(k) = jd0.s().g(xslot(k));
    gd2(k) = jd2.s().g(xslot(k));
    gd4(k) = jd4.s().g(xslot(k));
  }
  for (int j = 0; j < d; ++j) {
    d1v(j) = jd1.vec(j).v;
    dtd1(j) = jd1.vec(j).g(tslot());
    d3v(j) = jd3.vec(j).v;
    dtd3(j) = jd3.vec(j).g(tslot());
    for (int k = 0; k < d; ++k) {
      gd1(k, j) = jd1.vec(j).g(xslot(k));
      gd3(k, j) = jd3.vec(j).g(xslot(k));
    }
  }
  SymLayout L2(d, 2);
  DenseJet Cd = dense_expand(jC, L2);

  auto nabla_vec = [&](const Eigen::MatrixXd& grad,
                       const Eigen::VectorXd& val) -> Eigen::MatrixXd {
    Eigen::MatrixXd nab(d, d);  // (i, j) = nabla^i X^j
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) {
          double cov = grad(k, j);
          for (int l = 0; l < d; ++l) cov += g.Gamma[j](k, l) * val(l);
          acc += g.hinv(i, k) * cov;
        }
        nab(i, j) = acc;
      }
    return nab;
  };

  // eq1: d0 is a function of t only
  Eigen::VectorXd eq1 = gd0;

  // eq2: q nabla^(i d1^{j1} h^{j2 j3)} + 1/4 d_t(d0 h^(i j1 h j2 j3))
  Eigen::MatrixXd nabd1 = nabla_vec(gd1, d1v);
  DenseT T4(d, 4);
  {
    std::vector<int> ix;
    for (std::size_t s = 0; s < T4.size(); ++s) {
      T4.unlin(s, ix);
      const int i = ix[0], j1 = ix[1], j2 = ix[2], j3 = ix[3];
      double v = q * nabd1(i, j1) * g.hinv(j2, j3);
      v += 0.25 * (dtd0 * g.hinv(i, j1) * g.hinv(j2, j3) +
                   d0 * g.dth_up(i, j1) * g.hinv(j2, j3) +
                   d0 * g.hinv(i, j1) * g.dth_up(j2, j3));
      T4.v[s] = v;
    }
  }
  DenseT eq2 = symmetrize(T4);

  // eq3: q^2 nabla^(i M^{jk)} + q/3 d_t(d1^(i h^{jk)})
  //      + q^2/3 d1^l F^(i_l h^{jk)} + q d0/3 h^(ij flux^k)
  // with M^{jk} = d2 h^{jk} + C^{jk}.
  Eigen::MatrixXd Mv(d, d), dtM(d, d);
  std::vector<Eigen::MatrixXd> dxM(d, Eigen::MatrixXd(d, d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const std::size_t lin = Cd.val.lin({a, b});
      Mv(a, b) = d2v * g.hinv(a, b) + Cd.val.v[lin];
      dtM(a, b) = dtd2 * g.hinv(a, b) + d2v * g.dth_up(a, b) + Cd.dt.v[lin];
      for (int k = 0; k < d; ++k)
        dxM[k](a, b) = gd2(k) * g.hinv(a, b) + d2v * g.dxh_up[k](a, b) +
                       Cd.dx[k].v[lin];
    }
  // nabla_k M^{jk2} then raised on k
  auto nabla_mat_up = [&](const std::vector<Eigen::MatrixXd>& dxT,
                          const Eigen::MatrixXd& Tv, int i, int a,
                          int b) -> double {
    double acc = 0.0;
    for (int k = 0; k < d; ++k) {
      double cov = dxT[k](a, b);
      for (int l = 0; l < d; ++l)
        cov += g.Gamma[a](k, l) * Tv(l, b) + g.Gamma[b](k, l) * Tv(a, l);
      acc += g.hinv(i, k) * cov;
    }
    return acc;
  };
  DenseT T3(d, 3);
  {
    Eigen::VectorXd Fd1 = g.Fup * d1v;  // (F^i_l d1^l)
    std::vector<int> ix;
    for (std::size_t s = 0; s < T3.size(); ++s) {
      T3.unlin(s, ix);
      const int i = ix[0], j = ix[1], k = ix[2];
      double v = q * q * nabla_mat_up(dxM, Mv, i, j, k);
      v += (q / 3.0) * (dtd1(i) * g.hinv(j, k) + d1v(i) * g.dth_up(j, k));
      v += (q * q / 3.0) * Fd1(i) * g.hinv(j, k);
      v += (q * d0 / 3.0) * g.hinv(i, j) * g.flux_up(k);
      T3.v[s] = v;
    }
  }
  DenseT eq3 = symmetrize(T3);

  // eq4: q^3 nabla^(i d3^j) + q^2/2 d_t M^{ij} + q^3 C^{(i|l|} F^{j)}_l
  //      + q^2/6 [2 d1^(i flux^j) + (d1.flux) h^{ij}]
  Eigen::MatrixXd nabd3 = nabla_vec(gd3, d3v);
  const double d1flux = d1v.dot(g.flux);
  DenseT T2(d, 2);
  {
    std::vector<int> ix;
    for (std::size_t s = 0; s < T2.size(); ++s) {
      T2.unlin(s, ix);
      const int i = ix[0], j = ix[1];
      double CF = 0.0;  // C^{il} F^j_l
      for (int l = 0; l < d; ++l)
        CF += Cd.val.v[Cd.val.lin({i, l})] * g.Fup(j, l);
      double v = q * q * q * nabd3(i, j) + 0.5 * q * q * dtM(i, j) +
                 q * q * q * CF;
      v += (q * q / 6.0) *
           (2.0 * d1v(i) * g.flux_up(j) + d1flux * g.hinv(i, j));
      T2.v[s] = v;
    }
  }
  DenseT eq4 = symmetrize(T2);

  // eq5: q^4 nabla^i d4 + q^3 d_t d3^i + q^4 d3^l F^i_l
  //      + q^3 [d2 flux^i + C^{il} flux_l]
  Eigen::VectorXd eq5(d);
  {
    Eigen::VectorXd Cflux(d);
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int l = 0; l < d; ++l)
        acc += Cd.val.v[Cd.val.lin({i, l})] * g.flux(l);
      Cflux(i) = acc;
    }
    eq5 = std::pow(q, 4) * (g.hinv * gd4) + std::pow(q, 3) * dtd3 +
          std::pow(q, 4) * (g.Fup * d3v) +
          std::pow(q, 3) * (d2v * g.flux_up + Cflux);
  }

  // eq6: d_t d4 + d3^i flux_i
  Eigen::VectorXd eq6(1);
  eq6(0) = dtd4 + d3v.dot(g.flux);

  return {eq1, flatten(eq2), flatten(eq3), flatten(eq4), eq5, eq6};
}

inline KillingResidual residual_rank2(const lift::NaturalSystem& sys,
                                      const Rank2Blocks& blk,
                                      const std::vector<SamplePoint>& samples) {
  KillingResidual kr;
  kr.rank = 2;
  kr.phi2_defaulted = !sys.has_phi_split();
  kr.equations.resize(6);
  for (int e = 0; e < 6; ++e)
    kr.equations[e].label = "rank2.eq" + std::to_string(e + 1);
  for (const auto& s : samples) {
    GeomCache g = geom_cache(sys, s.t, s.x);
    std::vector<Eigen::VectorXd> rows = rank2_rows(sys, g, blk);
    for (int e = 0; e < 6; ++e) kr.equations[e].values.push_back(rows[e]);
  }
  finish_norms(kr);
  return kr;
}

// --- generic rank ----------------------------------------------------------
//
// Strict (non-conformal) Killing hierarchy for an observable written in the
// covariant basis, C = sum_r (1/r!) C_(r) Pi^r:
//   for a = 0..m:
//     nabla^(i C_(a)^{j1..ja)} + 1/(a+1) d_t C_(a+1)^{i j1..ja}
//     + q/(a+1) C_(a+2)^{i j1..ja l} flux_l
//     + q C_(a+1)^{(j1..ja l} F^{i)}_l = 0,
//   closure: d_t C_(0) + q C_(1)^i flux_i = 0,
// with flux_i = d_t N_i - q d_i Phi. All residuals vanish along-samples iff
// dC/dt vanishes along trajectories (cross-validated in tests).
inline KillingResidual residual_generic(const lift::NaturalSystem& sys,
                                        const observables::PolyObservable& obs,
                                        const std::vector<SamplePoint>& samples) {
  if (obs.m > 6) throw std::invalid_argument("residual_generic: rank > 6");
  const int d = sys.d();
  const int m = obs.m;
  const double q = sys.q;
  observables::PolyObservable pi =
      observables::convert_basis(obs, sys, observables::MomentumBasis::COVARIANT_PI);

  KillingResidual kr;
  kr.rank = m;
  kr.phi2_defaulted = !sys.has_phi_split();
  kr.equations.resize(m + 2);
  for (int a = 0; a <= m; ++a)
    kr.equations[a].label = "generic.a" + std::to_string(a);
  kr.equations[m + 1].label = "generic.closure";

  for (const auto& s : samples) {
    GeomCache g = geom_cache(sys, s.t, s.x);

    std::vector<DenseJet> C(m + 3);  // ranks 0..m, then two empty guards
    for (int r = 0; r <= m; ++r) {
      SymLayout L(d, r);
      if (pi.has_rank(r)) {
        C[r] = dense_expand(pi.coeffs[r].at(s.t, s.x), L);
      } else {
        C[r].val = DenseT(d, r);
        C[r].dt = DenseT(d, r);
        C[r].dx.assign(d, DenseT(d, r));
      }
    }
    for (int r = m + 1; r <= m + 2; ++r) {
      C[r].val = DenseT(d, r);
      C[r].dt = DenseT(d, r);
      C[r].dx.assign(d, DenseT(d, r));
    }

    for (int a = 0; a <= m; ++a) {
      DenseT U(d, a + 1);
      std::vector<int> ix, tail;
      // unsymmetrized: nabla^{i} C_(a)^{J} + q C_(a+1)^{J l} F^{i}_l
      std::vector<DenseT> nab(d);
      for (int k = 0; k < d; ++k) nab[k] = covariant_derivative(g, C[a], k);
      for (std::size_t sidx = 0; sidx < U.size(); ++sidx) {
        U.unlin(sidx, ix);
        const int i = ix[0];
        tail.assign(ix.begin() + 1, ix.end());
        double v = 0.0;
        for (int k = 0; k < d; ++k)
          v += g.hinv(i, k) * nab[k].v[nab[k].lin(tail)];
        std::vector<int> ext = tail;
        ext.push_back(0);
        for (int l = 0; l < d; ++l) {
          ext.back() = l;
          v += q * C[a + 1].val.v[C[a + 1].val.lin(ext)] * g.Fup(i, l);
        }
        U.v[sidx] = v;
      }
      DenseT R = symmetrize(U);
      // symmetric additions: 1/(a+1) d_t C_(a+1)^{iJ} + q/(a+1) C_(a+2) flux
      for (std::size_t sidx = 0; sidx < R.size(); ++sidx) {
        R.unlin(sidx, ix);
        R.v[sidx] += C[a + 1].dt.v[C[a + 1].dt.lin(ix)] / (a + 1.0);
        std::vector<int> ext = ix;
        ext.push_back(0);
        double cf = 0.0;
        for (int l = 0; l < d; ++l) {
          ext.back() = l;
          cf += C[a + 2].val.v[C[a + 2].val.lin(ext)] * g.flux(l);
        }
        R.v[sidx] += q * cf / (a + 1.0);
      }
      kr.equations[a].values.push_back(flatten(R));
    }

    Eigen::VectorXd closure(1);
    double c1flux = 0.0;
    for (int i = 0; i < d; ++i)
      c1flux += C[1].val.v[C[1].val.lin({i})] * g.flux(i);
    closure(0) = C[0].dt.v[0] + q * c1flux;
    kr.equations[m + 1].values.push_back(closure);
  }
  finish_norms(kr);
  return kr;
}

} // namespace elift::killing

#endif
