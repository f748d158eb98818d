#ifndef ELIFT_KILLING_SOLVE_HPP
#define ELIFT_KILLING_SOLVE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "../observables/drift.hpp"
#include "ansatz.hpp"

namespace elift::killing {

enum class Classification { KILLING, CONFORMAL };

inline std::string to_string(Classification c) {
  return c == Classification::KILLING ? "KILLING" : "CONFORMAL";
}

struct Generator {
  Eigen::VectorXd coeffs;
  Classification classification = Classification::KILLING;
  double conformal_norm = 0.0;  // max |f| of the fitted conformal factor
  double residual_max = 0.0;    // over held-out validation points
};

struct SolveResult {
  AnsatzSpace space;
  int n_samples = 0;
  Eigen::VectorXd singular_values;  // descending
  int nullspace_dim = 0;
  std::vector<Generator> generators;
  double gap = std::numeric_limits<double>::infinity();
  bool reliable = true;  // false when the spectral gap is below 1e2
};

// A rank-two charge pins its lifted tensor only up to lambda(t, x) times the
// inverse metric, a shift that vanishes on the null shell and adds the
// trivial bracket {lambda, H} = d_k lambda h^{kj} Pihat_j - (1/q) dt lambda pv
// to the measured conformal factor.  The charge is strictly Killing iff some
// representative has zero factor, so classification must threshold the
// remainder after removing the best polynomial lambda, not the raw norm.
inline double reduced_conformal_norm(const lift::NaturalSystem& sys,
                                     const observables::ConformalFit& fit,
                                     int lambda_degree) {
  const int d = sys.d();
  const double q = sys.q;
  const std::vector<Monomial> mono = enumerate_monomials(d, lambda_degree);
  const int nm = static_cast<int>(mono.size());
  const int nb = static_cast<int>(fit.base.size());
  const int n = 1 + d;

  Eigen::MatrixXd A(nb, nm);
  Eigen::VectorXd rhs(nb);
  for (int b = 0; b < nb; ++b) {
    const lift::UpState& st = fit.base[b];
    const double t = -st.u / q;
    Eigen::MatrixXd h = sys.h.value_matrix(t, st.x);
    Eigen::VectorXd N = sys.N.value(t, st.x);
    Eigen::VectorXd w = h.ldlt().solve(st.ph - st.pv * N);

    Jet2 jt = Jet2::variable(t, tslot(), n);
    std::vector<Jet2> jx(d);
    for (int i = 0; i < d; ++i) jx[i] = Jet2::variable(st.x(i), xslot(i), n);
    for (int m = 0; m < nm; ++m) {
      Jet2 lam = monomial_jet(mono[m], jt, jx);
      double v = -lam.g(tslot()) * st.pv / q;
      for (int k = 0; k < d; ++k) v += lam.g(xslot(k)) * w(k);
      A(b, m) = v;
    }
    rhs(b) = fit.f_values(b);
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
  return (A * c - rhs).cwiseAbs().maxCoeff();
}

namespace detail {

inline Eigen::VectorXd stack_rows(const std::vector<Eigen::VectorXd>& rows) {
  int n = 0;
  for (const auto& r : rows) n += static_cast<int>(r.size());
  Eigen::VectorXd out(n);
  int off = 0;
  for (const auto& r : rows) {
    out.segment(off, r.size()) = r;
    off += static_cast<int>(r.size());
  }
  return out;
}

inline std::vector<Eigen::VectorXd> generator_rows(
    const lift::NaturalSystem& sys, const GeomCache& g, const AnsatzSpace& sp,
    const Eigen::VectorXd& w) {
  if (sp.rank == 1) return rank1_rows(sys, g, materialize_rank1(sp, w));
  return rank2_rows(sys, g, materialize_rank2(sp, w));
}

} // namespace detail

// Collocation solve of the homogeneous Killing system over the polynomial
// ansatz. Deterministic under seed; the nullspace basis consists of the
// right singular vectors below 1e-8 x sigma_max.
inline SolveResult solve_ansatz(const lift::NaturalSystem& sys,
                                const AnsatzSpace& sp, int n_samples,
                                std::uint64_t seed) {
  const int np = sp.n_params;
  if (n_samples < 3 * np)
    throw std::invalid_argument(
        "solve_ansatz: insufficient samples (need at least 3 x n_params)");

  std::mt19937_64 rng(seed);
  std::vector<SamplePoint> samples = make_samples(sys, n_samples, rng);

  // Basis independence: every monomial must be visibly nonzero somewhere on
  // the sample cloud, else the parameterization cannot be resolved.
  {
    const int nm = static_cast<int>(sp.monomials.size());
    Eigen::VectorXd mono_max = Eigen::VectorXd::Zero(nm);
    std::vector<Jet2> jx;
    for (const auto& s : samples) {
      Jet2 jt = Jet2::variable(s.t, tslot(), 1 + sp.d);
      jx.assign(sp.d, Jet2());
      for (int i = 0; i < sp.d; ++i)
        jx[i] = Jet2::variable(s.x(i), xslot(i), 1 + sp.d);
      for (int m = 0; m < nm; ++m)
        mono_max(m) = std::max(mono_max(m),
                               std::abs(monomial_jet(sp.monomials[m], jt, jx).v));
    }
    if (mono_max.minCoeff() < 1e-12)
      throw std::invalid_argument(
          "solve_ansatz: rank-deficient basis (a monomial vanishes on the "
          "sample cloud)");
  }

  // Unit-coefficient fields, one per parameter; residual rows are linear in
  // the coefficients so these give the matrix columns.
  std::vector<Rank1Fields> basis1;
  std::vector<Rank2Blocks> basis2;
  for (int j = 0; j < np; ++j) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(np);
    unit(j) = 1.0;
    if (sp.rank == 1)
      basis1.push_back(materialize_rank1(sp, unit));
    else
      basis2.push_back(materialize_rank2(sp, unit));
  }
  auto basis_rows = [&](const GeomCache& g, int j) -> Eigen::VectorXd {
    return detail::stack_rows(sp.rank == 1 ? rank1_rows(sys, g, basis1[j])
                                           : rank2_rows(sys, g, basis2[j]));
  };

  int rows_per_sample = 0;
  {
    GeomCache g0 = geom_cache(sys, samples[0].t, samples[0].x);
    rows_per_sample = static_cast<int>(basis_rows(g0, 0).size());
  }

  Eigen::MatrixXd A(static_cast<long>(n_samples) * rows_per_sample, np);
  for (int s = 0; s < n_samples; ++s) {
    GeomCache g = geom_cache(sys, samples[s].t, samples[s].x);
    for (int j = 0; j < np; ++j)
      A.block(static_cast<long>(s) * rows_per_sample, j, rows_per_sample, 1) =
          basis_rows(g, j);
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  const double thresh = std::max(1e-8 * sv(0), 1e-13);
  int k = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < thresh) ++k;

  SolveResult res;
  res.space = sp;
  res.n_samples = n_samples;
  res.singular_values = sv;
  res.nullspace_dim = k;
  if (k > 0 && k < np) {
    const double retained = sv(np - k - 1);
    const double rejected = std::max(sv(np - k), 1e-300);
    res.gap = retained / rejected;
    res.reliable = res.gap >= 1e2;
  }

  // Held-out validation on twice as many fresh points, then classification
  // through the fitted conformal factor of the lifted generator.
  std::vector<SamplePoint> fresh = make_samples(sys, 2 * n_samples, rng);
  std::vector<GeomCache> gfresh;
  gfresh.reserve(fresh.size());
  for (const auto& s : fresh) gfresh.push_back(geom_cache(sys, s.t, s.x));

  for (int gi = 0; gi < k; ++gi) {
    Generator gen;
    gen.coeffs = svd.matrixV().col(np - k + gi);

    double rmax = 0.0;
    for (const auto& g : gfresh) {
      Eigen::VectorXd r =
          detail::stack_rows(detail::generator_rows(sys, g, sp, gen.coeffs));
      rmax = std::max(rmax, r.cwiseAbs().maxCoeff());
    }
    gen.residual_max = rmax;

    if (sp.rank == 1) {
      observables::LiftedObservable lifted =
          rank1_lifted(sys, materialize_rank1(sp, gen.coeffs));
      gen.conformal_norm = observables::conformal_factor(lifted, sys).fnorm;
    } else {
      // base the fit on enough null states to overdetermine the lambda
      // reduction; degree + 1 covers every shift between in-space splits
      observables::LiftedObservable lifted =
          rank2_lifted(sys, materialize_rank2(sp, gen.coeffs));
      const int lam_deg = sp.poly_degree + 1;
      const int nlam =
          static_cast<int>(enumerate_monomials(sp.d, lam_deg).size());
      observables::ConformalFit fit =
          observables::conformal_factor(lifted, sys, std::max(50, 3 * nlam));
      gen.conformal_norm = reduced_conformal_norm(sys, fit, lam_deg);
    }
    gen.classification = gen.conformal_norm > 1e-6 ? Classification::CONFORMAL
                                                   : Classification::KILLING;
    res.generators.push_back(std::move(gen));
  }
  return res;
}

} // namespace elift::killing

#endif
