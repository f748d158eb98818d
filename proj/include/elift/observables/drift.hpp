#ifndef ELIFT_OBSERVABLES_DRIFT_HPP
#define ELIFT_OBSERVABLES_DRIFT_HPP

#include <random>
#include <stdexcept>
#include <vector>

#include "../dynamics/flows.hpp"
#include "bracket.hpp"

namespace elift::observables {

struct Drift {
  double max_abs = 0.0; // max_s |C(s) - C(0)|
  double rel = 0.0;     // max_abs / max(1, |C(0)|)
};

inline Drift drift_down(const PolyObservable& obs,
                        const lift::NaturalSystem& sys,
                        const dynamics::Trajectory& tr) {
  if (tr.size() == 0) throw std::invalid_argument("drift: empty trajectory");
  Drift out;
  double c0 = 0.0;
  for (std::size_t s = 0; s < tr.size(); ++s) {
    lift::DownState st = dynamics::unpack_down(tr.param[s], tr.y[s]);
    double c = eval_down(obs, sys, st);
    if (s == 0) c0 = c;
    out.max_abs = std::max(out.max_abs, std::abs(c - c0));
  }
  out.rel = out.max_abs / std::max(1.0, std::abs(c0));
  return out;
}

inline Drift drift_up(const LiftedObservable& obs,
                      const lift::NaturalSystem& sys,
                      const dynamics::Trajectory& tr) {
  if (tr.size() == 0) throw std::invalid_argument("drift: empty trajectory");
  Drift out;
  double c0 = 0.0;
  for (std::size_t s = 0; s < tr.size(); ++s) {
    lift::UpState st = dynamics::unpack_up(tr.y[s]);
    double c = eval_up(obs, sys, st);
    if (s == 0) c0 = c;
    out.max_abs = std::max(out.max_abs, std::abs(c - c0));
  }
  out.rel = out.max_abs / std::max(1.0, std::abs(c0));
  return out;
}

// Off-shell classification of a lifted observable.  On the null shell a
// conserved charge satisfies {C, H} = 0; off shell the bracket generally
// picks up a multiple of H itself, {C, H} = f H, with f polynomial in
// momenta of degree m - 1.  Sampling states off the null cone and fitting
// the ratio {C,H}/H recovers f pointwise; fnorm == 0 (numerically) labels
// the charge strictly Killing, nonzero labels it conformal.
struct ConformalFit {
  std::vector<lift::UpState> base; // null representatives used for reporting
  Eigen::VectorXd f_values;        // fitted f at each base state
  double residual_max = 0.0;       // worst per-state fit residual
  double fnorm = 0.0;              // max_i |f_values(i)|
};

inline ConformalFit conformal_factor(const LiftedObservable& obs,
                                     const lift::NaturalSystem& sys,
                                     int n_base = 50, unsigned seed = 7u) {
  const int d = sys.d();
  const double q = sys.q;
  LiftedObservable H = hamiltonian_up_observable(sys);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mom(-1.5, 1.5);
  const double offsets[6] = {-1.0, -0.3, -0.1, 0.1, 0.3, 1.0};
  const int deg = std::max(1, obs.m); // fit degree in p_u is m - 1; deg coeffs

  ConformalFit fit;
  fit.base.reserve(n_base);
  fit.f_values.resize(n_base);

  for (int b = 0; b < n_base; ++b) {
    lift::UpState st;
    st.x = lift::sample_point(sys.box, rng);
    double t = lift::sample_time(sys.box, rng);
    st.u = -q * t;
    st.v = 0.0;
    st.pv = q;
    st.ph.resize(d);
    for (int i = 0; i < d; ++i) st.ph(i) = mom(rng);
    // null value of p_u from H = p_u p_v + Phi p_v^2 + kinetic = 0
    st.pu = 0.0;
    double rest = lift::hamiltonian_up(sys, st);
    st.pu = -rest / st.pv;

    std::vector<double> pu_probe, ratio;
    for (int k = 0; k < 6; ++k) {
      lift::UpState sk = st;
      sk.pu += offsets[k];
      double hval = lift::hamiltonian_up(sys, sk);
      if (std::abs(hval) < 1e-12) continue;
      pu_probe.push_back(sk.pu);
      ratio.push_back(poisson_up(obs, H, sys, sk) / hval);
    }
    if (static_cast<int>(pu_probe.size()) < deg)
      throw std::runtime_error(
          "conformal_factor: too many probe states landed on the null shell");
    const int rows = static_cast<int>(pu_probe.size());
    Eigen::MatrixXd M(rows, deg);
    Eigen::VectorXd rhs(rows);
    for (int k = 0; k < rows; ++k) {
      rhs(k) = ratio[k];
      double pw = 1.0;
      for (int j = 0; j < deg; ++j, pw *= pu_probe[k]) M(k, j) = pw;
    }
    Eigen::VectorXd coef = M.colPivHouseholderQr().solve(rhs);
    double res = (M * coef - rhs).cwiseAbs().maxCoeff();
    fit.residual_max = std::max(fit.residual_max, res);

    double fval = 0.0, pw = 1.0;
    for (int j = 0; j < deg; ++j, pw *= st.pu) fval += coef(j) * pw;
    fit.f_values(b) = fval;
    fit.base.push_back(st);
  }
  fit.fnorm = fit.f_values.cwiseAbs().maxCoeff();
  return fit;
}

} // namespace elift::observables

#endif
