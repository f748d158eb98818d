#ifndef ELIFT_MODELS_HENON_HEILES_HPP
#define ELIFT_MODELS_HENON_HEILES_HPP

#include "types.hpp"

namespace elift::models {

// Planar cubic oscillator
//   Phi = 1/2 (omega1 x^2 + omega2 y^2) + alpha x y^2 - beta/3 x^3
// (omega1, omega2 are the squared frequencies). Three parameter windows
// carry a polynomial second invariant:
//   K1 (quartic)  at beta = -alpha,   omega1 = omega2,
//   K2 (quadratic in momenta) at beta = -6 alpha, any frequencies,
//   K3 (quartic)  at beta = -16 alpha, omega1 = 16 omega2.
// Away from these windows the motion is generically chaotic.
inline lift::NaturalSystem henon_heiles_system(double omega1, double omega2,
                                               double alpha, double beta) {
  lift::NaturalSystem sys;
  sys.coords = {2, {"x", "y"}, "t"};
  sys.q = 1.0;
  sys.h = lift::flat_metric(2);
  sys.N = lift::zero_covector(2);
  sys.Phi = make_jet_autodiff(0, 2, [omega1, omega2, alpha, beta](
                                        const Jet2&,
                                        const std::vector<Jet2>& x) {
    return std::vector<Jet2>{0.5 * (omega1 * sq(x[0]) + omega2 * sq(x[1])) +
                             alpha * x[0] * sq(x[1]) -
                             (beta / 3.0) * sq(x[0]) * x[0]};
  });
  sys.box.lo = Eigen::Vector2d(-0.4, -0.4);
  sys.box.hi = Eigen::Vector2d(0.4, 0.4);
  sys.box.t_lo = 0.0;
  sys.box.t_hi = 1.0;
  return sys;
}

namespace detail {

inline NamedObservable hh_k1(double omega2, double alpha, bool conserved) {
  NamedObservable o;
  o.name = "K1";
  o.note = "square of the cubic quantity 3 p_x p_y + alpha y (3x^2 + y^2) "
           "+ 3 omega2 x y";
  auto U = [omega2, alpha](const Jet2&, const std::vector<Jet2>& x) {
    return alpha * x[1] * (3.0 * sq(x[0]) + sq(x[1])) +
           (3.0 * omega2) * x[0] * x[1];
  };
  std::vector<MonoTerm> terms;
  terms.push_back({{0, 0, 1, 1}, 9.0, nullptr});
  terms.push_back({{0, 1}, 6.0, U});
  terms.push_back({{}, 1.0, [U](const Jet2& t, const std::vector<Jet2>& x) {
                     return sq(U(t, x));
                   }});
  o.down = make_monomials(2, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  o.conserved = conserved;
  return o;
}

inline NamedObservable hh_k2(double omega1, double omega2, double alpha,
                             bool conserved) {
  NamedObservable o;
  o.name = "K2";
  o.note = "momentum-quadratic invariant of the beta = -6 alpha window";
  const double w = 4.0 * omega2 - omega1;
  std::vector<MonoTerm> terms;
  terms.push_back({{0, 1}, 4.0 * alpha,
                   [](const Jet2&, const std::vector<Jet2>& x) {
                     return x[1];
                   }});
  terms.push_back({{1, 1}, 1.0,
                   [alpha, w](const Jet2&, const std::vector<Jet2>& x) {
                     return Jet2::constant(w, x[0].slots()) -
                            4.0 * alpha * x[0];
                   }});
  terms.push_back({{}, 1.0,
                   [omega2, alpha, w](const Jet2&, const std::vector<Jet2>& x) {
                     return (w * omega2) * sq(x[1]) +
                            (alpha * alpha) * sq(x[1]) *
                                (4.0 * sq(x[0]) + sq(x[1])) +
                            (4.0 * alpha * omega2) * x[0] * sq(x[1]);
                   }});
  o.down = make_monomials(2, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  o.conserved = conserved;
  return o;
}

inline NamedObservable hh_k3(double omega2, double alpha, bool conserved) {
  NamedObservable o;
  o.name = "K3";
  o.note = "momentum-quartic invariant of the beta = -16 alpha window";
  std::vector<MonoTerm> terms;
  terms.push_back({{1, 1, 1, 1}, 9.0, nullptr});
  terms.push_back({{1, 1}, 1.0,
                   [omega2, alpha](const Jet2&, const std::vector<Jet2>& x) {
                     return (18.0 * omega2) * sq(x[1]) +
                            (36.0 * alpha) * x[0] * sq(x[1]);
                   }});
  terms.push_back({{0, 1}, -12.0 * alpha,
                   [](const Jet2&, const std::vector<Jet2>& x) {
                     return sq(x[1]) * x[1];
                   }});
  terms.push_back({{}, 1.0,
                   [omega2, alpha](const Jet2&, const std::vector<Jet2>& x) {
                     Jet2 y4 = sq(sq(x[1]));
                     return (9.0 * omega2 * omega2) * y4 -
                            (2.0 * alpha * alpha) * y4 *
                                (6.0 * sq(x[0]) + sq(x[1])) -
                            (12.0 * alpha * omega2) * x[0] * y4;
                   }});
  o.down = make_monomials(2, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  o.conserved = conserved;
  return o;
}

} // namespace detail

inline ModelEntry make_henon_heiles(const ParamMap& overrides = {}) {
  require_keys(overrides, {"omega1", "omega2", "alpha", "beta"},
               "henon-heiles");
  const double omega1 = param(overrides, "omega1", 1.0);
  const double omega2 = param(overrides, "omega2", 1.0);
  const double alpha = param(overrides, "alpha", 1.0);
  const double beta = param(overrides, "beta", 1.0);
  const double tol = 1e-9;
  const bool in1 = std::abs(beta + alpha) < tol &&
                   std::abs(omega1 - omega2) < tol;
  const bool in2 = std::abs(beta + 6.0 * alpha) < tol;
  const bool in3 = std::abs(beta + 16.0 * alpha) < tol &&
                   std::abs(omega1 - 16.0 * omega2) < tol;

  ModelEntry e;
  e.id = "henon-heiles";
  e.title = "planar cubic oscillator";
  e.constants = {{"omega1", omega1},
                 {"omega2", omega2},
                 {"alpha", alpha},
                 {"beta", beta}};
  e.horizon = 100.0;
  e.sys = henon_heiles_system(omega1, omega2, alpha, beta);

  e.observables.push_back(detail::hh_k1(omega2, alpha, in1));
  e.observables.push_back(detail::hh_k2(omega1, omega2, alpha, in2));
  e.observables.push_back(detail::hh_k3(omega2, alpha, in3));

  lift::DownState s0;
  s0.t = 0.0;
  if (in2) {
    s0.x = Eigen::Vector2d(0.0, 0.02);
    s0.p = Eigen::Vector2d(0.06, 0.0);
  } else if (in1) {
    s0.x = Eigen::Vector2d(0.0, 0.1);
    s0.p = Eigen::Vector2d(0.12, 0.05);
  } else if (in3) {
    s0.x = Eigen::Vector2d(0.02, 0.02);
    s0.p = Eigen::Vector2d(0.1, 0.1);
  } else {
    s0.x = Eigen::Vector2d(0.0, 0.25);
    s0.p = Eigen::Vector2d(0.35, 0.2);
  }
  e.initial_states.push_back(s0);

  e.regimes.push_back({"sk",
                       {{"alpha", 1.0},
                        {"beta", -1.0},
                        {"omega1", 1.0},
                        {"omega2", 1.0}},
                       true,
                       "equal frequencies, beta = -alpha: K1 closes"});
  e.regimes.push_back({"kdv5",
                       {{"alpha", 1.0},
                        {"beta", -6.0},
                        {"omega1", 1.0},
                        {"omega2", 1.0}},
                       true,
                       "beta = -6 alpha: K2 closes for any frequencies"});
  e.regimes.push_back({"kk",
                       {{"alpha", 1.0},
                        {"beta", -16.0},
                        {"omega1", 16.0},
                        {"omega2", 1.0}},
                       true,
                       "beta = -16 alpha, omega1 = 16 omega2: K3 closes"});
  e.regimes.push_back({"chaotic",
                       {{"alpha", 1.0},
                        {"beta", 1.0},
                        {"omega1", 1.0},
                        {"omega2", 1.0}},
                       false,
                       "the classic chaotic well"});
  e.notes = {"all three invariants are static polynomials in the momenta, so "
             "each lifts to a strict second- or fourth-rank tensor on its "
             "window",
             "outside the three windows the invariants are deliberately "
             "broken controls"};
  return e;
}

} // namespace elift::models

#endif
