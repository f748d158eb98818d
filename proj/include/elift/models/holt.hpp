#ifndef ELIFT_MODELS_HOLT_HPP
#define ELIFT_MODELS_HOLT_HPP

#include "types.hpp"

namespace elift::models {

// Planar potential with fractional powers,
//   Phi = 3/4 mu x^{4/3} + y^2 x^{-2/3},   x > 0,
// carrying a polynomial second invariant of degree three, four or six in
// the momenta at mu = 1, 6, 16 respectively. The potential confines in
// every direction of the half plane: the x = 0 wall is repulsive whenever
// y != 0.
inline lift::NaturalSystem holt_system(double mu) {
  lift::NaturalSystem sys;
  sys.coords = {2, {"x", "y"}, "t"};
  sys.q = 1.0;
  sys.h = lift::flat_metric(2);
  sys.N = lift::zero_covector(2);
  sys.Phi = make_jet_autodiff(0, 2, [mu](const Jet2&,
                                         const std::vector<Jet2>& x) {
    return std::vector<Jet2>{(0.75 * mu) * pow(x[0], 4.0 / 3.0) +
                             sq(x[1]) * pow(x[0], -2.0 / 3.0)};
  });
  sys.box.lo = Eigen::Vector2d(0.1, -1.5);
  sys.box.hi = Eigen::Vector2d(2.0, 1.5);
  sys.box.t_lo = -1.0;
  sys.box.t_hi = 1.0;
  return sys;
}

namespace detail {

inline NamedObservable holt_order3(bool conserved) {
  NamedObservable o;
  o.name = "order3";
  o.note = "cubic invariant of the mu = 1 window";
  std::vector<MonoTerm> terms;
  terms.push_back({{1, 1, 1}, 1.0, nullptr});
  terms.push_back({{0, 0, 1}, 1.5, nullptr});
  terms.push_back({{1}, 1.0, [](const Jet2&, const std::vector<Jet2>& x) {
                     return -4.5 * pow(x[0], 4.0 / 3.0) +
                            3.0 * sq(x[1]) * pow(x[0], -2.0 / 3.0);
                   }});
  terms.push_back({{0}, 9.0, [](const Jet2&, const std::vector<Jet2>& x) {
                     return pow(x[0], 1.0 / 3.0) * x[1];
                   }});
  o.down = make_monomials(2, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  o.conserved = conserved;
  return o;
}

inline NamedObservable holt_order4(bool conserved) {
  NamedObservable o;
  o.name = "order4";
  o.note = "quartic invariant of the mu = 6 window";
  std::vector<MonoTerm> terms;
  terms.push_back({{1, 1, 1, 1}, 1.0, nullptr});
  terms.push_back({{0, 0, 1, 1}, 2.0, nullptr});
  terms.push_back({{1, 1}, 4.0, [](const Jet2&, const std::vector<Jet2>& x) {
                     return sq(x[1]) * pow(x[0], -2.0 / 3.0);
                   }});
  terms.push_back({{0, 1}, 24.0, [](const Jet2&, const std::vector<Jet2>& x) {
                     return pow(x[0], 1.0 / 3.0) * x[1];
                   }});
  terms.push_back({{}, 72.0, [](const Jet2&, const std::vector<Jet2>& x) {
                     return pow(x[0], 2.0 / 3.0) * sq(x[1]);
                   }});
  o.down = make_monomials(2, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  o.conserved = conserved;
  return o;
}

inline NamedObservable holt_order6(bool conserved) {
  NamedObservable o;
  o.name = "order6";
  o.note = "sextic invariant of the mu = 16 window";
  std::vector<MonoTerm> terms;
  terms.push_back({{1, 1, 1, 1, 1, 1}, 1.0, nullptr});
  terms.push_back({{0, 0, 1, 1, 1, 1}, 3.0, nullptr});
  terms.push_back({{1, 1, 1, 1}, 1.0,
                   [](const Jet2&, const std::vector<Jet2>& x) {
                     return 18.0 * pow(x[0], 4.0 / 3.0) +
                            6.0 * sq(x[1]) * pow(x[0], -2.0 / 3.0);
                   }});
  terms.push_back({{0, 1, 1, 1}, 72.0,
                   [](const Jet2&, const std::vector<Jet2>& x) {
                     return pow(x[0], 1.0 / 3.0) * x[1];
                   }});
  terms.push_back({{1, 1}, 648.0, [](const Jet2&, const std::vector<Jet2>& x) {
                     return pow(x[0], 2.0 / 3.0) * sq(x[1]);
                   }});
  terms.push_back({{}, 648.0, [](const Jet2&, const std::vector<Jet2>& x) {
                     return sq(sq(x[1]));
                   }});
  o.down = make_monomials(2, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  o.conserved = conserved;
  return o;
}

} // namespace detail

inline ModelEntry make_holt(const ParamMap& overrides = {}) {
  require_keys(overrides, {"mu"}, "holt");
  const double mu = param(overrides, "mu", 6.0);
  const double tol = 1e-9;

  ModelEntry e;
  e.id = "holt";
  e.title = "fractional-power planar potential";
  e.constants = {{"mu", mu}};
  e.horizon = 10.0;
  e.sys = holt_system(mu);

  e.observables.push_back(detail::holt_order3(std::abs(mu - 1.0) < tol));
  e.observables.push_back(detail::holt_order4(std::abs(mu - 6.0) < tol));
  e.observables.push_back(detail::holt_order6(std::abs(mu - 16.0) < tol));

  // States picked so the orbit stays clear of the x = 0 wall over the
  // horizon; the steep wells still skim x ~ 0.01 at their reflections.
  lift::DownState s0;
  s0.t = 0.0;
  if (std::abs(mu - 1.0) < tol) {
    s0.x = Eigen::Vector2d(0.8, 1.2);
    s0.p = Eigen::Vector2d(-0.2, 0.9);
  } else if (std::abs(mu - 16.0) < tol) {
    s0.x = Eigen::Vector2d(1.0, 0.5);
    s0.p = Eigen::Vector2d(0.0, 2.6);
  } else if (std::abs(mu - 6.0) < tol) {
    s0.x = Eigen::Vector2d(1.0, 1.6);
    s0.p = Eigen::Vector2d(0.0, 2.6);
  } else {
    s0.x = Eigen::Vector2d(1.0, 0.0);
    s0.p = Eigen::Vector2d(0.0, 2.6);
  }
  e.initial_states.push_back(s0);

  e.regimes.push_back({"mu1", {{"mu", 1.0}}, true,
                       "cubic window"});
  e.regimes.push_back({"mu6", {{"mu", 6.0}}, true,
                       "quartic window (default)"});
  e.regimes.push_back({"mu16", {{"mu", 16.0}}, true,
                       "sextic window"});
  e.regimes.push_back({"generic", {{"mu", 3.0}}, false,
                       "no polynomial invariant expected"});
  e.notes = {"every invariant is static, so on its window it lifts to a "
             "strict tensor of the corresponding rank",
             "trajectories must be kept on the x > 0 half plane; the "
             "admissible region enforces a positive floor"};
  return e;
}

} // namespace elift::models

#endif
