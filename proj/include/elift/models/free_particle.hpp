#ifndef ELIFT_MODELS_FREE_PARTICLE_HPP
#define ELIFT_MODELS_FREE_PARTICLE_HPP

#include "types.hpp"

namespace elift::models {

// --- the flat symmetry family -----------------------------------------------
//
// The lifted vector fields of the flat d=3 lift form a thirteen-parameter
// family,
//   Chat^u = g0 + g1 t + g2 t^2,
//   C_(1)  = -1/2 (g1 + 2 g2 t) x + alpha + beta t + x cross delta,
//   C_(0)  = 1/2 g2 x^2 - beta.x + mu,
// whose charges are energy, dilatation, expansion, momenta, boosts,
// angular momenta and the vertical mass. A magnetic pole term only keeps
// the g-tower, the rotations (with a radial correction to C_(0)) and the
// mass.
struct FlatFamilyParams {
  double g0 = 0, g1 = 0, g2 = 0, mu = 0;
  Eigen::Vector3d alpha = Eigen::Vector3d::Zero();
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
  Eigen::Vector3d delta = Eigen::Vector3d::Zero();
  double eg = 0.0;  // pole strength entering C_(0) through -eg delta.x/r
};

inline killing::Rank1Fields flat_family_fields(const FlatFamilyParams& P) {
  killing::Rank1Fields f;
  f.Cu = make_jet_components(1, 3, [P](const Jet2& t, const std::vector<Jet2>&) {
    return std::vector<Jet2>{Jet2::constant(P.g0, t.slots()) + P.g1 * t +
                             P.g2 * sq(t)};
  });
  f.C1 = make_jet_components(3, 3, [P](const Jet2& t,
                                       const std::vector<Jet2>& x) {
    Jet2 s = -0.5 * (P.g1 + 2.0 * P.g2 * t);
    std::vector<Jet2> out(3);
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      out[i] = s * x[i] + Jet2::constant(P.alpha(i), t.slots()) +
               P.beta(i) * t + x[j] * P.delta(k) - x[k] * P.delta(j);
    }
    return out;
  });
  f.C0 = make_jet_components(1, 3, [P](const Jet2& t,
                                       const std::vector<Jet2>& x) {
    Jet2 x2 = sq(x[0]) + sq(x[1]) + sq(x[2]);
    Jet2 c = 0.5 * P.g2 * x2 + Jet2::constant(P.mu, t.slots()) -
             (P.beta(0) * x[0] + P.beta(1) * x[1] + P.beta(2) * x[2]);
    if (P.eg != 0.0 && P.delta.norm() != 0.0) {
      Jet2 xd = P.delta(0) * x[0] + P.delta(1) * x[1] + P.delta(2) * x[2];
      c = c - P.eg * xd * inv(sqrt(x2));
    }
    return std::vector<Jet2>{c};
  });
  return f;
}

namespace detail {

// dilatation / expansion / energy tower, momentum basis = covariant Pi
inline NamedObservable energy_obs(int d) {
  NamedObservable o;
  o.name = "energy";
  o.note = "kinetic energy Pi^2/2";
  std::vector<MonoTerm> terms;
  for (int i = 0; i < d; ++i) terms.push_back({{i, i}, 0.5, nullptr});
  o.down = make_monomials(d, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  FlatFamilyParams P;
  P.g0 = 1.0;
  o.rank1 = flat_family_fields(P);
  return o;
}

inline NamedObservable dilatation_obs(int d) {
  NamedObservable o;
  o.name = "dilatation";
  o.note = "t Pi^2/2 - x.Pi/2, the scaling charge";
  std::vector<MonoTerm> terms;
  for (int i = 0; i < d; ++i)
    terms.push_back({{i, i}, 0.5,
                     [](const Jet2& t, const std::vector<Jet2>&) { return t; }});
  for (int i = 0; i < d; ++i)
    terms.push_back({{i}, -0.5, [i](const Jet2&, const std::vector<Jet2>& x) {
                       return x[i];
                     }});
  o.down = make_monomials(d, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::CONFORMAL;
  FlatFamilyParams P;
  P.g1 = 1.0;
  o.rank1 = flat_family_fields(P);
  return o;
}

inline NamedObservable expansion_obs(int d) {
  NamedObservable o;
  o.name = "expansion";
  o.note = "t^2 Pi^2/2 - t x.Pi + x^2/2, the special conformal charge";
  std::vector<MonoTerm> terms;
  for (int i = 0; i < d; ++i)
    terms.push_back({{i, i}, 0.5, [](const Jet2& t, const std::vector<Jet2>&) {
                       return sq(t);
                     }});
  for (int i = 0; i < d; ++i)
    terms.push_back({{i}, -1.0, [i](const Jet2& t, const std::vector<Jet2>& x) {
                       return t * x[i];
                     }});
  terms.push_back({{}, 0.5, [d](const Jet2&, const std::vector<Jet2>& x) {
                     Jet2 x2 = sq(x[0]);
                     for (int i = 1; i < d; ++i) x2 += sq(x[i]);
                     return x2;
                   }});
  o.down = make_monomials(d, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::CONFORMAL;
  FlatFamilyParams P;
  P.g2 = 1.0;
  o.rank1 = flat_family_fields(P);
  return o;
}

inline NamedObservable mass_obs(int d) {
  NamedObservable o;
  o.name = "mass";
  o.note = "the vertical charge; a constant downstairs";
  o.down = make_monomials(d, observables::MomentumBasis::COVARIANT_PI,
                          {{{}, 1.0, nullptr}}, o.name);
  o.expected = killing::Classification::KILLING;
  FlatFamilyParams P;
  P.mu = 1.0;
  o.rank1 = flat_family_fields(P);
  return o;
}

inline NamedObservable angular_momentum_obs(int d, int k, double eg) {
  NamedObservable o;
  const char axis[3] = {'x', 'y', 'z'};
  o.name = std::string("angular_momentum_") + axis[k];
  o.note = eg == 0.0 ? "component of x cross Pi"
                     : "component of x cross Pi plus the radial pole term";
  const int i = (k + 1) % 3, j = (k + 2) % 3;
  std::vector<MonoTerm> terms;
  terms.push_back({{j}, 1.0, [i](const Jet2&, const std::vector<Jet2>& x) {
                     return x[i];
                   }});
  terms.push_back({{i}, -1.0, [j](const Jet2&, const std::vector<Jet2>& x) {
                     return x[j];
                   }});
  if (eg != 0.0)
    terms.push_back({{}, eg, [k](const Jet2&, const std::vector<Jet2>& x) {
                       return x[k] * inv(sqrt(sq(x[0]) + sq(x[1]) + sq(x[2])));
                     }});
  o.down = make_monomials(d, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  FlatFamilyParams P;
  P.delta = -Eigen::Vector3d::Unit(k);
  P.eg = eg;
  o.rank1 = flat_family_fields(P);
  return o;
}

inline NamedObservable momentum_obs(int d, int k) {
  NamedObservable o;
  const char axis[3] = {'x', 'y', 'z'};
  o.name = std::string("momentum_") + axis[k];
  o.note = "translation charge Pi_k";
  o.down = make_monomials(d, observables::MomentumBasis::COVARIANT_PI,
                          {{{k}, 1.0, nullptr}}, o.name);
  o.expected = killing::Classification::KILLING;
  FlatFamilyParams P;
  P.alpha = Eigen::Vector3d::Unit(k);
  o.rank1 = flat_family_fields(P);
  return o;
}

inline NamedObservable boost_obs(int d, int k) {
  NamedObservable o;
  const char axis[3] = {'x', 'y', 'z'};
  o.name = std::string("boost_") + axis[k];
  o.note = "center-of-mass charge x_k - t Pi_k";
  std::vector<MonoTerm> terms;
  terms.push_back({{k}, -1.0, [](const Jet2& t, const std::vector<Jet2>&) {
                     return t;
                   }});
  terms.push_back({{}, 1.0, [k](const Jet2&, const std::vector<Jet2>& x) {
                     return x[k];
                   }});
  o.down = make_monomials(d, observables::MomentumBasis::COVARIANT_PI,
                          std::move(terms), o.name);
  o.expected = killing::Classification::KILLING;
  FlatFamilyParams P;
  P.beta = -Eigen::Vector3d::Unit(k);
  o.rank1 = flat_family_fields(P);
  return o;
}

} // namespace detail

// Free particle on flat three-space: the full thirteen-charge algebra.
inline ModelEntry make_free_particle(const ParamMap& overrides = {}) {
  require_keys(overrides, {}, "free-particle");
  ModelEntry e;
  e.id = "free-particle";
  e.title = "free particle on flat three-space";
  e.horizon = 50.0;

  lift::NaturalSystem sys;
  sys.coords = {3, {"x", "y", "z"}, "t"};
  sys.q = 1.0;
  sys.h = lift::flat_metric(3);
  sys.N = lift::zero_covector(3);
  sys.Phi = lift::zero_scalar(3);
  sys.box.lo = Eigen::Vector3d(-2, -2, -2);
  sys.box.hi = Eigen::Vector3d(2, 2, 2);
  sys.box.t_lo = -2.0;
  sys.box.t_hi = 2.0;
  e.sys = sys;

  e.observables.push_back(detail::energy_obs(3));
  e.observables.push_back(detail::dilatation_obs(3));
  e.observables.push_back(detail::expansion_obs(3));
  for (int k = 0; k < 3; ++k)
    e.observables.push_back(detail::momentum_obs(3, k));
  for (int k = 0; k < 3; ++k)
    e.observables.push_back(detail::boost_obs(3, k));
  for (int k = 0; k < 3; ++k)
    e.observables.push_back(detail::angular_momentum_obs(3, k, 0.0));
  e.observables.push_back(detail::mass_obs(3));

  lift::DownState s0;
  s0.t = 0.0;
  s0.x = Eigen::Vector3d(0.4, -0.3, 0.5);
  s0.p = Eigen::Vector3d(0.06, 0.02, -0.04);
  e.initial_states.push_back(s0);

  e.regimes.push_back({"default", {}, true,
                       "parameter free; every charge is conserved"});
  e.notes = {"thirteen-charge symmetry family: time translation, dilatation, "
             "expansion, three momenta, three boosts, three rotations, mass",
             "dilatation and expansion lift to conformal generators with "
             "factors 1 and 2t; all others are strict"};
  return e;
}

// The same flat space threaded by a magnetic pole of strength eg. The
// gauge field is regular away from the negative z axis (north patch);
// the mirrored patch below is regular away from the positive axis.
enum class PolePatch { NORTH, SOUTH };

inline lift::NaturalSystem monopole_system(double eg,
                                           PolePatch patch = PolePatch::NORTH) {
  lift::NaturalSystem sys;
  sys.coords = {3, {"x", "y", "z"}, "t"};
  sys.q = 1.0;
  sys.h = lift::flat_metric(3);
  const double sgn = patch == PolePatch::NORTH ? 1.0 : -1.0;
  sys.N = make_jet_autodiff(1, 3, [eg, sgn](const Jet2&,
                                            const std::vector<Jet2>& x) {
    Jet2 r = sqrt(sq(x[0]) + sq(x[1]) + sq(x[2]));
    Jet2 w = (sgn * eg) * inv(r * (r + sgn * x[2]));
    return std::vector<Jet2>{-1.0 * x[1] * w, x[0] * w,
                             Jet2::constant(0.0, x[0].slots())};
  });
  sys.Phi = lift::zero_scalar(3);
  if (patch == PolePatch::NORTH) {
    sys.box.lo = Eigen::Vector3d(-1.0, -1.0, 0.3);
    sys.box.hi = Eigen::Vector3d(1.0, 1.0, 1.3);
  } else {
    sys.box.lo = Eigen::Vector3d(-1.0, -1.0, -1.3);
    sys.box.hi = Eigen::Vector3d(1.0, 1.0, -0.3);
  }
  sys.box.t_lo = -1.0;
  sys.box.t_hi = 1.0;
  return sys;
}

inline ModelEntry make_monopole(const ParamMap& overrides = {}) {
  require_keys(overrides, {"eg"}, "monopole");
  const double eg = param(overrides, "eg", 0.6);
  ModelEntry e;
  e.id = "monopole";
  e.title = "flat space threaded by a magnetic pole";
  e.constants = {{"eg", eg}};
  e.horizon = 50.0;
  e.sys = monopole_system(eg, PolePatch::NORTH);

  // translations and boosts are broken; the seven survivors
  e.observables.push_back(detail::energy_obs(3));
  e.observables.push_back(detail::dilatation_obs(3));
  e.observables.push_back(detail::expansion_obs(3));
  for (int k = 0; k < 3; ++k)
    e.observables.push_back(detail::angular_momentum_obs(3, k, eg));
  e.observables.push_back(detail::mass_obs(3));

  lift::DownState s0;
  s0.t = 0.0;
  s0.x = Eigen::Vector3d(1.0, 0.0, 0.8);
  s0.p = Eigen::Vector3d(0.0, 0.25, 0.10);
  e.initial_states.push_back(s0);

  e.regimes.push_back({"default", {{"eg", eg}}, true,
                       "all seven charges conserved for every pole strength"});
  e.notes = {"the pole keeps seven of the thirteen flat charges: the "
             "time-translation/dilatation/expansion tower, the corrected "
             "rotations, and the mass",
             "gauge patches: northern field regular away from the negative "
             "axis, southern away from the positive axis; they differ by the "
             "gradient of 2 eg atan2(y, x) on the overlap"};
  return e;
}

} // namespace elift::models

#endif
