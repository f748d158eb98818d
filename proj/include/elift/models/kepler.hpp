#ifndef ELIFT_MODELS_KEPLER_HPP
#define ELIFT_MODELS_KEPLER_HPP

#include "types.hpp"

namespace elift::models {

// Inverse-square attraction, optionally with a decaying coupling
//   G(t) M = g0m * a / |t - c|,   scale factor Omega(t) = -(t - c) / a,
// the defaults a = 1, c = -2 giving G(t) M = g0m / (t + 2) on t > -2.
// The static problem keeps angular momentum and the eccentricity vector;
// the decaying coupling keeps both as well, the eccentricity components
// acquiring a time-dependent tensor scale and a compensating linear term.

namespace detail {

inline Jet2 kepler_gm(const Jet2& t, double g0m, bool decaying, double a,
                      double c) {
  if (!decaying) return Jet2::constant(g0m, t.slots());
  return (g0m * a) * inv(t - c);
}

inline Jet2 kepler_omega(const Jet2& t, bool decaying, double a, double c) {
  if (!decaying) return Jet2::constant(1.0, t.slots());
  return (-1.0 / a) * (t - c);
}

} // namespace detail

inline lift::NaturalSystem kepler_natural_system(double g0m, bool decaying,
                                                 double a, double c) {
  lift::NaturalSystem sys;
  sys.coords = {3, {"x", "y", "z"}, "t"};
  sys.q = 1.0;
  sys.h = lift::flat_metric(3);
  sys.N = lift::zero_covector(3);
  sys.Phi = make_jet_autodiff(0, 3, [g0m, decaying, a, c](
                                        const Jet2& t,
                                        const std::vector<Jet2>& x) {
    Jet2 r = sqrt(sq(x[0]) + sq(x[1]) + sq(x[2]));
    return std::vector<Jet2>{-1.0 * detail::kepler_gm(t, g0m, decaying, a, c) *
                             inv(r)};
  });
  sys.box.lo = Eigen::Vector3d(0.4, 0.4, 0.4);
  sys.box.hi = Eigen::Vector3d(1.3, 1.3, 1.3);
  sys.box.t_lo = -1.0;
  sys.box.t_hi = 3.0;
  return sys;
}

// Second-rank blocks of the eccentricity component along W. When the
// coupling decays the quadratic part is rescaled by Omega(t) and a
// compensating momentum-linear block (1/a)(r^2 W - x (x.W)) appears.
inline killing::Rank2Blocks eccentricity_blocks(double g0m, bool decaying,
                                                double a, double c,
                                                const Eigen::Vector3d& W) {
  killing::Rank2Blocks blk;
  auto omega = [decaying, a, c](const Jet2& t) {
    return detail::kepler_omega(t, decaying, a, c);
  };
  blk.d0 = lift::zero_scalar(3);
  blk.d1 = lift::zero_covector(3);
  blk.d2 = make_jet_components(1, 3, [omega, W](const Jet2& t,
                                                const std::vector<Jet2>& x) {
    Jet2 xw = W(0) * x[0] + W(1) * x[1] + W(2) * x[2];
    return std::vector<Jet2>{-2.0 * omega(t) * xw};
  });
  blk.Cij = make_jet_components(6, 3, [omega, W](const Jet2& t,
                                                 const std::vector<Jet2>& x) {
    SymLayout L(3, 2);
    Jet2 om = omega(t);
    std::vector<Jet2> out(6);
    for (int s = 0; s < 6; ++s) {
      const auto& u = L.tuple(s);
      out[s] = om * (W(u[0]) * x[u[1]] + W(u[1]) * x[u[0]]);
    }
    return out;
  });
  if (decaying) {
    blk.d3 = make_jet_components(3, 3, [W, a](const Jet2&,
                                              const std::vector<Jet2>& x) {
      Jet2 r2 = sq(x[0]) + sq(x[1]) + sq(x[2]);
      Jet2 xw = W(0) * x[0] + W(1) * x[1] + W(2) * x[2];
      return std::vector<Jet2>{(1.0 / a) * (r2 * W(0) - x[0] * xw),
                               (1.0 / a) * (r2 * W(1) - x[1] * xw),
                               (1.0 / a) * (r2 * W(2) - x[2] * xw)};
    });
  } else {
    blk.d3 = lift::zero_covector(3);
  }
  blk.d4 = make_jet_components(1, 3, [omega, g0m, decaying, a, c, W](
                                         const Jet2& t,
                                         const std::vector<Jet2>& x) {
    Jet2 r = sqrt(sq(x[0]) + sq(x[1]) + sq(x[2]));
    Jet2 xw = W(0) * x[0] + W(1) * x[1] + W(2) * x[2];
    return std::vector<Jet2>{omega(t) *
                             detail::kepler_gm(t, g0m, decaying, a, c) * xw *
                             inv(r)};
  });
  return blk;
}

inline ModelEntry make_kepler(const ParamMap& overrides = {}) {
  require_keys(overrides, {"g0m", "decaying", "a", "c"}, "kepler");
  const double g0m = param(overrides, "g0m", 1.0);
  const bool decaying = param(overrides, "decaying", 1.0) != 0.0;
  const double a = param(overrides, "a", 1.0);
  const double c = param(overrides, "c", -2.0);

  ModelEntry e;
  e.id = "kepler";
  e.title = decaying ? "inverse-square attraction with decaying coupling"
                     : "inverse-square attraction";
  e.constants = {{"g0m", g0m},
                 {"decaying", decaying ? 1.0 : 0.0},
                 {"a", a},
                 {"c", c}};
  e.horizon = 6.3;
  e.sys = kepler_natural_system(g0m, decaying, a, c);

  const char axis[3] = {'x', 'y', 'z'};
  for (int k = 0; k < 3; ++k) {
    NamedObservable o;
    o.name = std::string("angular_momentum_") + axis[k];
    o.note = "component of x cross Pi; the potential is central";
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    std::vector<MonoTerm> terms;
    terms.push_back({{j}, 1.0, [i](const Jet2&, const std::vector<Jet2>& x) {
                       return x[i];
                     }});
    terms.push_back({{i}, -1.0, [j](const Jet2&, const std::vector<Jet2>& x) {
                       return x[j];
                     }});
    o.down = make_monomials(3, observables::MomentumBasis::COVARIANT_PI,
                            std::move(terms), o.name);
    o.expected = killing::Classification::KILLING;
    killing::Rank1Fields f;
    f.Cu = lift::zero_scalar(3);
    f.C1 = make_jet_components(3, 3, [k](const Jet2&,
                                         const std::vector<Jet2>& x) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      std::vector<Jet2> out(3, Jet2::constant(0.0, x[0].slots()));
      out[j] = x[i];
      out[i] = -1.0 * x[j];
      return out;
    });
    f.C0 = lift::zero_scalar(3);
    o.rank1 = f;
    e.observables.push_back(std::move(o));
  }

  for (int k = 0; k < 3; ++k) {
    NamedObservable o;
    o.name = std::string("runge_lenz_") + axis[k];
    o.note = decaying
                 ? "eccentricity component with the time-dependent tensor "
                   "scale and its compensating linear block"
                 : "eccentricity (Laplace) vector component";
    killing::Rank2Blocks blk =
        eccentricity_blocks(g0m, decaying, a, c, Eigen::Vector3d::Unit(k));
    o.down = killing::rank2_observable(e.sys, blk, o.name);
    o.rank2 = blk;
    o.expected = decaying ? killing::Classification::CONFORMAL
                          : killing::Classification::KILLING;
    e.observables.push_back(std::move(o));
  }

  if (decaying) {
    // control: the frozen static-form blocks are NOT conserved once the
    // coupling decays
    NamedObservable o;
    o.name = "classical_rl_x";
    o.note = "static-form eccentricity blocks on the decaying coupling; "
             "kept as a deliberately broken control";
    killing::Rank2Blocks blk =
        eccentricity_blocks(g0m, false, a, c, Eigen::Vector3d::UnitX());
    o.down = killing::rank2_observable(e.sys, blk, o.name);
    o.rank2 = blk;
    o.expected = killing::Classification::KILLING;
    o.conserved = false;
    e.observables.push_back(std::move(o));
  }

  lift::DownState s0;
  s0.t = 0.0;
  s0.x = Eigen::Vector3d(1.0, 0.0, 0.0);
  s0.p = Eigen::Vector3d(0.0, 1.2, 0.1);
  e.initial_states.push_back(s0);

  e.regimes.push_back({"decaying",
                       {{"decaying", 1.0}},
                       true,
                       "coupling G(t) M = g0m a / |t - c|"});
  e.regimes.push_back({"static",
                       {{"decaying", 0.0}},
                       true,
                       "constant coupling; the classic closed problem"});
  e.notes = {"angular momentum is conserved in both regimes; the "
             "eccentricity components survive the decaying coupling with a "
             "linear-in-time tensor scale",
             "the decaying problem maps to the static one by the "
             "inverse-linear cosmological time map"};
  return e;
}

} // namespace elift::models

#endif
