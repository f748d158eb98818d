#ifndef ELIFT_MODELS_QUANTUM_DOT_HPP
#define ELIFT_MODELS_QUANTUM_DOT_HPP

#include "types.hpp"

namespace elift::models {

// Axial trap in cylindrical coordinates (rho, phi, z): harmonic confinement
// with radial and axial frequencies, a uniform magnetic field B z_hat
// entering through the gauge term N_phi = -B rho^2 / 2, and an attractive
// Coulomb center of strength a. The anisotropy parameter
//   tau = omega_z / sqrt(omega_0^2 + B^2/4)
// controls the hidden second-rank charge: at tau = 2 the cubic-in-momenta
// combination Q1 below is conserved for every coupling a.
inline lift::NaturalSystem quantum_dot_system(double omega0, double omegaz,
                                              double B, double a) {
  lift::NaturalSystem sys;
  sys.coords = {3, {"rho", "phi", "z"}, "t"};
  sys.q = 1.0;
  sys.h = make_jet_autodiff(2, 3, [](const Jet2&,
                                     const std::vector<Jet2>& x) {
    // row-major metric components: diag(1, rho^2, 1)
    std::vector<Jet2> out(9, Jet2::constant(0.0, x[0].slots()));
    out[0] = Jet2::constant(1.0, x[0].slots());
    out[4] = sq(x[0]);
    out[8] = Jet2::constant(1.0, x[0].slots());
    return out;
  });
  sys.N = make_jet_components(3, 3, [B](const Jet2&,
                                        const std::vector<Jet2>& x) {
    std::vector<Jet2> out(3, Jet2::constant(0.0, x[0].slots()));
    out[1] = -0.5 * B * sq(x[0]);
    return out;
  });
  sys.Phi = make_jet_autodiff(0, 3, [omega0, omegaz, a](
                                        const Jet2&,
                                        const std::vector<Jet2>& x) {
    Jet2 r = sqrt(sq(x[0]) + sq(x[2]));
    return std::vector<Jet2>{0.5 * ((omega0 * omega0) * sq(x[0]) +
                                    (omegaz * omegaz) * sq(x[2])) -
                             a * inv(r)};
  });
  sys.box.lo = Eigen::Vector3d(0.3, -3.14159265358979, -1.5);
  sys.box.hi = Eigen::Vector3d(1.8, 3.14159265358979, 1.5);
  sys.box.t_lo = -1.0;
  sys.box.t_hi = 1.0;
  return sys;
}

// Blocks of the hidden charge
//   Q1 = z Pi_rho^2 - rho Pi_rho Pi_z + (z/rho^2) Pi_phi^2
//        + B z Pi_phi - (omega_0^2 rho^2 z + a z / r).
inline killing::Rank2Blocks quantum_dot_q1_blocks(double omega0, double B,
                                                  double a) {
  killing::Rank2Blocks blk;
  blk.d0 = lift::zero_scalar(3);
  blk.d1 = lift::zero_covector(3);
  blk.d2 = lift::zero_scalar(3);
  blk.Cij = make_jet_components(6, 3, [](const Jet2&,
                                         const std::vector<Jet2>& x) {
    SymLayout L(3, 2);
    std::vector<Jet2> out(6, Jet2::constant(0.0, x[0].slots()));
    for (int s = 0; s < 6; ++s) {
      const auto& u = L.tuple(s);
      if (u[0] == 0 && u[1] == 0) out[s] = 2.0 * x[2];
      if (u[0] == 1 && u[1] == 1) out[s] = 2.0 * x[2] * inv(sq(x[0]));
      if (u[0] == 0 && u[1] == 2) out[s] = -1.0 * x[0];
    }
    return out;
  });
  blk.d3 = make_jet_components(3, 3, [B](const Jet2&,
                                         const std::vector<Jet2>& x) {
    std::vector<Jet2> out(3, Jet2::constant(0.0, x[0].slots()));
    out[1] = B * x[2];
    return out;
  });
  blk.d4 = make_jet_components(1, 3, [omega0, a](const Jet2&,
                                                 const std::vector<Jet2>& x) {
    Jet2 r = sqrt(sq(x[0]) + sq(x[2]));
    return std::vector<Jet2>{-1.0 *
                             ((omega0 * omega0) * sq(x[0]) * x[2] +
                              a * x[2] * inv(r))};
  });
  return blk;
}

inline ModelEntry make_quantum_dot(const ParamMap& overrides = {}) {
  require_keys(overrides, {"omega0", "omegaz", "B", "a"}, "quantum-dot");
  const double omega0 = param(overrides, "omega0", 0.86602540378443865);
  const double omegaz = param(overrides, "omegaz", 2.0);
  const double B = param(overrides, "B", 1.0);
  const double a = param(overrides, "a", 0.4);
  const double tau = omegaz / std::sqrt(omega0 * omega0 + 0.25 * B * B);
  const bool q1_closed =
      std::abs(omegaz * omegaz - 4.0 * omega0 * omega0 - B * B) < 1e-9;

  ModelEntry e;
  e.id = "quantum-dot";
  e.title = "axial trap with magnetic field and Coulomb center";
  e.constants = {{"omega0", omega0},
                 {"omegaz", omegaz},
                 {"B", B},
                 {"a", a},
                 {"tau", tau}};
  e.horizon = 50.0;
  e.sys = quantum_dot_system(omega0, omegaz, B, a);

  {
    NamedObservable o;
    o.name = "Q1";
    o.note = "hidden second-rank charge; closes exactly when "
             "omega_z^2 = 4 omega_0^2 + B^2 (tau = 2)";
    killing::Rank2Blocks blk = quantum_dot_q1_blocks(omega0, B, a);
    o.down = killing::rank2_observable(e.sys, blk, o.name);
    o.rank2 = blk;
    o.expected = killing::Classification::KILLING;
    o.conserved = q1_closed;
    e.observables.push_back(std::move(o));
  }
  {
    NamedObservable o;
    o.name = "angular_momentum_z";
    o.note = "canonical momentum conjugate to the axial angle";
    o.down = make_monomials(3, observables::MomentumBasis::CANONICAL_P,
                            {{{1}, 1.0, nullptr}}, o.name);
    killing::Rank1Fields f;
    f.Cu = lift::zero_scalar(3);
    f.C1 = make_jet_constant(1, 3, Eigen::Vector3d(0, 1, 0));
    f.C0 = make_jet_components(1, 3, [B](const Jet2&,
                                         const std::vector<Jet2>& x) {
      return std::vector<Jet2>{0.5 * B * sq(x[0])};
    });
    o.rank1 = f;
    o.expected = killing::Classification::KILLING;
    e.observables.push_back(std::move(o));
  }

  lift::DownState s0;
  s0.t = 0.0;
  s0.x = Eigen::Vector3d(1.0, 0.3, 0.4);
  s0.p = Eigen::Vector3d(0.2, 0.7, -0.3);
  e.initial_states.push_back(s0);

  e.regimes.push_back({"tau2",
                       {{"omega0", 0.86602540378443865},
                        {"omegaz", 2.0},
                        {"B", 1.0}},
                       true,
                       "anisotropy 2: the hidden charge closes"});
  e.regimes.push_back({"tau1",
                       {{"omega0", 1.0}, {"omegaz", 1.0}, {"B", 0.0}},
                       true,
                       "isotropic trap: rotational charges close instead"});
  e.regimes.push_back({"generic",
                       {{"omega0", 1.0}, {"omegaz", 1.37}, {"B", 0.0}},
                       false,
                       "generic anisotropy: only the axial charge survives"});
  e.notes = {"the hidden charge couples the radial and axial motion; its "
             "closure condition ties the axial frequency to the cyclotron- "
             "shifted radial one",
             "the axial angular momentum is conserved for every parameter "
             "choice"};
  return e;
}

} // namespace elift::models

#endif
