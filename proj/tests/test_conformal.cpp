#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "elift/conformal/bargmann.hpp"
#include "elift/conformal/lorentz.hpp"
#include "elift/conformal/timemap.hpp"
#include "elift/conformal/vlb.hpp"
#include "elift/dynamics/flows.hpp"

using namespace elift;

namespace con = elift::conformal;

namespace {

con::TimeMap square_map() {
  return con::general_map([](double t) { return t * t; },
                          [](double t) { return 2.0 * t; },
                          [](double) { return 2.0; },
                          [](double) { return 0.0; }, 0.05, 3.0);
}

con::TimeMap cubic_map() {
  return con::general_map(
      [](double t) { return t * t * t + 2.0 * t; },
      [](double t) { return 3.0 * t * t + 2.0; },
      [](double t) { return 6.0 * t; },
      [](double) { return 6.0; }, -2.0, 2.0);
}

// The field pair behind the stationary-magnetic-field correspondence:
// B_* = b(x_*/(omega t_*)) / (omega t_*)^2 for divergenceless b, and the
// electric part E_* = -(1/t_*) x_* x B_* that makes the mapped E vanish.
con::MaxwellPair lynden_bell_pair(std::function<Eigen::Vector3d(const Eigen::Vector3d&)> b,
                                  double omega) {
  con::MaxwellPair p;
  auto bstar = [b, omega](double t, const Eigen::VectorXd& x) {
    const double w = omega * t;
    return Eigen::Vector3d(b(x / w) / (w * w));
  };
  p.B = make_jet_numeric(1, 3, [bstar](double t, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(bstar(t, x));
  });
  p.E = make_jet_numeric(1, 3, [bstar](double t, const Eigen::VectorXd& x) {
    Eigen::Vector3d xv = x;
    return Eigen::VectorXd((-1.0 / t) * xv.cross(bstar(t, x)));
  });
  return p;
}

// Linearly polarized vacuum plane wave moving along z.
con::MaxwellPair plane_wave_pair(double e0, double k) {
  con::MaxwellPair p;
  p.E = make_jet_numeric(1, 3, [e0, k](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
    e(0) = e0 * std::cos(k * (x(2) - t));
    return e;
  });
  p.B = make_jet_numeric(1, 3, [e0, k](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
    b(1) = e0 * std::cos(k * (x(2) - t));
    return b;
  });
  return p;
}

lift::NaturalSystem decaying_kepler(double g0m) {
  lift::NaturalSystem sys;
  sys.coords.d = 3;
  sys.q = 1.0;
  sys.h = lift::flat_metric(3);
  sys.N = lift::zero_covector(3);
  sys.Phi = make_jet_autodiff(0, 3, [g0m](const Jet2& t,
                                          const std::vector<Jet2>& x) {
    Jet2 r2 = sq(x[0]) + sq(x[1]) + sq(x[2]);
    Jet2 gm = g0m * inv(t + 2.0);
    return std::vector<Jet2>{-gm * inv(sqrt(r2))};
  });
  sys.box.lo = Eigen::Vector3d(-3, -3, -3);
  sys.box.hi = Eigen::Vector3d(3, 3, 3);
  sys.box.t_lo = -1.0;
  sys.box.t_hi = 3.0;
  sys.box.r_min = 0.3;
  return sys;
}

} // namespace

TEST_CASE("the Schwarzian derivative vanishes exactly on fractional linear maps") {
  con::TimeMap id = con::identity_map();
  CHECK(con::schwarzian(id, 0.3) == 0.0);
  CHECK(con::schwarzian(id, -2.0) == 0.0);

  CHECK(con::schwarzian(square_map(), 1.0) == Catch::Approx(-1.5).margin(1e-14));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> un(-2.0, 2.0);
  int checked = 0;
  while (checked < 1000) {
    const double A = un(rng), B = un(rng), C = un(rng), D = un(rng);
    if (std::abs(A * D - B * C) < 0.1) continue;
    const double t = un(rng);
    if (std::abs(C * t + D) < 0.2) continue;
    con::TimeMap m = con::fractional_linear(A, B, C, D);
    CHECK(std::abs(con::schwarzian(m, t)) < 1e-10);
    ++checked;
  }

  CHECK_THROWS_AS(con::schwarzian(square_map(), 0.0), std::domain_error);
  CHECK_THROWS_AS(con::fractional_linear(1, 2, 2, 4), std::invalid_argument);
}

TEST_CASE("Schwarzian composition follows the cocycle rule") {
  // {f o g, t} = {f}(g(t)) g'(t)^2 + {g}(t)
  auto check_cocycle = [](const con::TimeMap& f, const con::TimeMap& g,
                          double t) {
    con::TimeMap fg = con::compose(f, g);
    const double lhs = con::schwarzian(fg, t);
    const double rhs = con::schwarzian(f, g.f(t)) * g.df(t) * g.df(t) +
                       con::schwarzian(g, t);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-8));
  };

  con::TimeMap fl = con::fractional_linear(2, 1, 1, 3);
  con::TimeMap cub = cubic_map();
  for (double t : {-1.2, 0.4, 1.1}) {
    check_cocycle(cub, fl, t);
    check_cocycle(fl, cub, t);
    check_cocycle(cub, cub, t);
  }

  // fractional linear maps form a group under composition
  con::TimeMap both = con::compose(fl, con::fractional_linear(1, -1, 0.5, 2));
  CHECK(both.kind == con::MapKind::FRACTIONAL_LINEAR);
  CHECK(std::abs(con::schwarzian(both, 0.7)) < 1e-12);
}

TEST_CASE("state transformation round-trips and fixes the reciprocal unit point") {
  con::MapState st;
  st.t = 0.8;
  st.x = Eigen::Vector3d(1.0, -0.5, 0.3);
  st.v = Eigen::Vector3d(0.2, 0.4, -0.1);

  con::MapState same = con::transform_state(con::identity_map(), st);
  CHECK(same.t == st.t);
  CHECK((same.x - st.x).norm() == 0.0);
  CHECK((same.v - st.v).norm() == 0.0);

  // t_* = 1/t fixes t = 1 and has |f'| = 1 there
  con::TimeMap lb = con::lynden_bell_map(1.0);
  con::MapState at1 = st;
  at1.t = 1.0;
  con::MapState mapped = con::transform_state(lb, at1);
  CHECK(mapped.t == Catch::Approx(1.0).margin(1e-15));
  CHECK((mapped.x - at1.x).norm() < 1e-14);

  auto roundtrip = [](const con::TimeMap& m, const con::MapState& s0) {
    con::MapState fwd = con::transform_state(m, s0);
    con::MapState back = con::transform_state(con::inverse_map(m), fwd);
    CHECK(back.t == Catch::Approx(s0.t).margin(1e-12));
    CHECK((back.x - s0.x).norm() < 1e-12);
    CHECK((back.v - s0.v).norm() < 1e-12);
  };
  roundtrip(lb, st);
  roundtrip(con::fractional_linear(1.5, 0.2, 0.4, 1.0), st);
  roundtrip(cubic_map(), st);
}

TEST_CASE("field transformation reproduces the stationary magnetic correspondence") {
  con::MaxwellPair none = con::transform_fields(con::lynden_bell_map(2.0),
                                                con::zero_fields());
  CHECK(none.E.value(0.7, Eigen::Vector3d(1, 2, 3)).norm() == 0.0);
  CHECK(none.B.value(0.7, Eigen::Vector3d(1, 2, 3)).norm() == 0.0);

  const double b0 = 1.7, omega = 1.3;
  auto bconst = [b0](const Eigen::Vector3d&) {
    return Eigen::Vector3d(0, 0, b0);
  };
  con::MaxwellPair star = lynden_bell_pair(bconst, omega);
  con::MaxwellPair mapped = con::transform_fields(con::lynden_bell_map(omega),
                                                  star);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double t = 0.5 + 0.4 * (un(rng) + 1.0);
    Eigen::Vector3d x(un(rng), un(rng), un(rng));
    Eigen::Vector3d B = mapped.B.value(t, x);
    CHECK((B - Eigen::Vector3d(0, 0, -b0)).norm() < 1e-10);
    CHECK(mapped.E.value(t, x).norm() < 1e-10);
  }
}

TEST_CASE("mapped trajectories solve the mapped equation of motion") {
  dynamics::IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;

  con::MapState st0;
  st0.x = Eigen::Vector3d(1.0, 0.2, -0.4);
  st0.v = Eigen::Vector3d(0.3, -0.5, 0.2);

  // identity: the residual is the integrator's own pointwise defect
  {
    con::MaxwellPair wave = plane_wave_pair(0.8, 1.1);
    st0.t = 1.0;
    cfg.t_end = 3.0;
    dynamics::Trajectory tr = con::lorentz_flow(wave, st0, cfg);
    con::SolutionMapReport rep =
        con::verify_solution_map(con::identity_map(), wave, tr);
    CHECK(rep.n_points > 10);
    CHECK(rep.max_residual < 1e-9);
  }

  // fractional linear map: no Schwarzian term anywhere
  {
    con::TimeMap m = con::fractional_linear(2, 1, 1, 1);  // f' = 1/(t+1)^2
    con::MaxwellPair wave = plane_wave_pair(0.6, 0.9);
    st0.t = m.f(0.5);
    cfg.t_end = m.f(2.0);
    dynamics::Trajectory tr = con::lorentz_flow(wave, st0, cfg);
    con::SolutionMapReport rep = con::verify_solution_map(m, wave, tr);
    CHECK(rep.max_residual < 1e-7);
  }

  // t_* = t^2 has {f,t} = -3/(2t^2); the linear term carries the identity
  {
    con::TimeMap m = square_map();
    con::MaxwellPair wave = plane_wave_pair(0.5, 1.3);
    st0.t = m.f(0.7);
    cfg.t_end = m.f(1.5);
    dynamics::Trajectory tr = con::lorentz_flow(wave, st0, cfg);
    con::SolutionMapReport with =
        con::verify_solution_map(m, wave, tr, 1.0, 1.0, true);
    con::SolutionMapReport without =
        con::verify_solution_map(m, wave, tr, 1.0, 1.0, false);
    CHECK(with.max_residual < 1e-7);
    CHECK(without.max_residual > 1e-2);
  }
}

TEST_CASE("the boost-square combination is conserved once the mapped electric field dies") {
  dynamics::IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  cfg.max_step = 5.0;

  con::MapState st0;
  st0.t = 1.0;
  st0.x = Eigen::Vector3d(0.8, -0.3, 0.5);
  st0.v = Eigen::Vector3d(0.1, 0.4, -0.2);
  cfg.t_end = 51.0;

  auto run = [&](std::function<Eigen::Vector3d(const Eigen::Vector3d&)> b,
                 double omega) {
    con::MaxwellPair star = lynden_bell_pair(b, omega);
    dynamics::Trajectory tr = con::lorentz_flow(star, st0, cfg);
    return con::boost_square_invariant(con::lynden_bell_map(omega), tr);
  };

  // uniform b: the classic stationary-field case
  con::BoostSquare uni = run([](const Eigen::Vector3d&) {
    return Eigen::Vector3d(0, 0, 1.4);
  }, 1.0);
  CHECK(uni.first > 0.0);
  CHECK(uni.max_drift < 1e-7);

  // the square survives any divergenceless b, not just the uniform one
  con::BoostSquare shear = run([](const Eigen::Vector3d& xi) {
    return Eigen::Vector3d(-0.6 * xi(1), 0.6 * xi(0), 0.9);
  }, 1.2);
  CHECK(shear.max_drift < 1e-7);

  // for the reciprocal map the combination is literally (x_* - v_* t_*)^2
  {
    con::MaxwellPair star = lynden_bell_pair([](const Eigen::Vector3d&) {
      return Eigen::Vector3d(0, 0, 1.4);
    }, 1.0);
    dynamics::Trajectory tr = con::lorentz_flow(star, st0, cfg);
    con::TimeMap lb = con::lynden_bell_map(1.0);
    con::BoostSquare bs = con::boost_square_invariant(lb, tr);
    const Eigen::Vector3d x0 = tr.y[0].head(3), v0 = tr.y[0].tail(3);
    CHECK(bs.first ==
          Catch::Approx((x0 - tr.param[0] * v0).squaredNorm()).margin(1e-12));
  }

  // free particle: boost invariance makes the square trivially constant
  {
    dynamics::IntegratorConfig free_cfg = cfg;
    free_cfg.t_end = 20.0;
    dynamics::Trajectory tr = con::lorentz_flow(con::zero_fields(), st0, free_cfg);
    con::BoostSquare bs =
        con::boost_square_invariant(con::lynden_bell_map(1.0), tr);
    CHECK(bs.max_drift < 1e-9);
  }

  // f'' = 0 leaves no combination to form
  {
    dynamics::Trajectory tr = con::lorentz_flow(con::zero_fields(), st0, cfg);
    CHECK_THROWS_AS(con::boost_square_invariant(con::identity_map(), tr),
                    std::domain_error);
  }
}

TEST_CASE("the time map induces a conformal scaling of the lifted metric") {
  // starred system: uniform decaying magnetic field via N_* = B_* x x / 2
  auto make_star = [](double b0, double omega, double q) {
    lift::NaturalSystem sys;
    sys.coords.d = 3;
    sys.q = q;
    sys.h = lift::flat_metric(3);
    sys.N = make_jet_autodiff(1, 3, [b0, omega](const Jet2& t,
                                                const std::vector<Jet2>& x) {
      Jet2 pre = 0.5 * b0 * inv(sq(omega * t));
      return std::vector<Jet2>{-pre * x[1], pre * x[0],
                               Jet2::constant(0.0, t.slots())};
    });
    sys.Phi = lift::zero_scalar(3);
    sys.box.lo = Eigen::Vector3d(-2, -2, -2);
    sys.box.hi = Eigen::Vector3d(2, 2, 2);
    return sys;
  };

  lift::NaturalSystem star = make_star(1.5, 1.2, 1.0);
  CHECK(con::verify_bargmann_conformal(con::identity_map(), star, 20, 0.5, 2.0) <
        1e-14);
  CHECK(con::verify_bargmann_conformal(con::lynden_bell_map(1.2), star, 100,
                                       0.5, 2.0) < 1e-9);

  // general fractional linear map, nontrivial charge, anisotropic constant h
  lift::NaturalSystem aniso;
  aniso.coords.d = 3;
  aniso.q = 1.3;
  Eigen::MatrixXd hm = Eigen::Vector3d(1.0, 2.0, 1.5).asDiagonal();
  aniso.h = make_jet_constant(2, 3, Eigen::Map<Eigen::VectorXd>(hm.data(), 9));
  aniso.N = make_jet_autodiff(1, 3, [](const Jet2& t,
                                       const std::vector<Jet2>& x) {
    return std::vector<Jet2>{0.2 * cos(x[1]) + 0.1 * t, -0.1 * sq(x[0]),
                             0.4 * sin(t) * x[2]};
  });
  aniso.Phi = make_jet_autodiff(0, 3, [](const Jet2& t,
                                         const std::vector<Jet2>& x) {
    return std::vector<Jet2>{0.3 * sin(x[2]) * cos(t) + 0.05 * sq(x[0])};
  });
  aniso.box.lo = Eigen::Vector3d(-2, -2, -2);
  aniso.box.hi = Eigen::Vector3d(2, 2, 2);

  con::TimeMap fl = con::fractional_linear(1.0, 0.3, 0.2, 1.0);
  CHECK(con::verify_bargmann_conformal(fl, aniso, 100, -0.8, 1.5) < 1e-9);

  // orientation-reversing branch: sgn(f') = -1 throughout
  con::TimeMap rev = con::fractional_linear(-1.0, 0.2, 0.1, 1.0);
  CHECK(con::verify_bargmann_conformal(rev, aniso, 100, -0.8, 1.5) < 1e-9);
}

TEST_CASE("the conformal Kepler map exports the Runge-Lenz vector") {
  con::VlbParams P;
  P.a = 1.0;
  P.b = 0.7;
  P.c = -2.0;
  P.d = 0.4;

  // Omega transforms consistently between the two time variables
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> un(-0.5, 2.0);
  for (int k = 0; k < 25; ++k) {
    con::VlbState st;
    st.u = un(rng);
    st.v = un(rng);
    st.x = Eigen::Vector3d(un(rng), un(rng), un(rng));
    con::VlbState out = con::vlb_transform(P, st);
    CHECK(con::vlb_omega(P, st.u) ==
          Catch::Approx(con::vlb_omega_star(P, out.u)).margin(1e-12));
    CHECK(out.v == Catch::Approx(st.v + st.x.squaredNorm() /
                                            (2.0 * (st.u + P.b)) +
                                 P.d).margin(1e-14));
  }

  con::VlbState pole;
  pole.u = -P.b;
  pole.x = Eigen::Vector3d(1, 0, 0);
  CHECK_THROWS_AS(con::vlb_transform(P, pole), std::domain_error);
  con::VlbParams bad = P;
  bad.a = 0.0;
  pole.u = 0.0;
  CHECK_THROWS_AS(con::vlb_transform(bad, pole), std::invalid_argument);

  // a -> infinity with b = c = a degenerates to the identity at O(1/a)
  con::VlbParams big;
  big.a = 1e6;
  big.b = big.a;
  big.c = big.a;
  big.d = 0.0;
  con::VlbState st;
  st.u = 0.9;
  st.v = -0.2;
  st.x = Eigen::Vector3d(1.1, -0.6, 0.4);
  con::VlbState out = con::vlb_transform(big, st);
  CHECK((out.x - st.x).norm() < 5.0 / big.a);
  CHECK(std::abs(out.u - st.u) < 5.0 / big.a);
  CHECK(std::abs(out.v - st.v) < 5.0 / big.a);

  // the exported vector is conserved along the decaying-coupling flow
  const double g0m = 2.0;
  lift::NaturalSystem sys = decaying_kepler(g0m);
  con::VlbParams kepler;
  kepler.a = 1.0;
  kepler.c = -2.0;

  dynamics::IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  cfg.t_end = 3.0;
  lift::DownState d0;
  d0.t = 0.0;
  d0.x = Eigen::Vector3d(1.0, 0.0, 0.0);
  d0.p = Eigen::Vector3d(0.0, 1.2, 0.1);
  dynamics::Trajectory tr = dynamics::flow_down(sys, d0, cfg);

  // G-law consistency: the coupling the system integrates is the mapped one
  CHECK(con::vlb_g_law(g0m, kepler, 0.7) == Catch::Approx(g0m / 2.7));

  Eigen::Vector3d W(0.3, -1.1, 0.7);
  double first = 0.0, drift = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    lift::DownState s = dynamics::unpack_down(tr.param[k], tr.y[k]);
    const double aw = con::time_dependent_rl(kepler, g0m, s.t,
                                             s.x, s.p).dot(W);
    if (k == 0) first = aw;
    drift = std::max(drift, std::abs(aw - first));
  }
  CHECK(std::abs(first) > 0.1);
  CHECK(drift < 1e-7);
}
