#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "elift/observables/drift.hpp"

using namespace elift;
namespace obs = elift::observables;

// Curved 2d system with time-dependent metric, gauge field and potential;
// exercises every term of the covariant bracket.
static lift::NaturalSystem curved_system() {
  lift::NaturalSystem sys;
  sys.coords = {2, {"x", "y"}, "t"};
  sys.q = 1.3;
  sys.h = make_jet_autodiff(2, 2, [](const Jet2& t, const std::vector<Jet2>& x) {
    Jet2 off = 0.1 * x[0] * x[1];
    return std::vector<Jet2>{1.0 + 0.2 * sq(x[0]), off, off,
                             1.0 + 0.1 * sq(x[1]) + 0.05 * sq(t)};
  });
  sys.N = make_jet_autodiff(1, 2, [](const Jet2& t, const std::vector<Jet2>& x) {
    return std::vector<Jet2>{0.3 * sq(x[1]) - 0.1 * t * x[1],
                             0.25 * x[0] * x[1]};
  });
  sys.Phi = make_jet_autodiff(0, 2, [](const Jet2& t, const std::vector<Jet2>& x) {
    return std::vector<Jet2>{0.4 * sq(x[0]) + 0.3 * sq(x[1]) +
                             0.1 * t * x[0] + 0.2};
  });
  sys.box.lo = Eigen::Vector2d(-1, -1);
  sys.box.hi = Eigen::Vector2d(1, 1);
  return sys;
}

static lift::NaturalSystem flat_system(int d, double q = 1.0) {
  lift::NaturalSystem sys;
  sys.coords.d = d;
  sys.coords.names.assign(d, "x");
  sys.q = q;
  sys.h = lift::flat_metric(d);
  sys.N = lift::zero_covector(d);
  sys.Phi = lift::zero_scalar(d);
  sys.box.lo = Eigen::VectorXd::Constant(d, -2.0);
  sys.box.hi = Eigen::VectorXd::Constant(d, 2.0);
  return sys;
}

static lift::DownState random_state(const lift::NaturalSystem& sys,
                                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ut(-1.0, 1.0), up(-1.5, 1.5);
  lift::DownState st;
  st.t = ut(rng);
  st.x = lift::sample_point(sys.box, rng);
  st.p.resize(sys.d());
  for (int i = 0; i < sys.d(); ++i) st.p(i) = up(rng);
  return st;
}

static lift::UpState random_up_state(const lift::NaturalSystem& sys,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> un(-1.0, 1.0), up(-1.5, 1.5);
  lift::UpState st;
  st.x = lift::sample_point(sys.box, rng);
  st.u = un(rng) * sys.q;
  st.v = un(rng);
  st.ph.resize(sys.d());
  for (int i = 0; i < sys.d(); ++i) st.ph(i) = up(rng);
  st.pu = up(rng);
  st.pv = sys.q + 0.5 * un(rng); // off the physical leaf as well
  return st;
}

// Random polynomial observable with low-degree coefficient fields.
static obs::PolyObservable random_obs(int d, int m, obs::MomentumBasis basis,
                                      std::mt19937_64& rng,
                                      const std::string& name) {
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  std::vector<JetField> coeffs(m + 1);
  for (int r = 0; r <= m; ++r) {
    const int nc = static_cast<int>(nsym(d, r));
    Eigen::VectorXd a(nc), b(nc), e(nc);
    Eigen::MatrixXd c(nc, d);
    for (int s = 0; s < nc; ++s) {
      a(s) = un(rng);
      b(s) = un(rng);
      e(s) = un(rng);
      for (int i = 0; i < d; ++i) c(s, i) = un(rng);
    }
    coeffs[r] = make_jet_components(nc, d, [=](const Jet2& t,
                                               const std::vector<Jet2>& x) {
      std::vector<Jet2> out;
      out.reserve(nc);
      for (int s = 0; s < nc; ++s) {
        Jet2 comp = Jet2::constant(a(s), 1 + d) + b(s) * t;
        for (int i = 0; i < d; ++i) comp += c(s, i) * x[i];
        comp += e(s) * x[0] * x[(d > 1) ? 1 : 0];
        out.push_back(comp);
      }
      return out;
    });
  }
  return obs::make_poly(d, m, basis, std::move(coeffs), name);
}

// The downstairs Hamiltonian as a polynomial observable in the covariant
// basis: rank-2 coefficient h^{ij}, rank-0 coefficient q^2 Phi.
static obs::PolyObservable hamiltonian_observable(const lift::NaturalSystem& sys) {
  const int d = sys.d();
  std::vector<JetField> coeffs(3);
  coeffs[0] = obs::scale_field(sys.Phi, sys.q * sys.q);
  coeffs[2] = obs::to_sym_components(obs::inverse_metric_field(sys.h));
  return obs::make_poly(d, 2, obs::MomentumBasis::COVARIANT_PI,
                        std::move(coeffs), "hamiltonian");
}

TEST_CASE("hamiltonian observable matches the closed-form evaluation") {
  lift::NaturalSystem sys = curved_system();
  obs::PolyObservable H = hamiltonian_observable(sys);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    lift::DownState st = random_state(sys, rng);
    double direct = lift::hamiltonian_down(sys, st);
    CHECK(std::abs(obs::eval_down(H, sys, st) - direct) <
          1e-13 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("angular momentum observable evaluates as x p_y - y p_x") {
  lift::NaturalSystem sys = flat_system(2);
  std::vector<JetField> coeffs(2);
  coeffs[1] = make_jet_components(2, 2, [](const Jet2&,
                                           const std::vector<Jet2>& x) {
    return std::vector<Jet2>{-1.0 * x[1], x[0]};
  });
  obs::PolyObservable L = obs::make_poly(2, 1, obs::MomentumBasis::CANONICAL_P,
                                         std::move(coeffs), "L");
  lift::DownState st;
  st.t = 0.3;
  st.x = Eigen::Vector2d(0.7, -0.2);
  st.p = Eigen::Vector2d(0.4, 1.1);
  CHECK(obs::eval_down(L, sys, st) ==
        Catch::Approx(0.7 * 1.1 - (-0.2) * 0.4).epsilon(1e-14));
}

TEST_CASE("momentum basis conversion preserves values both ways") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(13);
  obs::PolyObservable A =
      random_obs(2, 2, obs::MomentumBasis::COVARIANT_PI, rng, "A");
  obs::PolyObservable Ap =
      obs::convert_basis(A, sys, obs::MomentumBasis::CANONICAL_P);
  obs::PolyObservable Arr =
      obs::convert_basis(Ap, sys, obs::MomentumBasis::COVARIANT_PI);
  obs::PolyObservable B =
      random_obs(2, 3, obs::MomentumBasis::CANONICAL_P, rng, "B");
  obs::PolyObservable Bp =
      obs::convert_basis(B, sys, obs::MomentumBasis::COVARIANT_PI);

  for (int k = 0; k < 200; ++k) {
    lift::DownState st = random_state(sys, rng);
    CHECK(std::abs(obs::eval_down(A, sys, st) - obs::eval_down(Ap, sys, st)) <
          1e-12);
    CHECK(std::abs(obs::eval_down(A, sys, st) - obs::eval_down(Arr, sys, st)) <
          1e-12);
    CHECK(std::abs(obs::eval_down(B, sys, st) - obs::eval_down(Bp, sys, st)) <
          1e-12);
  }
}

TEST_CASE("downstairs evaluation derivatives match finite differences") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(17);
  obs::PolyObservable A =
      random_obs(2, 3, obs::MomentumBasis::COVARIANT_PI, rng, "A");
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    lift::DownState st = random_state(sys, rng);
    Eigen::VectorXd mom = st.p;
    obs::DownEval ev = obs::eval_down_full(A, st.t, st.x, mom);
    auto val = [&](double t, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& m) {
      return obs::eval_down_full(A, t, x, m).value;
    };
    CHECK(std::abs(ev.dt - (val(st.t + h, st.x, mom) -
                            val(st.t - h, st.x, mom)) / (2 * h)) < 1e-8);
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd xp = st.x, xm = st.x, mp = mom, mm = mom;
      xp(i) += h;
      xm(i) -= h;
      mp(i) += h;
      mm(i) -= h;
      CHECK(std::abs(ev.dx(i) -
                     (val(st.t, xp, mom) - val(st.t, xm, mom)) / (2 * h)) <
            1e-8);
      CHECK(std::abs(ev.dmom(i) -
                     (val(st.t, st.x, mp) - val(st.t, st.x, mm)) / (2 * h)) <
            1e-8);
    }
  }
}

TEST_CASE("lifting an observable preserves its value on lifted states") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(19);
  obs::PolyObservable A =
      random_obs(2, 2, obs::MomentumBasis::CANONICAL_P, rng, "A");
  obs::LiftedObservable Ah = obs::lift_observable(A, sys);
  for (int k = 0; k < 1000; ++k) {
    lift::DownState st = random_state(sys, rng);
    lift::UpState up = lift::lift_state(sys, st);
    double down = obs::eval_down(A, sys, st);
    CHECK(std::abs(obs::eval_up(Ah, sys, up) - down) <
          1e-12 * std::max(1.0, std::abs(down)));
  }
}

TEST_CASE("lifted hamiltonian observable equals the geodesic hamiltonian") {
  lift::NaturalSystem sys = curved_system();
  obs::LiftedObservable Hh = obs::hamiltonian_up_observable(sys);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 200; ++k) {
    lift::UpState st = random_up_state(sys, rng);
    double direct = lift::hamiltonian_up(sys, st);
    CHECK(std::abs(obs::eval_up(Hh, sys, st) - direct) <
          1e-13 * std::max(1.0, std::abs(direct)));
  }
}

// Random lifted observable with every momentum block populated, including
// the p_u blocks a lift never produces.
static obs::LiftedObservable random_lifted(int d, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  obs::LiftedObservable lo = obs::make_lifted(d, m, "random");
  for (int a = 0; a <= m; ++a)
    for (int b = 0; a + b <= m; ++b) {
      const int nc = static_cast<int>(nsym(d, m - a - b));
      Eigen::VectorXd cv(nc), cl(nc), ct(nc);
      for (int s = 0; s < nc; ++s) {
        cv(s) = un(rng);
        cl(s) = un(rng);
        ct(s) = un(rng);
      }
      obs::set_block(lo, a, b,
                     make_jet_components(nc, d, [=](const Jet2& t,
                                                    const std::vector<Jet2>& x) {
                       std::vector<Jet2> out;
                       for (int s = 0; s < nc; ++s)
                         out.push_back(Jet2::constant(cv(s), 1 + d) +
                                       cl(s) * x[s % x.size()] + ct(s) * t);
                       return out;
                     }));
    }
  return lo;
}

TEST_CASE("upstairs evaluation partials match finite differences") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(29);
  obs::LiftedObservable lo = random_lifted(2, 3, rng);
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    lift::UpState st = random_up_state(sys, rng);
    obs::UpEval ev = obs::eval_up_full(lo, sys, st);
    CHECK(std::abs(ev.value - obs::eval_up(lo, sys, st)) < 1e-14);

    auto fd = [&](auto set) {
      lift::UpState sp = st, sm = st;
      set(sp, h);
      set(sm, -h);
      return (obs::eval_up(lo, sys, sp) - obs::eval_up(lo, sys, sm)) / (2 * h);
    };
    CHECK(std::abs(ev.du - fd([](lift::UpState& s, double e) { s.u += e; })) <
          2e-7);
    CHECK(std::abs(ev.dpu -
                   fd([](lift::UpState& s, double e) { s.pu += e; })) < 2e-7);
    CHECK(std::abs(ev.dpv -
                   fd([](lift::UpState& s, double e) { s.pv += e; })) < 2e-7);
    CHECK(std::abs(fd([](lift::UpState& s, double e) { s.v += e; })) < 1e-14);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(ev.dx(i) - fd([i](lift::UpState& s, double e) {
              s.x(i) += e;
            })) < 2e-7);
      CHECK(std::abs(ev.dph(i) - fd([i](lift::UpState& s, double e) {
              s.ph(i) += e;
            })) < 2e-7);
    }
  }
}

TEST_CASE("canonical pairs bracket to the identity") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2; ++i) {
    std::vector<JetField> xc(1);
    xc[0] = make_jet_components(1, 2, [i](const Jet2&,
                                          const std::vector<Jet2>& x) {
      return std::vector<Jet2>{x[i]};
    });
    obs::PolyObservable Xi = obs::make_poly(2, 0, obs::MomentumBasis::CANONICAL_P,
                                            std::move(xc), "x");
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd ej = Eigen::VectorXd::Zero(2);
      ej(j) = 1.0;
      std::vector<JetField> pc(2);
      pc[1] = obs::const_sym_coeff(2, 1, ej);
      obs::PolyObservable Pj = obs::make_poly(
          2, 1, obs::MomentumBasis::CANONICAL_P, std::move(pc), "p");
      const double delta = (i == j) ? 1.0 : 0.0;
      for (int k = 0; k < 20; ++k) {
        lift::DownState st = random_state(sys, rng);
        CHECK(std::abs(obs::poisson_down(Xi, Pj, sys, st) - delta) < 1e-12);
        CHECK(std::abs(obs::poisson_down_canonical(Xi, Pj, sys, st) - delta) <
              1e-12);
      }
    }
  }
}

TEST_CASE("bracket of the hamiltonian with itself vanishes") {
  lift::NaturalSystem sys = curved_system();
  obs::PolyObservable H = hamiltonian_observable(sys);
  std::mt19937_64 rng(37);
  for (int k = 0; k < 30; ++k) {
    lift::DownState st = random_state(sys, rng);
    CHECK(std::abs(obs::poisson_down(H, H, sys, st)) < 1e-11);
  }
}

TEST_CASE("covariant and canonical bracket paths agree") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(41);
  obs::PolyObservable A =
      random_obs(2, 2, obs::MomentumBasis::COVARIANT_PI, rng, "A");
  obs::PolyObservable B =
      random_obs(2, 2, obs::MomentumBasis::CANONICAL_P, rng, "B");
  obs::PolyObservable H = hamiltonian_observable(sys);
  const std::pair<const obs::PolyObservable*, const obs::PolyObservable*>
      pairs[] = {{&A, &B}, {&A, &H}, {&B, &H}};
  for (int k = 0; k < 100; ++k) {
    lift::DownState st = random_state(sys, rng);
    for (auto [F, G] : pairs) {
      double pd = obs::poisson_down(*F, *G, sys, st);
      double pc = obs::poisson_down_canonical(*F, *G, sys, st);
      CHECK(std::abs(pd - pc) < 1e-10 * std::max(1.0, std::abs(pd)));
    }
  }
}

TEST_CASE("bracket is antisymmetric and obeys the product rule") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(43);
  obs::PolyObservable A =
      random_obs(2, 2, obs::MomentumBasis::COVARIANT_PI, rng, "A");

  // B = p_x, C = p_y, and the hand-assembled products BC = p_x p_y,
  // B2 C = x p_x^2 (rank-2 coefficient 2x on the xx slot).
  std::vector<JetField> pc1(2), pc2(2), prod1(3), prod2(3), bx(2);
  pc1[1] = obs::const_sym_coeff(2, 1, Eigen::Vector2d(1, 0));
  pc2[1] = obs::const_sym_coeff(2, 1, Eigen::Vector2d(0, 1));
  prod1[2] = obs::const_sym_coeff(2, 2, Eigen::Vector3d(0, 1, 0));
  prod2[2] = make_jet_components(3, 2, [](const Jet2&,
                                          const std::vector<Jet2>& x) {
    return std::vector<Jet2>{2.0 * x[0], Jet2::constant(0.0, 3),
                             Jet2::constant(0.0, 3)};
  });
  bx[1] = make_jet_components(2, 2, [](const Jet2&,
                                       const std::vector<Jet2>& x) {
    return std::vector<Jet2>{x[0], Jet2::constant(0.0, 3)};
  });
  auto P = obs::MomentumBasis::CANONICAL_P;
  obs::PolyObservable B = obs::make_poly(2, 1, P, std::move(pc1), "px");
  obs::PolyObservable C = obs::make_poly(2, 1, P, std::move(pc2), "py");
  obs::PolyObservable BC = obs::make_poly(2, 2, P, std::move(prod1), "pxpy");
  obs::PolyObservable B2 = obs::make_poly(2, 1, P, std::move(bx), "xpx");
  obs::PolyObservable B2C = obs::make_poly(2, 2, P, std::move(prod2), "xpx2");

  for (int k = 0; k < 50; ++k) {
    lift::DownState st = random_state(sys, rng);
    CHECK(std::abs(obs::poisson_down(A, B, sys, st) +
                   obs::poisson_down(B, A, sys, st)) < 1e-12);
    double lhs1 = obs::poisson_down(A, BC, sys, st);
    double rhs1 = obs::poisson_down(A, B, sys, st) * obs::eval_down(C, sys, st) +
                  obs::eval_down(B, sys, st) * obs::poisson_down(A, C, sys, st);
    CHECK(std::abs(lhs1 - rhs1) < 1e-9);
    double lhs2 = obs::poisson_down(A, B2C, sys, st);
    double rhs2 =
        obs::poisson_down(A, B2, sys, st) * obs::eval_down(B, sys, st) +
        obs::eval_down(B2, sys, st) * obs::poisson_down(A, B, sys, st);
    CHECK(std::abs(lhs2 - rhs2) < 1e-9);
  }
}

TEST_CASE("bracket satisfies the Jacobi identity") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(47);
  obs::PolyObservable A =
      random_obs(2, 2, obs::MomentumBasis::COVARIANT_PI, rng, "A");
  obs::PolyObservable B =
      random_obs(2, 2, obs::MomentumBasis::CANONICAL_P, rng, "B");
  obs::PolyObservable C =
      random_obs(2, 1, obs::MomentumBasis::CANONICAL_P, rng, "C");

  // Outer bracket by finite differences of the inner (implemented) bracket
  // in canonical variables; the sum vanishes only if the implementation
  // agrees with the true bracket.
  const double h = 1e-5;
  auto outer = [&](const obs::PolyObservable& F, const obs::PolyObservable& G1,
                   const obs::PolyObservable& G2, const lift::DownState& st) {
    obs::PolyObservable Fp = obs::convert_basis(F, sys, obs::MomentumBasis::CANONICAL_P);
    obs::DownEval f = obs::eval_down_full(Fp, st.t, st.x, st.p);
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      lift::DownState sp = st, sm = st;
      sp.x(i) += h;
      sm.x(i) -= h;
      double dgx = (obs::poisson_down(G1, G2, sys, sp) -
                    obs::poisson_down(G1, G2, sys, sm)) / (2 * h);
      sp = st;
      sm = st;
      sp.p(i) += h;
      sm.p(i) -= h;
      double dgp = (obs::poisson_down(G1, G2, sys, sp) -
                    obs::poisson_down(G1, G2, sys, sm)) / (2 * h);
      acc += f.dx(i) * dgp - f.dmom(i) * dgx;
    }
    return acc;
  };
  for (int k = 0; k < 20; ++k) {
    lift::DownState st = random_state(sys, rng);
    double J = outer(A, B, C, st) + outer(B, C, A, st) + outer(C, A, B, st);
    CHECK(std::abs(J) < 1e-7);
  }
}

TEST_CASE("upstairs bracket matches its finite-difference oracle") {
  lift::NaturalSystem sys = curved_system();
  std::mt19937_64 rng(53);
  obs::LiftedObservable A = random_lifted(2, 2, rng);
  obs::LiftedObservable B = random_lifted(2, 2, rng);
  obs::LiftedObservable H = obs::hamiltonian_up_observable(sys);
  const std::pair<const obs::LiftedObservable*, const obs::LiftedObservable*>
      pairs[] = {{&A, &B}, {&A, &H}, {&B, &H}};
  for (int k = 0; k < 25; ++k) {
    lift::UpState st = random_up_state(sys, rng);
    for (auto [F, G] : pairs) {
      double an = obs::poisson_up(*F, *G, sys, st);
      double fd = obs::poisson_up_fd(*F, *G, sys, st);
      CHECK(std::abs(an - fd) < 1e-6 * std::max(1.0, std::abs(an)));
    }
    CHECK(std::abs(obs::poisson_up(H, H, sys, st)) < 1e-12);
  }
}

TEST_CASE("boost and translation close on the vertical momentum upstairs") {
  lift::NaturalSystem sys = flat_system(3);
  std::mt19937_64 rng(59);
  for (int i = 0; i < 3; ++i) {
    std::vector<JetField> bc(2);
    bc[0] = make_jet_components(1, 3, [i](const Jet2&,
                                          const std::vector<Jet2>& x) {
      return std::vector<Jet2>{x[i]};
    });
    bc[1] = make_jet_components(3, 3, [i](const Jet2& t,
                                          const std::vector<Jet2>&) {
      std::vector<Jet2> out(3, Jet2::constant(0.0, 4));
      out[i] = -1.0 * t;
      return out;
    });
    obs::PolyObservable boost = obs::make_poly(
        3, 1, obs::MomentumBasis::CANONICAL_P, std::move(bc), "boost");
    obs::LiftedObservable bh = obs::lift_observable(boost, sys);
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd ej = Eigen::VectorXd::Zero(3);
      ej(j) = 1.0;
      std::vector<JetField> pc(2);
      pc[1] = obs::const_sym_coeff(3, 1, ej);
      obs::PolyObservable trans = obs::make_poly(
          3, 1, obs::MomentumBasis::CANONICAL_P, std::move(pc), "trans");
      obs::LiftedObservable th = obs::lift_observable(trans, sys);
      const double delta = (i == j) ? 1.0 : 0.0;

      // Downstairs the pair brackets to a constant (the central mass);
      // upstairs the same pair closes on -delta_ij p_v, an honest
      // generator rather than a central charge.
      for (int k = 0; k < 10; ++k) {
        lift::DownState st = random_state(sys, rng);
        CHECK(std::abs(obs::poisson_down(boost, trans, sys, st) - delta) <
              1e-12);
        lift::UpState up = random_up_state(sys, rng);
        CHECK(std::abs(obs::poisson_up(bh, th, sys, up) + delta * up.pv) <
              1e-12);
      }
    }
  }
}

TEST_CASE("conserved charges have vanishing drift along the flow") {
  lift::NaturalSystem sys = flat_system(3);
  std::vector<JetField> bc(2);
  bc[0] = make_jet_components(1, 3, [](const Jet2&,
                                       const std::vector<Jet2>& x) {
    return std::vector<Jet2>{x[0]};
  });
  bc[1] = make_jet_components(3, 3, [](const Jet2& t,
                                       const std::vector<Jet2>&) {
    return std::vector<Jet2>{-1.0 * t, Jet2::constant(0.0, 4),
                             Jet2::constant(0.0, 4)};
  });
  obs::PolyObservable boost = obs::make_poly(
      3, 1, obs::MomentumBasis::CANONICAL_P, std::move(bc), "boost");

  lift::DownState st0;
  st0.t = 0.0;
  st0.x = Eigen::Vector3d(0.2, -0.1, 0.3);
  st0.p = Eigen::Vector3d(0.5, 0.7, -0.4);
  dynamics::IntegratorConfig cfg;
  cfg.t_end = 2.0;
  dynamics::Trajectory tr = dynamics::flow_down(sys, st0, cfg);
  obs::Drift dr = obs::drift_down(boost, sys, tr);
  CHECK(dr.rel < 1e-10);

  obs::LiftedObservable bh = obs::lift_observable(boost, sys);
  dynamics::IntegratorConfig ucfg;
  ucfg.t_end = -2.0; // lambda runs opposite to t for q = 1
  dynamics::Trajectory utr = dynamics::flow_up(sys, lift::lift_state(sys, st0), ucfg);
  obs::Drift udr = obs::drift_up(bh, sys, utr);
  CHECK(udr.rel < 1e-10);
}

TEST_CASE("conformal factor vanishes for strictly conserved lifts") {
  lift::NaturalSystem sys = flat_system(3);
  std::vector<JetField> pc(2);
  pc[1] = obs::const_sym_coeff(3, 1, Eigen::Vector3d(0, 0, 1));
  obs::PolyObservable trans = obs::make_poly(
      3, 1, obs::MomentumBasis::CANONICAL_P, std::move(pc), "trans");
  obs::LiftedObservable th = obs::lift_observable(trans, sys);
  obs::ConformalFit fit = obs::conformal_factor(th, sys, 40, 3u);
  CHECK(fit.fnorm < 1e-10);
  CHECK(fit.residual_max < 1e-9);
}

TEST_CASE("conformal factor recovers the factor of a conformal vector") {
  // Chat = a(u) p_u + (a'/2) x.p - (a''/4) x^2 p_v with a(u) = u^2 is a
  // conformal Killing vector of the flat lift with factor a'(u) = 2u.
  lift::NaturalSystem sys = flat_system(3);
  obs::LiftedObservable ck = obs::make_lifted(3, 1, "ckv");
  // u = -q t with q = 1, so a = t^2, a' = 2u = -2t, a'' = 2
  obs::set_block(ck, 1, 0,
                 make_jet_components(1, 3, [](const Jet2& t,
                                              const std::vector<Jet2>&) {
                   return std::vector<Jet2>{sq(t)};
                 }));
  obs::set_block(ck, 0, 0,
                 make_jet_components(3, 3, [](const Jet2& t,
                                              const std::vector<Jet2>& x) {
                   std::vector<Jet2> out;
                   for (int i = 0; i < 3; ++i) out.push_back(-1.0 * t * x[i]);
                   return out;
                 }));
  obs::set_block(ck, 0, 1,
                 make_jet_components(1, 3, [](const Jet2&,
                                              const std::vector<Jet2>& x) {
                   Jet2 r2 = sq(x[0]) + sq(x[1]) + sq(x[2]);
                   return std::vector<Jet2>{-0.5 * r2};
                 }));

  // Pointwise identity {C, H} = f H off shell, f = a'(u) = 2u
  obs::LiftedObservable H = obs::hamiltonian_up_observable(sys);
  std::mt19937_64 rng(61);
  for (int k = 0; k < 50; ++k) {
    lift::UpState st = random_up_state(sys, rng);
    double pb = obs::poisson_up(ck, H, sys, st);
    double hv = lift::hamiltonian_up(sys, st);
    CHECK(std::abs(pb - 2.0 * st.u * hv) < 1e-10);
  }

  obs::ConformalFit fit = obs::conformal_factor(ck, sys, 40, 5u);
  CHECK(fit.residual_max < 1e-8);
  CHECK(fit.fnorm > 0.1);
  for (std::size_t b = 0; b < fit.base.size(); ++b)
    CHECK(std::abs(fit.f_values(b) - 2.0 * fit.base[b].u) < 1e-8);
}

TEST_CASE("rank-2 projection of the hamiltonian gives the null relations") {
  lift::NaturalSystem sys = curved_system();
  obs::LiftedObservable H = obs::hamiltonian_up_observable(sys);
  Eigen::Vector2d x(0.3, -0.5);
  obs::Rank2Projection pr = obs::project_rank2(H, sys, 0.2, x);
  CHECK(pr.d0 == 0.0);
  CHECK(pr.d1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(pr.d2 == Catch::Approx(-1.0));
  CHECK(pr.d3.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(pr.d4) < 1e-14);
}
