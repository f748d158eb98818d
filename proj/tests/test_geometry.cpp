#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "elift/geometry/christoffel.hpp"
#include "elift/lift/natural_system.hpp"

using namespace elift;

static lift::NaturalSystem synthetic_system() {
  // Deliberately messy d=3 system with t-dependence in every field and a
  // q different from 1, to exercise the d/du = -(1/q) d/dt conversion.
  lift::NaturalSystem sys;
  sys.coords = {3, {"x", "y", "z"}, "t"};
  sys.q = 1.3;
  sys.h = make_jet_autodiff(2, 3, [](const Jet2& t, const std::vector<Jet2>& x) {
    std::vector<Jet2> h(9, Jet2::constant(0.0, 4));
    Jet2 w = 0.1 * sin(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        h[i * 3 + j] = (i == j ? Jet2::constant(1.0, 4) : Jet2::constant(0.0, 4)) +
                       w * x[i] * x[j] + 0.05 * x[(i + j) % 3];
    // symmetrize the bias term
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < i; ++j) {
        Jet2 s = (h[i * 3 + j] + h[j * 3 + i]) * 0.5;
        h[i * 3 + j] = s;
        h[j * 3 + i] = s;
      }
    return h;
  });
  sys.N = make_jet_autodiff(1, 3, [](const Jet2& t, const std::vector<Jet2>& x) {
    return std::vector<Jet2>{0.3 * x[1] * cos(t), -0.2 * x[0] + 0.1 * t * x[2],
                             0.05 * sin(x[0] + t)};
  });
  sys.Phi = make_jet_autodiff(0, 3, [](const Jet2& t, const std::vector<Jet2>& x) {
    return std::vector<Jet2>{0.5 * (sq(x[0]) + sq(x[1]) + sq(x[2])) +
                             0.2 * t * x[0] + 0.1 * cos(t)};
  });
  sys.box.lo = Eigen::Vector3d(-0.8, -0.8, -0.8);
  sys.box.hi = Eigen::Vector3d(0.8, 0.8, 0.8);
  return sys;
}

TEST_CASE("flat metric has vanishing connection and unit condition number") {
  JetField h = lift::flat_metric(3);
  geometry::BaseChristoffel bc =
      geometry::christoffel_base(h, 0.0, Eigen::Vector3d(0.2, -0.5, 1.0));
  CHECK(bc.cond == Catch::Approx(1.0));
  for (int i = 0; i < 3; ++i) CHECK(bc.G[i].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("polar metric reproduces the textbook connection") {
  // h = diag(1, r^2) in (r, phi)
  JetField h = make_jet_autodiff(2, 2, [](const Jet2&, const std::vector<Jet2>& x) {
    std::vector<Jet2> out(4, Jet2::constant(0.0, 3));
    out[0] = Jet2::constant(1.0, 3);
    out[3] = sq(x[0]);
    return out;
  });
  const double r = 1.7;
  geometry::BaseChristoffel bc =
      geometry::christoffel_base(h, 0.0, Eigen::Vector2d(r, 0.3));
  CHECK(bc.G[0](1, 1) == Catch::Approx(-r));          // Gamma^r_{phi phi}
  CHECK(bc.G[1](0, 1) == Catch::Approx(1.0 / r));     // Gamma^phi_{r phi}
  CHECK(bc.G[0](0, 0) == Catch::Approx(0.0).margin(1e-14));
  CHECK(bc.G[1](1, 1) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("singular metric raises a domain error") {
  JetField h = make_jet_autodiff(2, 2, [](const Jet2&, const std::vector<Jet2>& x) {
    std::vector<Jet2> out(4, Jet2::constant(0.0, 3));
    out[0] = sq(x[0]);  // degenerates at x=0
    out[3] = Jet2::constant(1.0, 3);
    return out;
  });
  CHECK_THROWS_AS(
      geometry::christoffel_base(h, 0.0, Eigen::Vector2d(0.0, 1.0)),
      std::domain_error);
}

TEST_CASE("closed-form lifted connection matches the generic formula") {
  lift::NaturalSystem sys = synthetic_system();
  std::mt19937_64 rng(42);

  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x = lift::sample_point(sys.box, rng);
    double u = -sys.q * lift::sample_time(sys.box, rng);

    geometry::LiftedChristoffel cf = geometry::christoffel_lifted(sys, u, x);
    auto full = geometry::to_full(cf, sys.d());
    auto gen = geometry::christoffel_generic(sys, u, x);
    CHECK(geometry::table_deviation(full, gen) < 1e-9);
  }
}

TEST_CASE("generic table vanishes on every unlisted block") {
  lift::NaturalSystem sys = synthetic_system();
  std::mt19937_64 rng(43);
  const int d = sys.d(), U = d, V = d + 1;

  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x = lift::sample_point(sys.box, rng);
    double u = -sys.q * lift::sample_time(sys.box, rng);
    auto gen = geometry::christoffel_generic(sys, u, x);

    // upper-u row vanishes identically
    CHECK(gen[U].cwiseAbs().maxCoeff() < 1e-12);
    // any lower v index vanishes
    double vcol = 0.0;
    for (int m = 0; m < d + 2; ++m) {
      vcol = std::max(vcol, gen[m].col(V).cwiseAbs().maxCoeff());
      vcol = std::max(vcol, gen[m].row(V).cwiseAbs().maxCoeff());
    }
    CHECK(vcol < 1e-12);
  }
}

TEST_CASE("static fields make the u-derivative blocks drop out") {
  lift::NaturalSystem sys = synthetic_system();
  // freeze time dependence by evaluating fields at fixed t = 0.4
  lift::NaturalSystem frozen = sys;
  frozen.h = JetField(2, 3, [base = sys.h](double, const Eigen::VectorXd& x) {
    FieldJet f = base.at(0.4, x);
    for (auto& c : f.c) {
      c.g(tslot()) = 0.0;
      c.H.row(tslot()).setZero();
      c.H.col(tslot()).setZero();
    }
    return f;
  });

  Eigen::Vector3d x(0.3, -0.2, 0.5);
  geometry::LiftedChristoffel a = geometry::christoffel_lifted(frozen, 0.9, x);
  geometry::LiftedChristoffel b = geometry::christoffel_lifted(frozen, -2.6, x);
  // with h u-independent the i_ju block is -(1/2)F^i_j at any u where N is
  // also frozen; here only h is frozen, so just check u-independence of
  // the h-derived part via two different u values of the same fields
  CHECK((a.i_jk[0] - b.i_jk[0]).cwiseAbs().maxCoeff() < 1e-14);
}
