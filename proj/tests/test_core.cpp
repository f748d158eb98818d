#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "elift/core/field.hpp"
#include "elift/core/jet.hpp"
#include "elift/core/symtensor.hpp"

using namespace elift;

TEST_CASE("jet arithmetic reproduces polynomial derivatives") {
  // f(a,b) = a^2 b + 3 a - b^3 at (2, -1)
  const int n = 2;
  Jet2 a = Jet2::variable(2.0, 0, n);
  Jet2 b = Jet2::variable(-1.0, 1, n);
  Jet2 f = a * a * b + 3.0 * a - b * b * b;

  CHECK(f.v == Catch::Approx(-4.0 + 6.0 + 1.0));
  CHECK(f.g(0) == Catch::Approx(2.0 * 2.0 * -1.0 + 3.0));  // 2ab + 3
  CHECK(f.g(1) == Catch::Approx(4.0 - 3.0));               // a^2 - 3b^2
  CHECK(f.H(0, 0) == Catch::Approx(-2.0));                 // 2b
  CHECK(f.H(0, 1) == Catch::Approx(4.0));                  // 2a
  CHECK(f.H(1, 1) == Catch::Approx(6.0));                  // -6b
}

TEST_CASE("jet transcendentals match closed-form derivatives") {
  const int n = 1;
  Jet2 x = Jet2::variable(0.7, 0, n);

  Jet2 s = sin(x);
  CHECK(s.v == Catch::Approx(std::sin(0.7)));
  CHECK(s.g(0) == Catch::Approx(std::cos(0.7)));
  CHECK(s.H(0, 0) == Catch::Approx(-std::sin(0.7)));

  Jet2 e = exp(2.0 * x);
  CHECK(e.g(0) == Catch::Approx(2.0 * std::exp(1.4)));
  CHECK(e.H(0, 0) == Catch::Approx(4.0 * std::exp(1.4)));

  Jet2 r = pow(x, 1.5);
  CHECK(r.g(0) == Catch::Approx(1.5 * std::pow(0.7, 0.5)));
  CHECK(r.H(0, 0) == Catch::Approx(0.75 * std::pow(0.7, -0.5)));

  Jet2 q = 1.0 / (1.0 + sq(x));
  double den = 1.0 + 0.49;
  CHECK(q.g(0) == Catch::Approx(-2.0 * 0.7 / (den * den)));
}

TEST_CASE("autodiff field agrees with its finite-difference shadow") {
  const int d = 3;
  JetField fld = make_jet_autodiff(
      1, d, [](const Jet2& t, const std::vector<Jet2>& x) {
        std::vector<Jet2> out;
        out.push_back(sin(x[0] * x[1]) + t * x[2]);
        out.push_back(exp(-sq(x[0])) * cos(t));
        out.push_back(pow(1.0 + sq(x[1]) + sq(x[2]), 0.5) * t);
        return out;
      });
  JetField shadow = numeric_shadow(fld);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> un(-1.5, 1.5);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = un(rng);
    JetDeviation dev = verify_jet(fld, shadow, un(rng), x);
    CHECK(dev.grad < 1e-7);
    CHECK(dev.hess < 1e-5);
  }
}

TEST_CASE("symmetric layout enumerates multisets with multiplicities") {
  SymLayout L(3, 2);
  CHECK(L.size() == 6);
  CHECK(nsym(3, 2) == 6);
  CHECK(nsym(2, 3) == 4);
  CHECK(nsym(3, 0) == 1);

  // diag entries have multiplicity 1, off-diag 2
  int n_mult2 = 0;
  for (int s = 0; s < L.size(); ++s) {
    auto tup = L.tuple(s);
    if (tup[0] == tup[1]) CHECK(L.mult(s) == 1);
    else { CHECK(L.mult(s) == 2); ++n_mult2; }
  }
  CHECK(n_mult2 == 3);

  CHECK(L.slot({2, 1}) == L.slot({1, 2}));
}

TEST_CASE("symmetric contraction equals brute-force tensor contraction") {
  const int d = 3, r = 3;
  SymLayout L(d, r);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  Eigen::VectorXd comp(L.size());
  for (int s = 0; s < L.size(); ++s) comp(s) = un(rng);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = un(rng);

  // (1/r!) C^{ijk} v_i v_j v_k with C stored symmetric
  double brute = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        brute += comp(L.slot({i, j, k})) * v(i) * v(j) * v(k);
  brute /= 6.0;

  double fast = L.contract([&](int s) { return comp(s); }, v);
  CHECK(fast == Catch::Approx(brute));

  // gradient of the contraction w.r.t. v_k
  for (int k = 0; k < d; ++k) {
    double h = 1e-6;
    Eigen::VectorXd vp = v, vm = v;
    vp(k) += h;
    vm(k) -= h;
    double fd = (L.contract([&](int s) { return comp(s); }, vp) -
                 L.contract([&](int s) { return comp(s); }, vm)) /
                (2.0 * h);
    double an = L.contract_grad([&](int s) { return comp(s); }, v, k);
    CHECK(an == Catch::Approx(fd).margin(1e-8));
  }
}

TEST_CASE("analytic field factory populates jets consistently") {
  const int d = 2;
  // f(t,x,y) = (x^2 y + t)
  JetField a = make_jet_analytic(
      0, d,
      [](double t, const Eigen::VectorXd& x) {
        Eigen::VectorXd v(1);
        v(0) = x(0) * x(0) * x(1) + t;
        return v;
      },
      [](double, const Eigen::VectorXd& x) {
        Eigen::MatrixXd g(1, 3);
        g(0, 0) = 1.0;
        g(0, 1) = 2.0 * x(0) * x(1);
        g(0, 2) = x(0) * x(0);
        return g;
      },
      [](double, const Eigen::VectorXd& x) {
        std::vector<Eigen::MatrixXd> H(1, Eigen::MatrixXd::Zero(3, 3));
        H[0](1, 1) = 2.0 * x(1);
        H[0](1, 2) = H[0](2, 1) = 2.0 * x(0);
        return H;
      });
  JetField b = make_jet_autodiff(
      0, d, [](const Jet2& t, const std::vector<Jet2>& x) {
        return std::vector<Jet2>{x[0] * x[0] * x[1] + t};
      });
  Eigen::VectorXd x(2);
  x << 1.3, -0.4;
  JetDeviation dev = verify_jet(a, b, 0.9, x);
  CHECK(dev.grad < 1e-14);
  CHECK(dev.hess < 1e-14);
}
