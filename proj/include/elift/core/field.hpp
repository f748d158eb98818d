#ifndef ELIFT_CORE_FIELD_HPP
#define ELIFT_CORE_FIELD_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "jet.hpp"

namespace elift {

// Derivative slot layout for every (t, x)-parameterized field:
// slot 0 is t, slots 1..d are x^1..x^d.
constexpr int tslot() { return 0; }
constexpr int xslot(int i) { return 1 + i; }

inline int ncomp_for(int rank, int d) {
  switch (rank) {
    case 0: return 1;
    case 1: return d;
    case 2: return d * d;
    default: throw std::invalid_argument("field rank must be 0, 1 or 2");
  }
}

// All components of a field at one point, each carrying value/grad/hess
// over the (t, x) slots. Rank-2 components are stored row-major.
struct FieldJet {
  int rank = 0;
  int d = 0;
  std::vector<Jet2> c;

  const Jet2& s() const { return c[0]; }
  const Jet2& vec(int i) const { return c[i]; }
  const Jet2& mat(int i, int j) const { return c[i * d + j]; }
  Jet2& s() { return c[0]; }
  Jet2& vec(int i) { return c[i]; }
  Jet2& mat(int i, int j) { return c[i * d + j]; }
};

class JetField {
public:
  using AtFn = std::function<FieldJet(double t, const Eigen::VectorXd& x)>;
  using JetFn = std::function<std::vector<Jet2>(const Jet2& t,
                                                const std::vector<Jet2>& x)>;
  using EvalFn = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)>;
  using GradFn = std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& x)>;
  using HessFn = std::function<std::vector<Eigen::MatrixXd>(double t,
                                                            const Eigen::VectorXd& x)>;

  JetField() = default;
  JetField(int rank, int d, AtFn at)
      : rank_(rank), d_(d), ncomp_(ncomp_for(rank, d)), at_(std::move(at)) {}
  // Component-count form for fields that are not rank-0/1/2 tensors
  // (e.g. symmetric coefficient tensors of higher rank); rank is tagged -1.
  JetField(int ncomp, int d, AtFn at, int)
      : rank_(-1), d_(d), ncomp_(ncomp), at_(std::move(at)) {}

  int rank() const { return rank_; }
  int dim() const { return d_; }
  int ncomp() const { return ncomp_; }
  bool valid() const { return static_cast<bool>(at_); }

  FieldJet at(double t, const Eigen::VectorXd& x) const { return at_(t, x); }
  Eigen::VectorXd value(double t, const Eigen::VectorXd& x) const {
    const FieldJet fj = at_(t, x);
    Eigen::VectorXd out(fj.c.size());
    for (size_t k = 0; k < fj.c.size(); ++k) out(k) = fj.c[k].v;
    return out;
  }
  // Rank-2 values reshaped to d x d (row-major component order).
  Eigen::MatrixXd value_matrix(double t, const Eigen::VectorXd& x) const {
    Eigen::VectorXd v = value(t, x);
    return Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                    Eigen::RowMajor>>(v.data(), d_, d_);
  }

private:
  int rank_ = 0;
  int d_ = 0;
  int ncomp_ = 0;
  AtFn at_;
};

// Exact jets propagated through dual-number arithmetic; this is the
// analytic path used by the model catalogue.
inline JetField make_jet_autodiff(int rank, int d, JetField::JetFn f) {
  const int nc = ncomp_for(rank, d);
  return JetField(rank, d, [rank, d, nc, f](double t, const Eigen::VectorXd& x) {
    const int n = 1 + d;
    Jet2 jt = Jet2::variable(t, tslot(), n);
    std::vector<Jet2> jx(d);
    for (int i = 0; i < d; ++i) jx[i] = Jet2::variable(x(i), xslot(i), n);
    FieldJet out;
    out.rank = rank;
    out.d = d;
    out.c = f(jt, jx);
    if (static_cast<int>(out.c.size()) != nc)
      throw std::runtime_error("jet function returned wrong component count");
    return out;
  });
}

// Autodiff field with an explicit component count (rank tag -1); used for
// symmetric coefficient tensors whose component layout the caller owns.
inline JetField make_jet_components(int ncomp, int d, JetField::JetFn f) {
  return JetField(ncomp, d,
                  [ncomp, d, f](double t, const Eigen::VectorXd& x) {
    const int n = 1 + d;
    Jet2 jt = Jet2::variable(t, tslot(), n);
    std::vector<Jet2> jx(d);
    for (int i = 0; i < d; ++i) jx[i] = Jet2::variable(x(i), xslot(i), n);
    FieldJet out;
    out.rank = -1;
    out.d = d;
    out.c = f(jt, jx);
    if (static_cast<int>(out.c.size()) != ncomp)
      throw std::runtime_error("jet function returned wrong component count");
    return out;
  }, 0);
}

// Jets from explicit closed-form derivative callables.
// grad is ncomp x (1+d); hess is one (1+d) x (1+d) matrix per component.
inline JetField make_jet_analytic(int rank, int d, JetField::EvalFn eval,
                                  JetField::GradFn grad, JetField::HessFn hess) {
  const int nc = ncomp_for(rank, d);
  return JetField(rank, d,
                  [rank, d, nc, eval, grad, hess](double t, const Eigen::VectorXd& x) {
    const Eigen::VectorXd v = eval(t, x);
    const Eigen::MatrixXd g = grad(t, x);
    const std::vector<Eigen::MatrixXd> h = hess(t, x);
    FieldJet out;
    out.rank = rank;
    out.d = d;
    out.c.resize(nc);
    for (int k = 0; k < nc; ++k) {
      out.c[k] = Jet2(v(k), 1 + d);
      out.c[k].g = g.row(k).transpose();
      out.c[k].H = h[k];
    }
    return out;
  });
}

inline JetField make_jet_constant(int rank, int d, const Eigen::VectorXd& comps) {
  return JetField(rank, d, [rank, d, comps](double, const Eigen::VectorXd&) {
    FieldJet out;
    out.rank = rank;
    out.d = d;
    out.c.resize(comps.size());
    for (int k = 0; k < comps.size(); ++k) out.c[k] = Jet2(comps(k), 1 + d);
    return out;
  });
}

// Central differences with one Richardson extrapolation level:
// O(step^4) gradients, O(step^4) diagonal and O(step^2..4) mixed Hessian.
// Serves as the universal fallback and as the cross-check oracle for the
// analytic jets.
inline JetField make_jet_numeric(int rank, int d, JetField::EvalFn eval,
                                 double step = 1e-4) {
  if (step <= 0.0) throw std::invalid_argument("finite-difference step must be positive");
  const int nc = ncomp_for(rank, d);
  return JetField(rank, d, [rank, d, nc, eval, step](double t, const Eigen::VectorXd& x) {
    const int n = 1 + d;
    Eigen::VectorXd c(n);
    c(0) = t;
    c.tail(d) = x;
    auto f = [&](const Eigen::VectorXd& pt) { return eval(pt(0), pt.tail(d)); };

    Eigen::VectorXd h(n);
    for (int a = 0; a < n; ++a) h(a) = step * std::max(1.0, std::abs(c(a)));

    const Eigen::VectorXd f0 = f(c);
    std::vector<Eigen::VectorXd> fp(n), fm(n), fph(n), fmh(n);
    for (int a = 0; a < n; ++a) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(a) = h(a);
      fp[a] = f(c + e);
      fm[a] = f(c - e);
      fph[a] = f(c + 0.5 * e);
      fmh[a] = f(c - 0.5 * e);
    }

    FieldJet out;
    out.rank = rank;
    out.d = d;
    out.c.assign(nc, Jet2(0.0, n));
    for (int k = 0; k < nc; ++k) out.c[k].v = f0(k);

    for (int a = 0; a < n; ++a) {
      const Eigen::VectorXd d1 = (fp[a] - fm[a]) / (2.0 * h(a));
      const Eigen::VectorXd d1h = (fph[a] - fmh[a]) / h(a);
      const Eigen::VectorXd grad = (4.0 * d1h - d1) / 3.0;
      const Eigen::VectorXd s1 = (fp[a] - 2.0 * f0 + fm[a]) / (h(a) * h(a));
      const Eigen::VectorXd s1h = (fph[a] - 2.0 * f0 + fmh[a]) / (0.25 * h(a) * h(a));
      const Eigen::VectorXd hess = (4.0 * s1h - s1) / 3.0;
      for (int k = 0; k < nc; ++k) {
        out.c[k].g(a) = grad(k);
        out.c[k].H(a, a) = hess(k);
      }
    }

    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        auto cross = [&](double s) -> Eigen::VectorXd {
          Eigen::VectorXd ea = Eigen::VectorXd::Zero(n), eb = Eigen::VectorXd::Zero(n);
          ea(a) = s * h(a);
          eb(b) = s * h(b);
          return ((f(c + ea + eb) - f(c + ea - eb)) - (f(c - ea + eb) - f(c - ea - eb)))
                 / (4.0 * s * s * h(a) * h(b));
        };
        const Eigen::VectorXd m1 = cross(1.0);
        const Eigen::VectorXd m2 = cross(0.5);
        const Eigen::VectorXd mix = (4.0 * m2 - m1) / 3.0;
        for (int k = 0; k < nc; ++k) {
          out.c[k].H(a, b) = mix(k);
          out.c[k].H(b, a) = mix(k);
        }
      }
    }
    return out;
  });
}

// Wraps any jet field's plain values in a fresh finite-difference jet;
// used to cross-check analytic derivatives against an independent path.
inline JetField numeric_shadow(const JetField& fld, double step = 1e-4) {
  return make_jet_numeric(fld.rank(), fld.dim(),
                          [fld](double t, const Eigen::VectorXd& x) {
                            return fld.value(t, x);
                          },
                          step);
}

struct JetDeviation {
  double grad = 0.0;
  double hess = 0.0;
};

// Max absolute deviation of grad/hess between two jets of the same field.
inline JetDeviation verify_jet(const JetField& a, const JetField& b, double t,
                               const Eigen::VectorXd& x) {
  const FieldJet fa = a.at(t, x);
  const FieldJet fb = b.at(t, x);
  JetDeviation dev;
  for (size_t k = 0; k < fa.c.size(); ++k) {
    dev.grad = std::max(dev.grad, (fa.c[k].g - fb.c[k].g).cwiseAbs().maxCoeff());
    dev.hess = std::max(dev.hess, (fa.c[k].H - fb.c[k].H).cwiseAbs().maxCoeff());
  }
  return dev;
}

} // namespace elift

#endif
