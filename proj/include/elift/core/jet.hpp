#ifndef ELIFT_CORE_JET_HPP
#define ELIFT_CORE_JET_HPP

#include <Eigen/Dense>
#include <cassert>
#include <cmath>

namespace elift {

// Second-order forward-mode dual number over n independent slots.
// Carries value, gradient, and full symmetric Hessian; every arithmetic
// operation propagates all three exactly (no truncation error).
class Jet2 {
public:
  double v = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd H;

  Jet2() = default;
  Jet2(double value, int n)
      : v(value), g(Eigen::VectorXd::Zero(n)), H(Eigen::MatrixXd::Zero(n, n)) {}

  static Jet2 constant(double value, int n) { return Jet2(value, n); }
  static Jet2 variable(double value, int slot, int n) {
    Jet2 j(value, n);
    j.g(slot) = 1.0;
    return j;
  }

  int slots() const { return static_cast<int>(g.size()); }

  Jet2 operator-() const {
    Jet2 r(*this);
    r.v = -r.v;
    r.g = -r.g;
    r.H = -r.H;
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    assert(slots() == o.slots());
    v += o.v;
    g += o.g;
    H += o.H;
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    assert(slots() == o.slots());
    v -= o.v;
    g -= o.g;
    H -= o.H;
    return *this;
  }
  Jet2& operator*=(double c) {
    v *= c;
    g *= c;
    H *= c;
    return *this;
  }
  Jet2& operator+=(double c) {
    v += c;
    return *this;
  }
  Jet2& operator-=(double c) {
    v -= c;
    return *this;
  }
};

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator+(Jet2 a, double c) { return a += c; }
inline Jet2 operator+(double c, Jet2 a) { return a += c; }
inline Jet2 operator-(Jet2 a, double c) { return a -= c; }
inline Jet2 operator-(double c, const Jet2& a) { return -a + c; }
inline Jet2 operator*(Jet2 a, double c) { return a *= c; }
inline Jet2 operator*(double c, Jet2 a) { return a *= c; }
inline Jet2 operator/(Jet2 a, double c) { return a *= (1.0 / c); }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  assert(a.slots() == b.slots());
  Jet2 r(a.v * b.v, a.slots());
  r.g = a.v * b.g + b.v * a.g;
  r.H = a.v * b.H + b.v * a.H + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}

// Composition with a scalar function given phi(f), phi'(f), phi''(f).
inline Jet2 compose(const Jet2& f, double w, double dw, double ddw) {
  Jet2 r(w, f.slots());
  r.g = dw * f.g;
  r.H = dw * f.H + ddw * (f.g * f.g.transpose());
  return r;
}

inline Jet2 inv(const Jet2& f) {
  const double iv = 1.0 / f.v;
  return compose(f, iv, -iv * iv, 2.0 * iv * iv * iv);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inv(b); }
inline Jet2 operator/(double c, const Jet2& b) { return c * inv(b); }

inline Jet2 sin(const Jet2& f) {
  const double s = std::sin(f.v), c = std::cos(f.v);
  return compose(f, s, c, -s);
}
inline Jet2 cos(const Jet2& f) {
  const double s = std::sin(f.v), c = std::cos(f.v);
  return compose(f, c, -s, -c);
}
inline Jet2 exp(const Jet2& f) {
  const double e = std::exp(f.v);
  return compose(f, e, e, e);
}
inline Jet2 log(const Jet2& f) {
  const double iv = 1.0 / f.v;
  return compose(f, std::log(f.v), iv, -iv * iv);
}
inline Jet2 sqrt(const Jet2& f) {
  const double s = std::sqrt(f.v);
  return compose(f, s, 0.5 / s, -0.25 / (s * f.v));
}
inline Jet2 pow(const Jet2& f, double e) {
  const double w = std::pow(f.v, e);
  return compose(f, w, e * w / f.v, e * (e - 1.0) * w / (f.v * f.v));
}
inline Jet2 sq(const Jet2& f) { return f * f; }

// |f| away from f = 0; the kink is outside every declared model domain.
inline Jet2 abs(const Jet2& f) {
  const double s = (f.v < 0.0) ? -1.0 : 1.0;
  return compose(f, s * f.v, s, 0.0);
}

} // namespace elift

#endif
