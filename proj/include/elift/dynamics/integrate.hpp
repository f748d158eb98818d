#ifndef ELIFT_DYNAMICS_INTEGRATE_HPP
#define ELIFT_DYNAMICS_INTEGRATE_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace elift::dynamics {

enum class Scheme { EMBEDDED_RK_5_4, FIXED_STORMER_VERLET };

struct IntegratorConfig {
  Scheme scheme = Scheme::EMBEDDED_RK_5_4;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 1.0;
  double min_step = 1e-14;
  double t_end = 1.0;

  void check() const {
    if (rel_tol <= 0 || abs_tol <= 0)
      throw std::invalid_argument("IntegratorConfig: tolerances must be > 0");
    if (!(min_step < max_step))
      throw std::invalid_argument("IntegratorConfig: min_step >= max_step");
  }
};

// Accepted steps of one integration. f (the RHS at the sample) is kept so
// any interval can be re-evaluated by cubic Hermite interpolation.
struct Trajectory {
  std::vector<double> param;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::VectorXd> f;
  std::vector<double> step, err, constraint;
  std::string integrator_id, model_id;
  double rel_tol = 0.0, abs_tol = 0.0;

  size_t size() const { return param.size(); }

  // Dense output at s (within the covered parameter range, either
  // orientation). Hermite cubic on the bracketing accepted step.
  Eigen::VectorXd at(double s) const {
    if (param.size() < 2) return y.at(0);
    const bool fwd = param.back() >= param.front();
    size_t k = 1;
    while (k + 1 < param.size() && (fwd ? param[k] < s : param[k] > s)) ++k;
    const double t0 = param[k - 1], t1 = param[k], h = t1 - t0;
    if (h == 0.0) return y[k];
    const double th = (s - t0) / h;
    const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
    const double h10 = th * (1 - th) * (1 - th);
    const double h01 = th * th * (3 - 2 * th);
    const double h11 = th * th * (th - 1);
    return h00 * y[k - 1] + h10 * h * f[k - 1] + h01 * y[k] + h11 * h * f[k];
  }
};

using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
using ConstraintFn = std::function<double(double, const Eigen::VectorXd&)>;
using DomainFn = std::function<bool(double, const Eigen::VectorXd&)>;

// Dormand-Prince 5(4) embedded pair with PI step-size control. Integrates
// from t0 to cfg.t_end in either direction. The optional constraint
// channel is recorded per accepted step; the optional domain predicate
// turns exiting the box into an error.
inline Trajectory integrate_rk54(const Rhs& rhs, double t0,
                                 const Eigen::VectorXd& y0,
                                 const IntegratorConfig& cfg,
                                 const ConstraintFn& constraint = nullptr,
                                 const DomainFn& domain = nullptr) {
  cfg.check();
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b(order5) - b(order4); the order-4 weights include the FSAL stage.
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = (cfg.t_end >= t0) ? 1.0 : -1.0;
  const double span = std::abs(cfg.t_end - t0);

  Trajectory tr;
  tr.integrator_id = "rk54_pi";
  tr.rel_tol = cfg.rel_tol;
  tr.abs_tol = cfg.abs_tol;

  double t = t0;
  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1 = rhs(t, y);
  tr.param.push_back(t);
  tr.y.push_back(y);
  tr.f.push_back(k1);
  tr.step.push_back(0.0);
  tr.err.push_back(0.0);
  tr.constraint.push_back(constraint ? constraint(t, y) : 0.0);

  double h = dir * std::min(cfg.max_step, std::max(1e-6, 1e-3 * span));
  double err_prev = 1.0;
  bool last_rejected = false;

  while (dir * (cfg.t_end - t) > 0.0) {
    if (std::abs(h) > std::abs(cfg.t_end - t)) h = cfg.t_end - t;
    if (std::abs(h) < cfg.min_step)
      throw std::runtime_error("integrate_rk54: step underflow at t = " +
                               std::to_string(t));

    Eigen::VectorXd k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    Eigen::VectorXd k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Eigen::VectorXd k4 =
        rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Eigen::VectorXd k5 = rhs(
        t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Eigen::VectorXd k6 =
        rhs(t + h,
            y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::VectorXd ynew =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::VectorXd k7 = rhs(t + h, ynew);

    Eigen::VectorXd ee = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                              e6 * k6 + e7 * k7);
    double err = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      double sc = cfg.abs_tol +
                  cfg.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      err += (ee(i) / sc) * (ee(i) / sc);
    }
    err = std::sqrt(err / y.size());

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (domain && !domain(t, y))
        throw std::runtime_error("integrate_rk54: trajectory left the domain");
      tr.param.push_back(t);
      tr.y.push_back(y);
      tr.f.push_back(k1);
      tr.step.push_back(h);
      tr.err.push_back(err);
      tr.constraint.push_back(constraint ? constraint(t, y) : 0.0);

      double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.17) *
                   std::pow(err_prev, 0.03);
      fac = std::min(5.0, std::max(0.2, fac));
      if (last_rejected) fac = std::min(1.0, fac);
      h = dir * std::min(cfg.max_step, std::abs(h) * fac);
      err_prev = std::max(err, 1e-16);
      last_rejected = false;
    } else {
      double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h *= fac;
      last_rejected = true;
    }
  }
  return tr;
}

// Fixed-step kick-drift-kick splitting for separable downstairs systems
// (constant h, N = 0, u-independent Phi): y = (x, p),
//   p_1/2 = p - (dt/2) grad V, x' = x + dt hinv p_1/2, p' = p_1/2 - ...
inline Trajectory integrate_verlet(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradV,
    const Eigen::MatrixXd& hinv, double t0, const Eigen::VectorXd& x0,
    const Eigen::VectorXd& p0, double dt, const IntegratorConfig& cfg,
    const ConstraintFn& constraint = nullptr) {
  const int d = x0.size();
  Trajectory tr;
  tr.integrator_id = "stormer_verlet";
  tr.rel_tol = cfg.rel_tol;
  tr.abs_tol = cfg.abs_tol;

  Eigen::VectorXd x = x0, p = p0;
  auto pack = [&](double tt) {
    Eigen::VectorXd y(2 * d);
    y.head(d) = x;
    y.tail(d) = p;
    Eigen::VectorXd dy(2 * d);
    dy.head(d) = hinv * p;
    dy.tail(d) = -gradV(x);
    tr.param.push_back(tt);
    tr.y.push_back(y);
    tr.f.push_back(dy);
    tr.step.push_back(dt);
    tr.err.push_back(0.0);
    tr.constraint.push_back(constraint ? constraint(tt, y) : 0.0);
  };

  double t = t0;
  pack(t);
  const double dir = (cfg.t_end >= t0) ? 1.0 : -1.0;
  const double hstep = dir * std::abs(dt);
  long long nsteps =
      static_cast<long long>(std::ceil(std::abs(cfg.t_end - t0) / std::abs(dt) - 1e-12));
  for (long long k = 0; k < nsteps; ++k) {
    double hh = hstep;
    if (dir * (t + hh - cfg.t_end) > 0.0) hh = cfg.t_end - t;
    Eigen::VectorXd ph = p - 0.5 * hh * gradV(x);
    x = x + hh * (hinv * ph);
    p = ph - 0.5 * hh * gradV(x);
    t += hh;
    pack(t);
  }
  return tr;
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV export, one row per accepted step:
//   param,<coords...>,<momenta...>,constraint,step,err
// with 17 significant digits and '.' as the decimal separator.
inline std::string trajectory_csv(const Trajectory& tr,
                                  const std::vector<std::string>& coord_names,
                                  const std::vector<std::string>& mom_names) {
  std::string out = "param";
  for (const auto& n : coord_names) out += "," + n;
  for (const auto& n : mom_names) out += "," + n;
  out += ",constraint,step,err\n";
  const size_t nc = coord_names.size(), nm = mom_names.size();
  for (size_t k = 0; k < tr.size(); ++k) {
    out += format_g17(tr.param[k]);
    for (size_t i = 0; i < nc + nm; ++i)
      out += "," + format_g17(tr.y[k](static_cast<int>(i)));
    out += "," + format_g17(tr.constraint[k]);
    out += "," + format_g17(tr.step[k]);
    out += "," + format_g17(tr.err[k]);
    out += "\n";
  }
  return out;
}

} // namespace elift::dynamics

#endif
