#ifndef ELIFT_LIFT_NATURAL_SYSTEM_HPP
#define ELIFT_LIFT_NATURAL_SYSTEM_HPP

#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "../core/field.hpp"

namespace elift::lift {

struct Coords {
  int d = 0;
  std::vector<std::string> names;
  std::string time_label = "t";
};

// Per-coordinate sampling box, plus the time window used by collocation
// and conservation suites. Excludes declared singularities (e.g. r small)
// via r_min and, when set, an arbitrary admissibility predicate.
struct DomainBox {
  Eigen::VectorXd lo, hi;
  double t_lo = -1.0;
  double t_hi = 1.0;
  double r_min = 0.0;
  std::function<bool(const Eigen::VectorXd&)> ok;

  bool contains(const Eigen::VectorXd& x) const {
    if (lo.size() == 0) return true;
    for (int i = 0; i < x.size(); ++i)
      if (x(i) < lo(i) || x(i) > hi(i)) return false;
    if (r_min > 0.0 && x.norm() < r_min) return false;
    if (ok && !ok(x)) return false;
    return true;
  }
};

// Uniform draw from the box shrunk by `shrink` of its width (split evenly
// between the two sides), rejection-sampled against the exclusions.
inline Eigen::VectorXd sample_point(const DomainBox& box, std::mt19937_64& rng,
                                    double shrink = 0.1) {
  const int d = box.lo.size();
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (int tries = 0; tries < 10000; ++tries) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) {
      double w = box.hi(i) - box.lo(i);
      double lo = box.lo(i) + 0.5 * shrink * w;
      x(i) = lo + un(rng) * w * (1.0 - shrink);
    }
    if (box.r_min > 0.0 && x.norm() < box.r_min) continue;
    if (box.ok && !box.ok(x)) continue;
    return x;
  }
  throw std::runtime_error("sample_point: box exclusions reject everything");
}

inline double sample_time(const DomainBox& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> un(box.t_lo, box.t_hi);
  return un(rng);
}

// The triple (h_ij, N_i, Phi) of a natural Hamiltonian
//   H = 1/2 h^{ij} (p_i + q N_i)(p_j + q N_j) + q^2 Phi
// together with the charge q (the conserved value of p̂_v upstairs).
// Fields are functions of (t, x); on the lifted manifold they are read at
// t = -u/q, so in-field time derivatives convert as d/du = -(1/q) d/dt.
struct NaturalSystem {
  Coords coords;
  double q = 1.0;
  JetField h;     // rank 2, positive-definite on box
  JetField N;     // rank 1
  JetField Phi;   // rank 0
  JetField Phi1;  // optional gauge part of Phi (invalid() when undeclared)
  DomainBox box;

  int d() const { return coords.d; }
  bool has_phi_split() const { return Phi1.valid(); }
};

inline JetField zero_scalar(int d) {
  return make_jet_constant(0, d, Eigen::VectorXd::Zero(1));
}
inline JetField zero_covector(int d) {
  return make_jet_constant(1, d, Eigen::VectorXd::Zero(d));
}
inline JetField flat_metric(int d) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  return make_jet_constant(2, d, Eigen::Map<Eigen::VectorXd>(id.data(), d * d));
}

struct DownState {
  double t = 0.0;
  Eigen::VectorXd x, p;
};

struct UpState {
  double u = 0.0, v = 0.0;
  Eigen::VectorXd x;
  double pu = 0.0, pv = 0.0;
  Eigen::VectorXd ph;  // spatial momenta p̂_i

  double t(double q) const { return -u / q; }
};

// Gauge-covariant momentum Pi_i = p_i + q N_i.
inline Eigen::VectorXd covariant_momentum(const NaturalSystem& sys,
                                          const DownState& st) {
  return st.p + sys.q * sys.N.value(st.t, st.x);
}

// Upstairs covariant momentum Pîhat_i = p̂_i - p̂_v N_i; on lifted states
// Pîhat = -Pi.
inline Eigen::VectorXd covariant_momentum_up(const NaturalSystem& sys,
                                             const UpState& st) {
  return st.ph - st.pv * sys.N.value(st.t(sys.q), st.x);
}

} // namespace elift::lift

#endif
