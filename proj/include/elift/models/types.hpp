#ifndef ELIFT_MODELS_TYPES_HPP
#define ELIFT_MODELS_TYPES_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "../killing/ansatz.hpp"
#include "../killing/solve.hpp"
#include "../lift/natural_system.hpp"
#include "../observables/lifted.hpp"
#include "../observables/poly.hpp"

namespace elift::models {

using ParamMap = std::map<std::string, double>;

inline double param(const ParamMap& p, const std::string& key, double def) {
  auto it = p.find(key);
  return it == p.end() ? def : it->second;
}

inline void require_keys(const ParamMap& p,
                         const std::vector<std::string>& allowed,
                         const std::string& model) {
  for (const auto& [key, value] : p) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument("model '" + model +
                                  "' has no parameter '" + key + "'");
  }
}

// A catalogued conserved (or control) quantity: the downstairs polynomial,
// the expected geometric label of its lift, and, where a block form exists,
// the explicit vector/tensor components on the lifted space.
struct NamedObservable {
  std::string name;
  std::string note;  // what the quantity is, in words
  observables::PolyObservable down;
  killing::Classification expected = killing::Classification::KILLING;
  bool conserved = true;  // at this entry's parameter point
  std::optional<killing::Rank1Fields> rank1;
  std::optional<killing::Rank2Blocks> rank2;

  observables::LiftedObservable lifted(const lift::NaturalSystem& sys) const {
    if (rank1) return killing::rank1_lifted(sys, *rank1, name);
    if (rank2) return killing::rank2_lifted(sys, *rank2, name);
    return observables::lift_observable(down, sys);
  }
};

// A named parameter point with a declared conservation verdict.
struct Regime {
  std::string name;
  ParamMap params;
  bool integrable = true;
  std::string note;
};

struct ModelEntry {
  std::string id;
  std::string title;
  ParamMap constants;
  lift::NaturalSystem sys;
  std::vector<NamedObservable> observables;
  std::vector<lift::DownState> initial_states;
  double horizon = 10.0;
  std::vector<Regime> regimes;
  std::vector<std::string> notes;

  const NamedObservable& observable(const std::string& name) const {
    for (const auto& o : observables)
      if (o.name == name) return o;
    throw std::invalid_argument("model '" + id + "' has no observable '" +
                                name + "'");
  }
};

// A trajectory-friendly copy of the system: same fields, enlarged box so
// flows are not clipped at the sampling region used for collocation.
// Declared singular sets (r_min, predicate) are kept.
inline lift::NaturalSystem flight_system(const lift::NaturalSystem& sys,
                                         const Eigen::VectorXd& lo,
                                         const Eigen::VectorXd& hi,
                                         double t_lo, double t_hi) {
  lift::NaturalSystem wide = sys;
  wide.box.lo = lo;
  wide.box.hi = hi;
  wide.box.t_lo = t_lo;
  wide.box.t_hi = t_hi;
  return wide;
}

// --- monomial assembly ------------------------------------------------------
//
// Polynomial observables are written term by term: coefficient function
// times a product of momenta. Terms of equal momentum degree are folded
// into one symmetric coefficient tensor, compensating the 1/r! and the
// multiset multiplicity used by the evaluation contraction.
struct MonoTerm {
  std::vector<int> p;  // momentum factor indices (any order)
  double c = 1.0;
  // optional position/time-dependent part; slot count comes from t
  std::function<Jet2(const Jet2& t, const std::vector<Jet2>& x)> fn;
};

inline observables::PolyObservable make_monomials(
    int d, observables::MomentumBasis basis, std::vector<MonoTerm> terms,
    std::string name = "") {
  int m = 0;
  for (const auto& t : terms) m = std::max(m, static_cast<int>(t.p.size()));
  std::vector<JetField> coeffs(m + 1);
  for (int r = 0; r <= m; ++r) {
    std::vector<MonoTerm> of_rank;
    for (const auto& t : terms)
      if (static_cast<int>(t.p.size()) == r) of_rank.push_back(t);
    if (of_rank.empty()) continue;
    for (auto& t : of_rank) std::sort(t.p.begin(), t.p.end());
    const double rfact = observables::factorial(r);
    coeffs[r] = observables::sym_coeff(
        d, r,
        [of_rank, d, r, rfact](const Jet2& t, const std::vector<Jet2>& x) {
          SymLayout L(d, r);
          std::vector<Jet2> out(L.size(), Jet2::constant(0.0, t.slots()));
          for (std::size_t s = 0; s < L.size(); ++s) {
            for (const auto& term : of_rank) {
              if (term.p != L.tuple(s)) continue;
              const double w = rfact / L.mult(static_cast<int>(s));
              Jet2 val = Jet2::constant(term.c * w, t.slots());
              if (term.fn) val = (term.c * w) * term.fn(t, x);
              out[s] += val;
            }
          }
          return out;
        });
  }
  return observables::make_poly(d, m, basis, std::move(coeffs),
                                std::move(name));
}

} // namespace elift::models

#endif
