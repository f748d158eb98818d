#ifndef ELIFT_MODELS_ZOO_HPP
#define ELIFT_MODELS_ZOO_HPP

#include "free_particle.hpp"
#include "henon_heiles.hpp"
#include "holt.hpp"
#include "kepler.hpp"
#include "quantum_dot.hpp"

#include <stdexcept>

namespace elift::models {

inline const std::vector<std::string>& model_ids() {
  static const std::vector<std::string> ids = {
      "free-particle", "monopole", "kepler",
      "quantum-dot",   "henon-heiles", "holt"};
  return ids;
}

inline ModelEntry make_model_raw(const std::string& id,
                                 const ParamMap& params) {
  if (id == "free-particle") return make_free_particle(params);
  if (id == "monopole") return make_monopole(params);
  if (id == "kepler") return make_kepler(params);
  if (id == "quantum-dot") return make_quantum_dot(params);
  if (id == "henon-heiles") return make_henon_heiles(params);
  if (id == "holt") return make_holt(params);
  throw std::invalid_argument("unknown model id: " + id);
}

// Build a model entry. A named regime first stamps its parameter set, then
// explicit overrides are applied on top.
inline ModelEntry make_model(const std::string& id, const ParamMap& params = {},
                             const std::string& regime = "") {
  ParamMap merged;
  if (!regime.empty()) {
    ModelEntry probe = make_model_raw(id, {});
    bool found = false;
    for (const Regime& r : probe.regimes) {
      if (r.name == regime) {
        merged = r.params;
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("model '" + id + "' has no regime '" +
                                  regime + "'");
  }
  for (const auto& kv : params) merged[kv.first] = kv.second;
  return make_model_raw(id, merged);
}

} // namespace elift::models

#endif
