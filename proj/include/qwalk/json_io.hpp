#pragma once

// JSON form of coin parameters: a flat object with keys
// alpha1, beta1, delta1, alpha2, beta2, delta2, phi (radians, double).
// Parsing is strict: unknown keys are rejected, values must be finite
// numbers in radians.

#include <cmath>
#include <string>

#include <json.hpp>

#include "qwalk/coin.hpp"
#include "qwalk/types.hpp"

namespace qwalk {

inline nlohmann::json coin_params_to_json(const CoinParams<double>& p) {
  return nlohmann::json{{"alpha1", p.c1.alpha}, {"beta1", p.c1.beta},   {"delta1", p.c1.delta},
                        {"alpha2", p.c2.alpha}, {"beta2", p.c2.beta},   {"delta2", p.c2.delta},
                        {"phi", p.phi}};
}

inline double require_finite_number(const nlohmann::json& j, const std::string& key,
                                    const std::string& where) {
  if (!j.contains(key))
    throw ValidationError(where + ": missing field '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number())
    throw ValidationError(where + ": field '" + key + "' must be a number (radians)");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + ": field '" + key + "' is not finite");
  return x;
}

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ValidationError(where + ": unknown field '" + item.key() + "'");
  }
}

inline CoinParams<double> coin_params_from_json(const nlohmann::json& j,
                                                const std::string& where = "coin") {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  reject_unknown_keys(j, {"alpha1", "beta1", "delta1", "alpha2", "beta2", "delta2", "phi"}, where);
  CoinParams<double> p;
  p.c1 = {require_finite_number(j, "alpha1", where), require_finite_number(j, "beta1", where),
          require_finite_number(j, "delta1", where)};
  p.c2 = {require_finite_number(j, "alpha2", where), require_finite_number(j, "beta2", where),
          require_finite_number(j, "delta2", where)};
  p.phi = require_finite_number(j, "phi", where);
  return p;
}

inline nlohmann::json su2_params_to_json(const Su2Params<double>& p) {
  return nlohmann::json{{"alpha", p.alpha}, {"beta", p.beta}, {"delta", p.delta}};
}

inline Su2Params<double> su2_params_from_json(const nlohmann::json& j,
                                              const std::string& where = "su2") {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  reject_unknown_keys(j, {"alpha", "beta", "delta"}, where);
  return {require_finite_number(j, "alpha", where), require_finite_number(j, "beta", where),
          require_finite_number(j, "delta", where)};
}

}  // namespace qwalk
