#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xres/errors.hpp"
#include "xres/potentials.hpp"

namespace xres {

// Model file:
// {
//   "name": "...",                       optional
//   "v1_coeffs": [c0, c1, ...],          ascending powers
//   "v2_coeffs": [c0, c1, ...],
//   "b0": -1.0,
//   "domain": [x_min, x_max],
//   "E_max": 0.05,
//   "interaction": {"r0_amplitude": 1.0, "r1_amplitude": 0.0, "support_radius": 0.4}
// }
struct ModelConfig {
  std::string name;
  PotentialModel potentials;
  InteractionModel interaction;
};

inline ModelConfig parse_model_config(const nlohmann::json& j) {
  try {
    const auto dom = j.at("domain").get<std::vector<double>>();
    if (dom.size() != 2) throw ConfigError("domain must have two entries");
    InteractionModel inter;
    if (j.contains("interaction")) {
      const auto& ij = j.at("interaction");
      inter.r0_amplitude = ij.value("r0_amplitude", 1.0);
      inter.r1_amplitude = ij.value("r1_amplitude", 0.0);
      inter.support_radius = ij.value("support_radius", 0.4);
    }
    if (!(inter.support_radius > 0.0)) throw ConfigError("support_radius must be positive");
    PotentialModel pm(j.at("v1_coeffs").get<std::vector<double>>(), j.at("v2_coeffs").get<std::vector<double>>(),
                      j.at("b0").get<double>(), Interval{dom[0], dom[1]}, j.value("E_max", 0.05));
    const Interval ch = pm.chart();
    if (inter.support_radius > std::min(-ch.lo, ch.hi))
      throw ConfigError("interaction support must lie inside the Langer chart");
    return {j.value("name", std::string{}), std::move(pm), inter};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
}

inline ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model file " + path + ": " + e.what());
  }
  return parse_model_config(j);
}

}  // namespace xres
