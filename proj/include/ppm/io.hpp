#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ppm/finite_model.hpp"

namespace ppm {

/// Parsed model description file:
///   {"sites": m, "weights": [...],
///    "density": {"type": "poisson" | "pairwise", "gamma": g, "pairs": [[i, j], ...]}}
/// Pair entries are zero-based site indices.
struct ModelDescription {
  std::vector<double> weights;
  std::string density_type = "poisson";
  double gamma = 1.0;
  std::vector<std::pair<Site, Site>> pairs;

  FiniteModel build() const;
};

/// Throws ValidationError on schema violations.
ModelDescription parse_model_description(const nlohmann::json& j);
nlohmann::json to_json(const ModelDescription& d);

}  // namespace ppm
