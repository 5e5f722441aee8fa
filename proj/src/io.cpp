#include "ppm/io.hpp"

namespace ppm {

FiniteModel ModelDescription::build() const {
  GroundSpace space(weights);
  if (density_type == "poisson") return FiniteModel::poisson(std::move(space));
  return FiniteModel::pairwise(std::move(space), gamma, pairs);
}

ModelDescription parse_model_description(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("model description must be a JSON object");
  ModelDescription d;
  try {
    const int m = j.at("sites").get<int>();
    if (m < 1 || m > kMaxExactSites) throw ValidationError("model description: sites must be in [1, 22]");
    d.weights = j.contains("weights") ? j.at("weights").get<std::vector<double>>() : std::vector<double>(m, 1.0);
    if (static_cast<int>(d.weights.size()) != m)
      throw ValidationError("model description: weights must have one entry per site");
    const auto& density = j.contains("density") ? j.at("density") : nlohmann::json{{"type", "poisson"}};
    d.density_type = density.at("type").get<std::string>();
    if (d.density_type == "pairwise") {
      d.gamma = density.at("gamma").get<double>();
      for (const auto& p : density.value("pairs", nlohmann::json::array())) {
        if (!p.is_array() || p.size() != 2) throw ValidationError("model description: pairs must be [i, j]");
        d.pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
      }
    } else if (d.density_type != "poisson") {
      throw ValidationError("model description: unknown density type '" + d.density_type + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model description: ") + e.what());
  }
  return d;
}

nlohmann::json to_json(const ModelDescription& d) {
  nlohmann::json density{{"type", d.density_type}};
  if (d.density_type == "pairwise") {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [a, b] : d.pairs) pairs.push_back({a, b});
    density["gamma"] = d.gamma;
    density["pairs"] = pairs;
  }
  return {{"sites", d.weights.size()}, {"weights", d.weights}, {"density", density}};
}

}  // namespace ppm
