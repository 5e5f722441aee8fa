#include "ppm/instances.hpp"

#include <bit>
#include <memory>

#include "ppm/rng.hpp"

namespace ppm {

namespace {

void check_bounds(const InstanceBounds& b) {
  if (b.min_sites < 1 || b.max_sites < b.min_sites || b.max_sites > kMaxExactSites)
    throw RangeError("generate_random_instance: need 1 <= min_sites <= max_sites <= 22");
  if (b.regions < 0 || b.regions > 8) throw RangeError("generate_random_instance: need 0 <= regions <= 8");
  if (!(b.weight_min > 0.0) || b.weight_max < b.weight_min)
    throw RangeError("generate_random_instance: need 0 < weight_min <= weight_max");
}

}  // namespace

FiniteInstance generate_random_instance(InstanceKind kind, const InstanceBounds& bounds, std::uint64_t seed) {
  check_bounds(bounds);
  Rng rng(seed, /*stream=*/0x1257);
  FiniteInstance inst;
  inst.seed = seed;
  inst.kind = kind;
  const int m = rng.uniform_int(bounds.min_sites, bounds.max_sites);
  for (int i = 0; i < m; ++i) inst.weights.push_back(rng.uniform(bounds.weight_min, bounds.weight_max));
  if (kind == InstanceKind::Pairwise) {
    inst.gamma = 0.25 * rng.uniform_int(0, 4);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (rng.bernoulli(0.5)) inst.pairs.emplace_back(i, j);
  }
  const std::uint32_t count = 1u << m;
  inst.functional_table.resize(count);
  for (auto& v : inst.functional_table) v = rng.uniform(-1.0, 1.0);
  inst.kernel_table.assign(m, std::vector<double>(count));
  for (auto& row : inst.kernel_table)
    for (auto& v : row) v = rng.uniform(-1.0, 1.0);
  inst.region_total = bounds.regions;
  for (int x = 0; x < m; ++x) {
    inst.parity_masks.push_back(static_cast<std::uint32_t>(rng.bits()) & (count - 1));
    std::array<int, 2> labels{};
    for (auto& l : labels) l = bounds.regions == 0 ? -1 : rng.uniform_int(-1, bounds.regions - 1);
    inst.region_labels.push_back(labels);
  }
  return inst;
}

FiniteModel FiniteInstance::model() const {
  if (kind == InstanceKind::Poisson) return FiniteModel::poisson(GroundSpace(weights));
  return FiniteModel::pairwise(GroundSpace(weights), gamma, pairs);
}

SiteFunctional FiniteInstance::functional() const {
  auto table = std::make_shared<const std::vector<double>>(functional_table);
  return [table](SiteSet omega) { return (*table)[omega.bits()]; };
}

SiteKernel FiniteInstance::kernel() const {
  auto table = std::make_shared<const std::vector<std::vector<double>>>(kernel_table);
  return [table](Site x, SiteSet omega) { return (*table)[x][omega.bits()]; };
}

std::vector<SiteRegion> FiniteInstance::regions() const {
  auto masks = std::make_shared<const std::vector<std::uint32_t>>(parity_masks);
  auto labels = std::make_shared<const std::vector<std::array<int, 2>>>(region_labels);
  std::vector<SiteRegion> out;
  for (int r = 0; r < region_total; ++r) {
    out.push_back([masks, labels, r](Site x, SiteSet omega) {
      const int parity = std::popcount(omega.bits() & (*masks)[x]) & 1;
      return (*labels)[x][parity] == r;
    });
  }
  return out;
}

nlohmann::json FiniteInstance::to_json() const {
  nlohmann::json pairs_json = nlohmann::json::array();
  for (const auto& [i, j] : pairs) pairs_json.push_back({i, j});
  nlohmann::json density = kind == InstanceKind::Poisson
                               ? nlohmann::json{{"type", "poisson"}}
                               : nlohmann::json{{"type", "pairwise"}, {"gamma", gamma}, {"pairs", pairs_json}};
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : region_labels) labels.push_back({l[0], l[1]});
  return {{"seed", seed},
          {"sites", sites()},
          {"weights", weights},
          {"density", density},
          {"functional", functional_table},
          {"kernel", kernel_table},
          {"parity_masks", parity_masks},
          {"region_labels", labels},
          {"regions", region_total}};
}

}  // namespace ppm
