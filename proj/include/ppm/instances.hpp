#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ppm/finite_model.hpp"

namespace ppm {

enum class InstanceKind { Poisson, Pairwise };

struct InstanceBounds {
  int min_sites = 2;
  int max_sites = 8;
  int regions = 2;
  double weight_min = 0.1;
  double weight_max = 2.0;
};

/// A random finite model with a random functional, kernel and
/// configuration-dependent regions, stored as plain tables so the bundle
/// serializes exactly.
///
/// Region membership: site x belongs to region region_labels[x][b], where b
/// is the parity of |ω ∩ parity_masks[x]|, and label -1 means no region.
/// Each site carries one label, so the regions are disjoint for every ω.
struct FiniteInstance {
  std::uint64_t seed = 0;
  InstanceKind kind = InstanceKind::Pairwise;
  std::vector<double> weights;
  double gamma = 1.0;
  std::vector<std::pair<Site, Site>> pairs;
  std::vector<double> functional_table;               // F(ω), indexed by ω.bits()
  std::vector<std::vector<double>> kernel_table;      // u(x, ω) = kernel_table[x][ω.bits()]
  std::vector<std::uint32_t> parity_masks;
  std::vector<std::array<int, 2>> region_labels;
  int region_total = 0;

  int sites() const { return static_cast<int>(weights.size()); }
  FiniteModel model() const;
  SiteFunctional functional() const;
  SiteKernel kernel() const;
  std::vector<SiteRegion> regions() const;
  nlohmann::json to_json() const;
};

/// Deterministic in (kind, bounds, seed). Pairwise instances draw γ from
/// {0, 0.25, 0.5, 0.75, 1} and each pair of sites independently with
/// probability 1/2; weights are uniform in [weight_min, weight_max].
FiniteInstance generate_random_instance(InstanceKind kind, const InstanceBounds& bounds, std::uint64_t seed);

}  // namespace ppm
