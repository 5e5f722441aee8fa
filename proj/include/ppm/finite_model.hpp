#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppm/combinatorics.hpp"
#include "ppm/configuration.hpp"
#include "ppm/errors.hpp"

namespace ppm {

/// Sites 0..m-1 with positive atomic weights σ_x (the intensity measure).
class GroundSpace {
 public:
  explicit GroundSpace(std::vector<double> weights);

  int size() const { return static_cast<int>(weights_.size()); }
  double weight(Site x) const { return weights_[x]; }
  std::span<const double> weights() const { return weights_; }
  SiteSet all() const { return SiteSet::all(size()); }

 private:
  std::vector<double> weights_;
};

using LogDensity = std::function<double(SiteSet)>;
using SiteFunctional = std::function<double(SiteSet)>;
using SiteKernel = std::function<double(Site, SiteSet)>;
using SiteRegion = std::function<bool(Site, SiteSet)>;

/// Largest ground space the exact engine enumerates (2^22 configurations).
inline constexpr int kMaxExactSites = 22;

/// A point process on a finite ground space, given by a hereditary
/// unnormalized density q (supplied as log q, -inf where q = 0).
///
/// P(ω) = q(ω) Π_{x∈ω} σ_x / Z. All 2^m values of log q and P are tabulated
/// at construction and the model is immutable afterwards.
///
/// Atomic convention: c(x, ω) = 0 whenever x ∈ ω. With it the
/// Georgii-Nguyen-Zessin identity holds exactly on atoms.
class FiniteModel {
 public:
  FiniteModel(GroundSpace space, const LogDensity& log_density);

  static FiniteModel poisson(GroundSpace space);
  /// q(ω) = γ^{#listed pairs inside ω}; γ = 0 gives a hard-core model.
  static FiniteModel pairwise(GroundSpace space, double gamma, const std::vector<std::pair<Site, Site>>& pairs);

  const GroundSpace& space() const { return space_; }
  int size() const { return space_.size(); }
  double partition_constant() const { return z_; }
  std::uint32_t configuration_count() const { return static_cast<std::uint32_t>(prob_.size()); }

  double log_density(SiteSet omega) const { return log_q_[omega.bits()]; }
  double probability(SiteSet omega) const { return prob_[omega.bits()]; }

  /// True when q ≡ 1 (the atomic Poisson model).
  bool is_poisson() const;

  /// c(x, ω) = q(ω ∪ {x}) / q(ω); 0 if x ∈ ω or q(ω) = 0.
  double papangelou(Site x, SiteSet omega) const;

  /// ĉ(x_1..x_n, ω) = Π_k c(x_k, ω ∪ {x_1..x_{k-1}}); 1 for the empty tuple.
  double compound_campbell(std::span<const Site> tuple, SiteSet omega) const;

  /// ρ_n(tuple) = E[ĉ(tuple, ω)].
  double correlation(std::span<const Site> tuple) const;

  /// Σ_ω P(ω) F(ω) over all 2^m configurations.
  template <class F>
  double expectation(F&& fn) const {
    double acc = 0.0;
    const auto count = configuration_count();
    for (std::uint32_t b = 0; b < count; ++b) {
      const double p = prob_[b];
      if (p != 0.0) acc += p * fn(SiteSet(b));
    }
    return acc;
  }

 private:
  GroundSpace space_;
  std::vector<double> log_q_;
  std::vector<double> prob_;
  double z_ = 0.0;
};

/// Both sides of the GNZ identity on the finite model:
/// lhs = E[Σ_{x∈ω} u(x, ω)], rhs = Σ_x σ_x E[c(x, ω) u(x, ω ∪ {x})].
Sides gnz_residual(const FiniteModel& model, const SiteKernel& u);

/// Calls fn(tuple) for every ordered n-tuple of distinct sites of 0..m-1.
void for_each_distinct_tuple(int m, int n, const std::function<void(std::span<const Site>)>& fn);

}  // namespace ppm
