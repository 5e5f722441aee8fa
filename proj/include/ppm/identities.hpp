#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ppm/finite_model.hpp"

namespace ppm {

/// Both sides of one identity instance.
/// rel_gap = |lhs - rhs| / (1 + max(|lhs|, |rhs|)).
struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_gap = 0.0;
  double rel_gap = 0.0;
  nlohmann::json parameters = nlohmann::json::object();

  static IdentityReport make(std::string name, double lhs, double rhs, nlohmann::json parameters = {});
};

void to_json(nlohmann::json& j, const IdentityReport& r);

/// N(A)(ω) = #{x ∈ ω : A.contains(x, ω)}.
int region_count(const SiteRegion& region, SiteSet omega);

/// Throws ValidationError unless the regions are pairwise disjoint for
/// every configuration (exhaustive for m <= 10, 4096 sampled
/// configurations above).
void validate_disjoint(const FiniteModel& model, const std::vector<SiteRegion>& regions);

/// E[F N(A)_(n)] against Σ over distinct n-tuples of
/// σ-weights × E[ĉ(tuple, ω) · F(ω ∪ tuple) Π_k 1_{A(ω ∪ tuple)}(x_k)]; n <= 4.
IdentityReport factorial_moment_identity(const FiniteModel& model, const SiteFunctional& F, const SiteRegion& A,
                                         int n);

/// E[F Π_i N(A_i)_(n_i)] against the tensorized ε⁺ form; regions disjoint,
/// Σ n_i <= 4.
IdentityReport joint_factorial_identity(const FiniteModel& model, const SiteFunctional& F,
                                        const std::vector<SiteRegion>& regions, const std::vector<int>& orders);

/// E[F N(A)^n] against Σ_k S(n, k) × (factorial right side at order k); n <= 4.
IdentityReport stirling_moment_identity(const FiniteModel& model, const SiteFunctional& F, const SiteRegion& A,
                                        int n);

/// E[(Σ_{x∈ω} u(x, ω))^n] against the sum over set partitions of {1..n}
/// of ε⁺-weighted products of block powers; n <= 4.
IdentityReport partition_moment_identity(const FiniteModel& model, const SiteKernel& u, int n);

/// Joint factorial identity with the right side re-expanded as
/// Σ_{Θ⊆{1..n}} D_Θ(integrand). The report's rhs is the D_Θ route; the
/// ε⁺ route is stored as parameters["rhs_epsilon"] and rel_gap is the
/// largest pairwise gap among the three values.
IdentityReport dtheta_joint_expansion(const FiniteModel& model, const SiteFunctional& F,
                                      const std::vector<SiteRegion>& regions, const std::vector<int>& orders);

/// Which precondition of the independence check failed.
enum class IndependenceFailure { NotPoisson, RandomWeight, CoverCondition };

class IndependencePreconditionError : public ValidationError {
 public:
  IndependencePreconditionError(IndependenceFailure kind, const std::string& what)
      : ValidationError(what), kind_(kind) {}
  IndependenceFailure kind() const { return kind_; }

 private:
  IndependenceFailure kind_;
};

/// On the atomic Poisson model (q ≡ 1), each multi-order (n_1..n_p) with
/// 1 <= Σ n_i <= max_order compares E[Π N(A_i)_(n_i)] with the product of
/// the single-region factorial moments of independent atoms,
/// Π_i Σ_{distinct n_i-tuples in A_i} Π_k p_{x_k}, p_x = σ_x / (1 + σ_x).
///
/// Preconditions: q ≡ 1; regions disjoint; the multiset of weights in
/// each A_i(ω) does not depend on ω; the cover condition for the region
/// indicators holds on sampled tuples and configurations.
std::vector<IdentityReport> poisson_independence_check(const FiniteModel& model,
                                                       const std::vector<SiteRegion>& regions, int max_order);

}  // namespace ppm
