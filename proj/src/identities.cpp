#include "ppm/identities.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ppm/difference_ops.hpp"

namespace ppm {

namespace {

constexpr int kMaxOrder = 4;

void check_order(int n, const char* who) {
  if (n < 1 || n > kMaxOrder) throw RangeError(std::string(who) + ": need 1 <= n <= 4");
}

double weight_product(const FiniteModel& model, std::span<const Site> tuple) {
  double w = 1.0;
  for (Site x : tuple) w *= model.space().weight(x);
  return w;
}

// region_of[k] for the positions of a tuple laid out block by block.
std::vector<int> position_regions(const std::vector<int>& orders) {
  std::vector<int> out;
  for (std::size_t i = 0; i < orders.size(); ++i) out.insert(out.end(), orders[i], static_cast<int>(i));
  return out;
}

int total_order(const std::vector<SiteRegion>& regions, const std::vector<int>& orders, const char* who) {
  if (regions.empty() || regions.size() != orders.size())
    throw ValidationError(std::string(who) + ": need one order per region");
  int n = 0;
  for (int o : orders) {
    if (o < 1) throw RangeError(std::string(who) + ": orders must be positive");
    n += o;
  }
  if (n > kMaxOrder) throw RangeError(std::string(who) + ": total order must be <= 4");
  return n;
}

// (F · Π_k 1_{A_{r(k)}}(x_k))(ω) for a fixed tuple.
double tensor_integrand(const SiteFunctional& F, const std::vector<SiteRegion>& regions,
                        const std::vector<int>& region_of, std::span<const Site> tuple, SiteSet omega) {
  for (std::size_t k = 0; k < tuple.size(); ++k)
    if (!regions[region_of[k]](tuple[k], omega)) return 0.0;
  return F(omega);
}

// Σ over distinct tuples of σ-weights × E[ĉ(tuple, ω) · ε⁺_tuple(integrand)].
double epsilon_side(const FiniteModel& model, const SiteFunctional& F, const std::vector<SiteRegion>& regions,
                    const std::vector<int>& region_of) {
  const int n = static_cast<int>(region_of.size());
  double total = 0.0;
  for_each_distinct_tuple(model.size(), n, [&](std::span<const Site> tuple) {
    const double inner = model.expectation([&](SiteSet omega) {
      const double c = model.compound_campbell(tuple, omega);
      if (c == 0.0) return 0.0;
      SiteSet aug = omega;
      for (Site x : tuple) aug = aug.with(x);
      return c * tensor_integrand(F, regions, region_of, tuple, aug);
    });
    total += weight_product(model, tuple) * inner;
  });
  return total;
}

double factorial_side_lhs(const FiniteModel& model, const SiteFunctional& F, const std::vector<SiteRegion>& regions,
                          const std::vector<int>& orders) {
  return model.expectation([&](SiteSet omega) {
    double v = 1.0;
    for (std::size_t i = 0; i < regions.size() && v != 0.0; ++i)
      v *= falling_factorial(region_count(regions[i], omega), orders[i]);
    return v == 0.0 ? 0.0 : v * F(omega);
  });
}

double rel_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b))); }

}  // namespace

IdentityReport IdentityReport::make(std::string name, double lhs, double rhs, nlohmann::json parameters) {
  IdentityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_gap = std::abs(lhs - rhs);
  r.rel_gap = ppm::rel_gap(lhs, rhs);
  r.parameters = parameters.is_null() ? nlohmann::json::object() : std::move(parameters);
  return r;
}

void to_json(nlohmann::json& j, const IdentityReport& r) {
  j = nlohmann::json{{"name", r.name},       {"lhs", r.lhs},         {"rhs", r.rhs},
                     {"abs_gap", r.abs_gap}, {"rel_gap", r.rel_gap}, {"parameters", r.parameters}};
}

int region_count(const SiteRegion& region, SiteSet omega) {
  int c = 0;
  for (Site x : omega.sites())
    if (region(x, omega)) ++c;
  return c;
}

void validate_disjoint(const FiniteModel& model, const std::vector<SiteRegion>& regions) {
  const int m = model.size();
  auto check = [&](SiteSet omega) {
    for (Site x = 0; x < m; ++x) {
      int hits = 0;
      for (const auto& r : regions) hits += r(x, omega) ? 1 : 0;
      if (hits > 1)
        throw ValidationError("regions overlap at site " + std::to_string(x) + " for configuration " +
                              std::to_string(omega.bits()));
    }
  };
  if (m <= 10) {
    for (std::uint32_t b = 0; b < model.configuration_count(); ++b) check(SiteSet(b));
    return;
  }
  std::mt19937_64 gen(0x5eedULL);
  std::uniform_int_distribution<std::uint32_t> pick(0, model.configuration_count() - 1);
  for (int i = 0; i < 4096; ++i) check(SiteSet(pick(gen)));
}

IdentityReport factorial_moment_identity(const FiniteModel& model, const SiteFunctional& F, const SiteRegion& A,
                                         int n) {
  check_order(n, "factorial_moment_identity");
  const std::vector<SiteRegion> regions{A};
  const std::vector<int> orders{n};
  const double lhs = factorial_side_lhs(model, F, regions, orders);
  const double rhs = epsilon_side(model, F, regions, position_regions(orders));
  return IdentityReport::make("factorial_moment", lhs, rhs, {{"n", n}, {"sites", model.size()}});
}

IdentityReport joint_factorial_identity(const FiniteModel& model, const SiteFunctional& F,
                                        const std::vector<SiteRegion>& regions, const std::vector<int>& orders) {
  total_order(regions, orders, "joint_factorial_identity");
  validate_disjoint(model, regions);
  const double lhs = factorial_side_lhs(model, F, regions, orders);
  const double rhs = epsilon_side(model, F, regions, position_regions(orders));
  return IdentityReport::make("joint_factorial_moment", lhs, rhs, {{"orders", orders}, {"sites", model.size()}});
}

IdentityReport stirling_moment_identity(const FiniteModel& model, const SiteFunctional& F, const SiteRegion& A,
                                        int n) {
  check_order(n, "stirling_moment_identity");
  const double lhs = model.expectation([&](SiteSet omega) { return F(omega) * std::pow(region_count(A, omega), n); });
  const std::vector<SiteRegion> regions{A};
  double rhs = 0.0;
  for (int k = 1; k <= n; ++k)
    rhs += static_cast<double>(stirling2(n, k)) * epsilon_side(model, F, regions, std::vector<int>(k, 0));
  return IdentityReport::make("stirling_moment", lhs, rhs, {{"n", n}, {"sites", model.size()}});
}

IdentityReport partition_moment_identity(const FiniteModel& model, const SiteKernel& u, int n) {
  check_order(n, "partition_moment_identity");
  const double lhs = model.expectation([&](SiteSet omega) {
    double s = 0.0;
    for (Site x : omega.sites()) s += u(x, omega);
    return std::pow(s, n);
  });
  double rhs = 0.0;
  for (const Partition& part : partitions(n)) {
    const int k = part.block_count();
    for_each_distinct_tuple(model.size(), k, [&](std::span<const Site> tuple) {
      const double inner = model.expectation([&](SiteSet omega) {
        const double c = model.compound_campbell(tuple, omega);
        if (c == 0.0) return 0.0;
        SiteSet aug = omega;
        for (Site x : tuple) aug = aug.with(x);
        double prod = c;
        for (int j = 0; j < k; ++j) prod *= std::pow(u(tuple[j], aug), part.blocks()[j].size());
        return prod;
      });
      rhs += weight_product(model, tuple) * inner;
    });
  }
  return IdentityReport::make("partition_moment", lhs, rhs, {{"n", n}, {"sites", model.size()}});
}

IdentityReport dtheta_joint_expansion(const FiniteModel& model, const SiteFunctional& F,
                                      const std::vector<SiteRegion>& regions, const std::vector<int>& orders) {
  const int n = total_order(regions, orders, "dtheta_joint_expansion");
  validate_disjoint(model, regions);
  const std::vector<int> region_of = position_regions(orders);
  const double lhs = factorial_side_lhs(model, F, regions, orders);
  const double rhs_eps = epsilon_side(model, F, regions, region_of);

  double rhs_d = 0.0;
  std::vector<Site> tuple_copy(n);
  for_each_distinct_tuple(model.size(), n, [&](std::span<const Site> tuple) {
    std::copy(tuple.begin(), tuple.end(), tuple_copy.begin());
    Functional<SiteSet> integrand = [&, t = tuple_copy](const SiteSet& omega) {
      return tensor_integrand(F, regions, region_of, t, omega);
    };
    std::vector<Functional<SiteSet>> terms;
    for_each_subset(IndexSet::full(n), [&](IndexSet theta) {
      PointTuple<SiteSet> pts;
      for (int k : theta.elements()) pts.push_back(tuple_copy[k]);
      terms.push_back(diff_multi<SiteSet>(integrand, pts));
    });
    const double inner = model.expectation([&](SiteSet omega) {
      const double c = model.compound_campbell(tuple_copy, omega);
      if (c == 0.0) return 0.0;
      double s = 0.0;
      for (const auto& t : terms) s += t(omega);
      return c * s;
    });
    rhs_d += weight_product(model, tuple_copy) * inner;
  });

  IdentityReport r = IdentityReport::make("dtheta_joint_expansion", lhs, rhs_d,
                                          {{"orders", orders}, {"sites", model.size()}, {"rhs_epsilon", rhs_eps}});
  r.rel_gap = std::max({rel_gap(lhs, rhs_d), rel_gap(lhs, rhs_eps), rel_gap(rhs_eps, rhs_d)});
  return r;
}

namespace {

std::vector<double> sorted_region_weights(const FiniteModel& model, const SiteRegion& region, SiteSet omega) {
  std::vector<double> w;
  for (Site x = 0; x < model.size(); ++x)
    if (region(x, omega)) w.push_back(model.space().weight(x));
  std::sort(w.begin(), w.end());
  return w;
}

// Σ over distinct n-tuples of Π p_x = n! e_n(p).
double bernoulli_factorial_moment(const std::vector<double>& weights, int n) {
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (double w : weights) {
    const double p = w / (1.0 + w);
    for (int k = n; k >= 1; --k) e[k] += e[k - 1] * p;
  }
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f * e[n];
}

void for_each_multi_order(int p, int max_total, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> orders(p, 0);
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (i == p) {
      if (used >= 1) fn(orders);
      return;
    }
    for (int v = 0; used + v <= max_total; ++v) {
      orders[i] = v;
      self(self, i + 1, used + v);
    }
  };
  rec(rec, 0, 0);
}

}  // namespace

std::vector<IdentityReport> poisson_independence_check(const FiniteModel& model,
                                                       const std::vector<SiteRegion>& regions, int max_order) {
  check_order(max_order, "poisson_independence_check");
  if (regions.empty()) throw ValidationError("poisson_independence_check: need at least one region");
  if (!model.is_poisson())
    throw IndependencePreconditionError(IndependenceFailure::NotPoisson,
                                        "poisson_independence_check: model is not the q = 1 Poisson model");
  validate_disjoint(model, regions);

  std::vector<std::vector<double>> profiles;
  for (const auto& r : regions) profiles.push_back(sorted_region_weights(model, r, SiteSet()));
  for (std::uint32_t b = 1; b < model.configuration_count(); ++b)
    for (std::size_t i = 0; i < regions.size(); ++i)
      if (sorted_region_weights(model, regions[i], SiteSet(b)) != profiles[i])
        throw IndependencePreconditionError(
            IndependenceFailure::RandomWeight,
            "poisson_independence_check: weight of region " + std::to_string(i) + " depends on the configuration");

  // Cover condition for the indicator kernels 1_{A_i(ω)}(x) on sampled
  // configurations, tuples and region assignments.
  const int p = static_cast<int>(regions.size());
  std::mt19937_64 gen(0xc0ffeeULL);
  std::uniform_int_distribution<std::uint32_t> pick_config(0, model.configuration_count() - 1);
  std::uniform_int_distribution<int> pick_site(0, model.size() - 1);
  const int max_len = std::min(max_order, 3);
  for (int len = 1; len <= max_len; ++len) {
    for (int trial = 0; trial < 96; ++trial) {
      const SiteSet omega(pick_config(gen));
      PointTuple<SiteSet> pts(len);
      for (auto& x : pts) x = pick_site(gen);
      detail::for_each_tuple(p, len, [&](const std::vector<int>& assign) {
        std::vector<Kernel<SiteSet>> kernels;
        for (int a : assign)
          kernels.push_back([&regions, a](const Site& x, const SiteSet& w) { return regions[a](x, w) ? 1.0 : 0.0; });
        if (!cover_condition_holds<SiteSet>(kernels, pts, omega, 0.0))
          throw IndependencePreconditionError(IndependenceFailure::CoverCondition,
                                              "poisson_independence_check: cover condition fails for the regions");
      });
    }
  }

  std::vector<IdentityReport> out;
  const SiteFunctional one = [](SiteSet) { return 1.0; };
  for_each_multi_order(p, max_order, [&](const std::vector<int>& orders) {
    const double lhs = factorial_side_lhs(model, one, regions, orders);
    double rhs = 1.0;
    for (int i = 0; i < p; ++i) rhs *= bernoulli_factorial_moment(profiles[i], orders[i]);
    out.push_back(IdentityReport::make("poisson_independence", lhs, rhs, {{"orders", orders}}));
  });
  return out;
}

}  // namespace ppm
