#include <doctest.h>

#include <cmath>

#include "ppm/identities.hpp"
#include "ppm/instances.hpp"

using namespace ppm;

TEST_CASE("identity reports") {
  const IdentityReport r = IdentityReport::make("x", 2.0, 2.5);
  CHECK(r.abs_gap == doctest::Approx(0.5));
  CHECK(r.rel_gap == doctest::Approx(0.5 / 3.5));
  const nlohmann::json j = r;
  CHECK(j.at("name") == "x");
  CHECK(j.at("lhs") == 2.0);
}

TEST_CASE("factorial moments on the atomic Poisson model") {
  const std::vector<double> w{0.5, 1.0, 2.0, 0.25};
  const FiniteModel m = FiniteModel::poisson(GroundSpace(w));
  const SiteRegion A = [](Site x, SiteSet) { return x != 3; };
  const SiteFunctional one = [](SiteSet) { return 1.0; };
  // E[N(A)_(2)] = Σ_{x != y in A} p_x p_y with p = σ/(1+σ).
  double want = 0.0;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      if (x != y) want += w[x] / (1 + w[x]) * w[y] / (1 + w[y]);
  const IdentityReport r = factorial_moment_identity(m, one, A, 2);
  CHECK(r.lhs == doctest::Approx(want));
  CHECK(r.rhs == doctest::Approx(want));
}

TEST_CASE("identities on random pairwise instances") {
  InstanceBounds b;
  b.max_sites = 7;
  b.regions = 2;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, b, seed);
    const FiniteModel m = inst.model();
    const auto regions = inst.regions();
    CHECK_NOTHROW(validate_disjoint(m, regions));
    const int n = 1 + static_cast<int>(seed % 3);
    CHECK(factorial_moment_identity(m, inst.functional(), regions[0], n).rel_gap <= 1e-12);
    CHECK(stirling_moment_identity(m, inst.functional(), regions[1], n).rel_gap <= 1e-12);
    CHECK(partition_moment_identity(m, inst.kernel(), n).rel_gap <= 1e-12);
    const int k = 1 + static_cast<int>(seed % 2);
    CHECK(joint_factorial_identity(m, inst.functional(), regions, {k, k}).rel_gap <= 1e-12);
    const IdentityReport d = dtheta_joint_expansion(m, inst.functional(), regions, {1, k});
    CHECK(d.rel_gap <= 1e-12);
    CHECK(d.parameters.contains("rhs_epsilon"));
  }
}

TEST_CASE("stirling moment reduces to the factorial moments") {
  const FiniteModel m = FiniteModel::pairwise(GroundSpace({1.0, 0.5, 1.5}), 0.5, {{0, 1}, {1, 2}});
  const SiteRegion all = [](Site, SiteSet) { return true; };
  const SiteFunctional one = [](SiteSet) { return 1.0; };
  std::vector<double> f;
  for (int k = 1; k <= 3; ++k) f.push_back(factorial_moment_identity(m, one, all, k).lhs);
  CHECK(stirling_moment_identity(m, one, all, 3).lhs == doctest::Approx(moments_from_factorial(f, 3)));
}

TEST_CASE("partition moments of region-weighted kernels through factorial moments") {
  // With u = F_1 1_{A_1} + F_2 1_{A_2}, Σ_x u = F_1 N(A_1) + F_2 N(A_2); the
  // multinomial and Stirling expansions turn its n-th moment into joint
  // factorial moments.
  InstanceBounds b;
  b.max_sites = 6;
  b.regions = 2;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, b, seed);
    const FiniteModel m = inst.model();
    const auto A = inst.regions();
    const std::vector<SiteFunctional> F{inst.functional(), [](SiteSet o) { return o.contains(0) ? 0.7 : -0.4; }};
    const SiteKernel u = [&](Site x, SiteSet o) {
      return (A[0](x, o) ? F[0](o) : 0.0) + (A[1](x, o) ? F[1](o) : 0.0);
    };
    for (int n = 1; n <= 3; ++n) {
      double composed = 0.0;
      for (int n1 = 0; n1 <= n; ++n1) {
        const int n2 = n - n1;
        const double multinomial = std::tgamma(n + 1.0) / (std::tgamma(n1 + 1.0) * std::tgamma(n2 + 1.0));
        const SiteFunctional G = [&, n1, n2](SiteSet o) { return std::pow(F[0](o), n1) * std::pow(F[1](o), n2); };
        for (int k1 = 0; k1 <= n1; ++k1)
          for (int k2 = 0; k2 <= n2; ++k2) {
            const double s = static_cast<double>(stirling2(n1, k1) * stirling2(n2, k2));
            if (s == 0.0) continue;
            std::vector<SiteRegion> regs;
            std::vector<int> orders;
            if (k1 > 0) regs.push_back(A[0]), orders.push_back(k1);
            if (k2 > 0) regs.push_back(A[1]), orders.push_back(k2);
            composed += multinomial * s * joint_factorial_identity(m, G, regs, orders).rhs;
          }
      }
      const IdentityReport r = partition_moment_identity(m, u, n);
      CAPTURE(seed);
      CAPTURE(n);
      CHECK(r.rhs == doctest::Approx(composed).epsilon(1e-12));
      CHECK(r.lhs == doctest::Approx(composed).epsilon(1e-12));
    }
  }
}

TEST_CASE("partition moment of an indicator is the Stirling moment") {
  const FiniteModel m = FiniteModel::pairwise(GroundSpace({1.0, 0.5, 1.5, 0.8}), 0.25, {{0, 1}, {2, 3}});
  const SiteRegion A = [](Site x, SiteSet) { return x != 1; };
  const SiteKernel u = [](Site x, SiteSet) { return x != 1 ? 1.0 : 0.0; };
  const SiteFunctional one = [](SiteSet) { return 1.0; };
  for (int n = 1; n <= 4; ++n) {
    const IdentityReport p = partition_moment_identity(m, u, n), s = stirling_moment_identity(m, one, A, n);
    CHECK(p.lhs == doctest::Approx(s.lhs).epsilon(1e-12));
    CHECK(p.rhs == doctest::Approx(s.rhs).epsilon(1e-12));
  }
}

TEST_CASE("guards and validation") {
  const FiniteModel m = FiniteModel::poisson(GroundSpace({1.0, 1.0, 1.0}));
  const SiteFunctional one = [](SiteSet) { return 1.0; };
  const SiteRegion all = [](Site, SiteSet) { return true; };
  CHECK_THROWS_AS(factorial_moment_identity(m, one, all, 5), RangeError);
  CHECK_THROWS_AS(factorial_moment_identity(m, one, all, 0), RangeError);
  CHECK_THROWS_AS(joint_factorial_identity(m, one, {all, all}, {1, 1}), ValidationError);
  CHECK_THROWS_AS(joint_factorial_identity(m, one, {all}, {1, 1}), ValidationError);
  CHECK_THROWS_AS(joint_factorial_identity(m, one, {all, all}, {3, 2}), RangeError);
}

TEST_CASE("independence of counts for the atomic Poisson model") {
  const std::vector<double> w{0.5, 1.0, 2.0, 0.25, 1.5};
  const FiniteModel m = FiniteModel::poisson(GroundSpace(w));
  const std::vector<SiteRegion> regions{[](Site x, SiteSet) { return x < 2; },
                                        [](Site x, SiteSet) { return x == 2 || x == 4; }};
  const auto reports = poisson_independence_check(m, regions, 3);
  CHECK(reports.size() == 9);  // (n1, n2) with 1 <= n1 + n2 <= 3
  for (const auto& r : reports) CHECK(r.rel_gap <= 1e-12);

  SUBCASE("region that moves between sites of equal weight") {
    const FiniteModel eq = FiniteModel::poisson(GroundSpace({0.7, 0.7, 1.2, 0.3, 2.0}));
    const std::vector<SiteRegion> swap{[](Site x, SiteSet o) { return x == (o.contains(4) ? 0 : 1); },
                                       [](Site x, SiteSet) { return x == 2 || x == 3; }};
    for (const auto& r : poisson_independence_check(eq, swap, 3)) CHECK(r.rel_gap <= 1e-12);
  }
  SUBCASE("precondition failures") {
    const FiniteModel pw = FiniteModel::pairwise(GroundSpace(w), 0.5, {{0, 1}});
    try {
      poisson_independence_check(pw, regions, 2);
      FAIL("expected a precondition error");
    } catch (const IndependencePreconditionError& e) {
      CHECK(e.kind() == IndependenceFailure::NotPoisson);
    }
    // Region moves between sites of different weight.
    const std::vector<SiteRegion> moving{[](Site x, SiteSet o) { return x == (o.contains(4) ? 0 : 1); }};
    try {
      poisson_independence_check(m, moving, 2);
      FAIL("expected a precondition error");
    } catch (const IndependencePreconditionError& e) {
      CHECK(e.kind() == IndependenceFailure::RandomWeight);
    }
    // Equal weights, but adding a site changes its own membership.
    const FiniteModel eq = FiniteModel::poisson(GroundSpace({1.0, 1.0, 1.0}));
    const std::vector<SiteRegion> self{[](Site x, SiteSet o) { return x == (o.contains(1) ? 1 : 0); }};
    try {
      poisson_independence_check(eq, self, 2);
      FAIL("expected a precondition error");
    } catch (const IndependencePreconditionError& e) {
      CHECK(e.kind() == IndependenceFailure::CoverCondition);
    }
    CHECK_THROWS_AS(poisson_independence_check(m, {regions[0], regions[0]}, 2), ValidationError);
  }
}

TEST_CASE("generated regions are disjoint") {
  InstanceBounds b;
  b.max_sites = 10;
  b.regions = 3;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, b, seed);
    CHECK_NOTHROW(validate_disjoint(inst.model(), inst.regions()));
  }
}
