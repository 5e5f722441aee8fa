#include <doctest.h>

#include <memory>

#include "ppm/difference_ops.hpp"
#include "ppm/finite_model.hpp"
#include "ppm/rng.hpp"

using namespace ppm;

namespace {

Functional<SiteSet> random_functional(int m, Rng& rng) {
  auto t = std::make_shared<std::vector<double>>(1u << m);
  for (auto& v : *t) v = rng.uniform(-1.0, 1.0);
  return [t](const SiteSet& o) { return (*t)[o.bits()]; };
}

Kernel<SiteSet> random_kernel(int m, Rng& rng) {
  auto t = std::make_shared<std::vector<double>>(m << m);
  for (auto& v : *t) v = rng.uniform(-1.0, 1.0);
  return [t, m](const Site& x, const SiteSet& o) { return (*t)[(static_cast<std::size_t>(x) << m) + o.bits()]; };
}

}  // namespace

TEST_CASE("single and iterated differences") {
  const Functional<SiteSet> sq = [](const SiteSet& o) { return double(o.size() * o.size()); };
  CHECK(diff<SiteSet>(sq, 2)(SiteSet(0b1)) == 3.0);
  CHECK(diff_iterated<SiteSet>(sq, {0, 1})(SiteSet()) == 2.0);
  CHECK(diff_multi<SiteSet>(sq, {0, 1})(SiteSet()) == 2.0);
  CHECK(diff_multi<SiteSet>(sq, {})(SiteSet(0b11)) == 4.0);
  CHECK(add_points<SiteSet>(sq, {1, 2})(SiteSet(0b1)) == 9.0);
  // Adding a point already present changes nothing.
  CHECK(diff<SiteSet>(sq, 0)(SiteSet(0b1)) == 0.0);
}

TEST_CASE("closed form equals composition") {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 6;
    const auto F = random_functional(m, rng);
    for (int l = 0; l <= 4; ++l) {
      std::vector<Site> theta;
      for (int i = 0; i < l; ++i) theta.push_back(rng.uniform_int(0, m - 1));
      const SiteSet omega(static_cast<std::uint32_t>(rng.bits()) & 0x3f);
      CHECK(diff_multi<SiteSet>(F, theta)(omega) == doctest::Approx(diff_iterated<SiteSet>(F, theta)(omega)));
    }
  }
}

TEST_CASE("addition operator as the sum of all differences") {
  Rng rng(4);
  const int m = 5;
  const auto F = random_functional(m, rng);
  const std::vector<Site> theta{0, 2, 3};
  const SiteSet omega(0b10010);
  double sum = 0.0;
  for_each_subset(IndexSet::full(3), [&](IndexSet eta) {
    std::vector<Site> sub;
    for (int i : eta.elements()) sub.push_back(theta[i]);
    sum += diff_multi<SiteSet>(F, sub)(omega);
  });
  CHECK(sum == doctest::Approx(add_points<SiteSet>(F, theta)(omega)));
}

TEST_CASE("differences on planar configurations") {
  const Functional<PointPattern> F = [](const PointPattern& w) {
    double s = 0.0;
    for (const Point2& p : w) s += p.x * p.y + 0.1;
    return s * s;
  };
  const PointTuple<PointPattern> theta{{0.1, 0.2}, {0.5, -0.3}, {-0.2, 0.7}};
  const PointPattern omega({{0.3, 0.3}, {0.9, 0.1}});
  CHECK(diff_multi<PointPattern>(F, theta)(omega) == doctest::Approx(diff_iterated<PointPattern>(F, theta)(omega)));
}

TEST_CASE("product expansion over covers") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 7;
    const int l = 1 + trial % 4;
    std::vector<Kernel<SiteSet>> kernels;
    std::vector<Site> pts;
    for (int j = 0; j < l; ++j) {
      kernels.push_back(random_kernel(m, rng));
      pts.push_back(j + 1);
    }
    const Sides s = product_expansion_gap<SiteSet>(kernels, pts, SiteSet(static_cast<std::uint32_t>(0b1000001 & rng.bits())));
    CHECK(s.lhs == doctest::Approx(s.rhs).epsilon(1e-12));
  }
  CHECK_THROWS_AS(product_expansion_gap<SiteSet>({}, {}, SiteSet()), RangeError);
  Rng r2(1);
  CHECK_THROWS_AS(product_expansion_gap<SiteSet>({random_kernel(3, r2)}, {0, 1}, SiteSet()), ValidationError);
}

TEST_CASE("cover condition") {
  Rng rng(6);
  const int m = 6;
  SUBCASE("kernels blind to one position satisfy it and the product difference vanishes") {
    for (int trial = 0; trial < 20; ++trial) {
      const int l = 2 + trial % 2;
      const std::vector<Site> pts{0, 1, 2};
      const std::vector<Site> tuple(pts.begin(), pts.begin() + l);
      const Site hidden = tuple[trial % l];
      std::vector<Kernel<SiteSet>> kernels;
      for (int j = 0; j < l; ++j) {
        auto base = random_kernel(m, rng);
        kernels.push_back([base, hidden](const Site& x, const SiteSet& o) { return base(x, o.without(hidden)); });
      }
      const SiteSet omega(0b110000);
      CHECK(cover_condition_holds<SiteSet>(kernels, tuple, omega, 0.0));
      const Sides s = product_expansion_gap<SiteSet>(kernels, tuple, omega);
      CHECK(s.lhs == 0.0);
      CHECK(s.rhs == 0.0);
    }
  }
  SUBCASE("generic kernels violate it") {
    std::vector<Kernel<SiteSet>> kernels{random_kernel(m, rng), random_kernel(m, rng)};
    CHECK_FALSE(cover_condition_holds<SiteSet>(kernels, {0, 1}, SiteSet()));
  }
  SUBCASE("difference table rows") {
    std::vector<double> row{1.0, 3.0, 4.0, 10.0};  // values at ∅, {0}, {1}, {0,1}
    CHECK(difference_from_table(row, IndexSet()) == 1.0);
    CHECK(difference_from_table(row, IndexSet::of({0})) == 2.0);
    CHECK(difference_from_table(row, IndexSet::of({1})) == 3.0);
    CHECK(difference_from_table(row, IndexSet::of({0, 1})) == 4.0);
  }
}
