#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ppm/combinatorics.hpp"
#include "ppm/rng.hpp"

using namespace ppm;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

// S(n, k) = (1/k!) Σ_j (-1)^{k-j} C(k, j) j^n, in big integers.
cpp_int stirling_explicit(int n, int k) {
  cpp_int sum = 0, binom = 1, kfact = 1;
  for (int i = 2; i <= k; ++i) kfact *= i;
  for (int j = 0; j <= k; ++j) {
    cpp_int term = binom * boost::multiprecision::pow(cpp_int(j), n);
    sum += ((k - j) % 2 == 0) ? term : cpp_int(-term);
    binom = binom * (k - j) / (j + 1);
  }
  return sum / kfact;
}

// Set partitions by inserting element i into an existing block or a new one.
void brute_partitions(int n, std::vector<std::vector<int>>& blocks, int i,
                      const std::function<void(const std::vector<std::vector<int>>&)>& fn) {
  if (i == n) {
    fn(blocks);
    return;
  }
  // By index: the recursion appends to blocks.
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].push_back(i);
    brute_partitions(n, blocks, i + 1, fn);
    blocks[b].pop_back();
  }
  blocks.push_back({i});
  brute_partitions(n, blocks, i + 1, fn);
  blocks.pop_back();
}

// Moments from cumulants: m_n = Σ_k C(n-1, k) κ_{k+1} m_{n-1-k}.
double compound_poisson_by_cumulants(const std::vector<double>& betas, const std::vector<double>& alphas, int n) {
  std::vector<double> kappa(n + 1, 0.0), mom(n + 1, 0.0);
  for (int s = 1; s <= n; ++s)
    for (std::size_t i = 0; i < betas.size(); ++i) kappa[s] += alphas[i] * std::pow(betas[i], s);
  mom[0] = 1.0;
  for (int r = 1; r <= n; ++r) {
    double binom = 1.0;
    for (int k = 0; k < r; ++k) {
      mom[r] += binom * kappa[k + 1] * mom[r - 1 - k];
      binom = binom * (r - 1 - k) / (k + 1);
    }
  }
  return mom[n];
}

// (1/m!) Σ over surjections f: {0..n-1} -> {0..m-1} of
// Π_j Σ_i α_{i,j} β_i^{|f^{-1}(j)|}.
template <class T>
T stir1_by_surjections(const std::vector<std::vector<T>>& alphas, const std::vector<T>& betas, int n, int m) {
  T total(0);
  std::vector<int> f(n, 0);
  long long mfact = 1;
  for (int i = 2; i <= m; ++i) mfact *= i;
  while (true) {
    std::vector<int> sizes(m, 0);
    for (int v : f) ++sizes[v];
    if (std::find(sizes.begin(), sizes.end(), 0) == sizes.end()) {
      T prod(1);
      for (int j = 0; j < m; ++j) {
        T col(0);
        for (std::size_t i = 0; i < betas.size(); ++i) col += alphas[i][j] * detail::power(betas[i], sizes[j]);
        prod *= col;
      }
      total += prod;
    }
    int i = n - 1;
    while (i >= 0 && ++f[i] == m) f[i--] = 0;
    if (i < 0) break;
  }
  return total / T(mfact);
}

}  // namespace

TEST_CASE("falling factorial") {
  CHECK(falling_factorial(5, 3) == 60);
  CHECK(falling_factorial(2.5, 0) == 1);
  CHECK(falling_factorial(2, 4) == 0);
  CHECK(falling_factorial(-2, 3) == -24);
}

TEST_CASE("stirling numbers match the explicit alternating sum") {
  CHECK(stirling2(3, 2) == 3);
  CHECK(stirling2(4, 2) == 7);
  CHECK(stirling2(0, 0) == 1);
  for (int n = 0; n <= 25; ++n) {
    CHECK(stirling2(n, n) == 1);
    for (int k = 0; k <= n; ++k) CHECK(cpp_int(stirling2(n, k)) == stirling_explicit(n, k));
  }
  CHECK_THROWS_AS(stirling2(26, 3), RangeError);
  CHECK_THROWS_AS(stirling2(3, 4), RangeError);
  CHECK_THROWS_AS(stirling2(-1, 0), RangeError);
}

TEST_CASE("stirling inversion of falling factorials is exact") {
  for (int n = 0; n <= 10; ++n)
    for (long long x = -5; x <= 5; ++x) {
      cpp_int sum = 0;
      for (int k = 0; k <= n; ++k) {
        cpp_int ff = 1;
        for (int i = 0; i < k; ++i) ff *= (x - i);
        sum += cpp_int(stirling2(n, k)) * ff;
      }
      CHECK(sum == boost::multiprecision::pow(cpp_int(x), n));
    }
}

TEST_CASE("partition stream") {
  SUBCASE("counts are Bell numbers and agree with stirling sums") {
    for (int n = 1; n <= 10; ++n) {
      std::uint64_t count = 0;
      for (const Partition& p : partitions(n)) {
        (void)p;
        ++count;
      }
      std::uint64_t s = 0;
      for (int k = 0; k <= n; ++k) s += stirling2(n, k);
      CHECK(count == s);
      CHECK(count == bell(n));
    }
  }
  SUBCASE("same set as brute-force insertion") {
    for (int n = 1; n <= 7; ++n) {
      std::set<std::vector<std::uint32_t>> brute, streamed;
      std::vector<std::vector<int>> blocks;
      brute_partitions(n, blocks, 0, [&](const std::vector<std::vector<int>>& bs) {
        std::vector<std::uint32_t> masks;
        for (const auto& b : bs) {
          std::uint32_t m = 0;
          for (int i : b) m |= 1u << i;
          masks.push_back(m);
        }
        std::sort(masks.begin(), masks.end());
        brute.insert(masks);
      });
      for (const Partition& p : partitions(n)) {
        std::vector<std::uint32_t> masks;
        for (IndexSet b : p.blocks()) masks.push_back(b.bits());
        std::sort(masks.begin(), masks.end());
        CHECK(streamed.insert(masks).second);
      }
      CHECK(brute == streamed);
    }
  }
  SUBCASE("order and edge cases") {
    std::vector<Partition> all;
    for (const Partition& p : partitions(3)) all.push_back(p);
    REQUIRE(all.size() == 5);
    CHECK(all.front().block_count() == 1);
    CHECK(all.back().block_count() == 3);
    CHECK(partitions(1).next()->blocks() == std::vector<IndexSet>{IndexSet::of({0})});
    CHECK_THROWS_AS(partitions(0), RangeError);
    CHECK_THROWS_AS(partitions(13), RangeError);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(Partition({IndexSet::of({1}), IndexSet::of({0})}, 2), ValidationError);
    CHECK_THROWS_AS(Partition({IndexSet::of({0, 1}), IndexSet::of({1})}, 2), ValidationError);
    CHECK_THROWS_AS(Partition({IndexSet::of({0})}, 2), ValidationError);
  }
}

TEST_CASE("cover stream") {
  SUBCASE("two parts of {0,1}") {
    std::set<std::pair<std::uint32_t, std::uint32_t>> got;
    for (const Cover& c : covers_exact(2, 2, false)) got.insert({c.parts()[0].bits(), c.parts()[1].bits()});
    const std::set<std::pair<std::uint32_t, std::uint32_t>> want{{1, 2}, {2, 1}, {3, 1}, {1, 3}, {3, 2}, {2, 3}, {3, 3}};
    CHECK(got == want);
  }
  SUBCASE("single cover of {0}") {
    int count = 0;
    for (const Cover& c : covers(1, 1)) {
      CHECK(c.parts() == std::vector<IndexSet>{IndexSet::of({0})});
      ++count;
    }
    CHECK(count == 1);
  }
  SUBCASE("counts against brute force over all tuples of subsets") {
    for (int n = 1; n <= 4; ++n)
      for (int k = 1; k <= 3; ++k)
        for (bool allow_empty : {false, true}) {
          const std::uint32_t subsets = 1u << n;
          std::uint64_t brute = 0;
          std::vector<std::uint32_t> t(k, 0);
          while (true) {
            std::uint32_t u = 0;
            bool ok = true;
            for (auto s : t) {
              u |= s;
              if (!allow_empty && s == 0) ok = false;
            }
            if (ok && u == subsets - 1) ++brute;
            int i = k - 1;
            while (i >= 0 && ++t[i] == subsets) t[i--] = 0;
            if (i < 0) break;
          }
          std::uint64_t count = 0;
          std::set<std::vector<IndexSet>> seen;
          for (const Cover& c : covers_exact(n, k, allow_empty)) {
            ++count;
            CHECK(seen.insert(c.parts()).second);
            IndexSet u;
            for (IndexSet s : c.parts()) u = u | s;
            CHECK(u == IndexSet::full(n));
          }
          CHECK(count == brute);
        }
  }
  SUBCASE("covers(n, max) is the union over part counts") {
    std::uint64_t total = 0, sum = 0;
    for (const Cover& c : covers(3, 3)) {
      (void)c;
      ++total;
    }
    for (int k = 1; k <= 3; ++k)
      for (const Cover& c : covers_exact(3, k, false)) {
        (void)c;
        ++sum;
      }
    CHECK(total == sum);
    CHECK_THROWS_AS(covers(7, 2), RangeError);
    CHECK_THROWS_AS(covers(0, 2), RangeError);
  }
}

TEST_CASE("moments from factorial moments") {
  const std::vector<double> poisson1{1, 1, 1};
  CHECK(moments_from_factorial(poisson1, 3) == doctest::Approx(5));
  CHECK(moments_from_factorial(std::vector<double>{2.5}, 1) == 2.5);
  const std::vector<double> det3{3, 6};
  CHECK(moments_from_factorial(det3, 2) == doctest::Approx(9));
  CHECK_THROWS(moments_from_factorial(std::vector<double>{1.0}, 2));
}

TEST_CASE("compound Poisson moments") {
  const double lambda = 1.7;
  CHECK(compound_poisson_moment(std::vector<double>{1.0}, std::vector<double>{lambda}, 2) ==
        doctest::Approx(lambda + lambda * lambda));
  CHECK(compound_poisson_moment(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 2.0}, 3) == 0.0);
  CHECK(compound_poisson_moment(std::vector<double>{1.0, 1.0}, std::vector<double>{0.3, 0.9}, 1) ==
        doctest::Approx(1.2));
  CHECK_THROWS(compound_poisson_moment(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}, 2));
  CHECK_THROWS_AS(compound_poisson_moment(std::vector<double>{1.0}, std::vector<double>{1.0}, 11), RangeError);

  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 1 + trial % 3;
    std::vector<double> betas(p), alphas(p);
    for (auto& b : betas) b = rng.uniform(-1.5, 1.5);
    for (auto& a : alphas) a = rng.uniform(0.0, 2.0);
    for (int n = 1; n <= 8; ++n) {
      const double want = compound_poisson_by_cumulants(betas, alphas, n);
      CHECK(compound_poisson_moment(betas, alphas, n) == doctest::Approx(want).epsilon(1e-10));
    }
  }
  // Equal betas: Σ_k S(n, k) α^k β^n with α the total rate.
  for (int n = 1; n <= 6; ++n) {
    const double beta = 0.8, a = 1.3;
    std::vector<double> f(n);
    for (int k = 1; k <= n; ++k) f[k - 1] = std::pow(a, k);
    CHECK(compound_poisson_moment(std::vector<double>{beta, beta}, std::vector<double>{0.5, 0.8}, n) ==
          doctest::Approx(std::pow(beta, n) * moments_from_factorial(f, n)).epsilon(1e-12));
  }
}

TEST_CASE("column-labelled Stirling identity") {
  SUBCASE("trivial cases") {
    const Sides zero = stir1_gap({{0.0, 0.0}}, std::vector<double>{0.7}, 3, 2);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    const Sides one = stir1_gap({{1.0}}, std::vector<double>{0.6}, 1, 1);
    CHECK(one.lhs == doctest::Approx(0.6));
    CHECK(one.rhs == doctest::Approx(0.6));
  }
  SUBCASE("exact in rationals, and both sides equal the surjection sum") {
    Rng rng(11);
    for (int n = 1; n <= 4; ++n)
      for (int m = 1; m <= 3; ++m)
        for (int p = 1; p <= 3; ++p) {
          std::vector<std::vector<cpp_rational>> a(p, std::vector<cpp_rational>(m));
          std::vector<cpp_rational> b(p);
          for (auto& row : a)
            for (auto& v : row) v = cpp_rational(rng.uniform_int(-9, 9), rng.uniform_int(1, 7));
          for (auto& v : b) v = cpp_rational(rng.uniform_int(-9, 9), rng.uniform_int(1, 7));
          const cpp_rational lhs = detail::stir1_lhs(a, b, n, m);
          const cpp_rational rhs = detail::stir1_rhs(a, b, n, m);
          CHECK(lhs == rhs);
          CHECK(rhs == stir1_by_surjections(a, b, n, m));
        }
  }
  SUBCASE("floating point within 1e-9 relative") {
    Rng rng(12);
    for (int n = 1; n <= 5; ++n)
      for (int m = 1; m <= 4; ++m)
        for (int p = 1; p <= 3; ++p) {
          std::vector<std::vector<double>> a(p, std::vector<double>(m));
          std::vector<double> b(p);
          for (auto& row : a)
            for (auto& v : row) v = rng.uniform(-1.0, 1.0);
          for (auto& v : b) v = rng.uniform(-1.0, 1.0);
          const Sides s = stir1_gap(a, b, n, m);
          CHECK(std::abs(s.lhs - s.rhs) <= 1e-9 * (1.0 + std::max(std::abs(s.lhs), std::abs(s.rhs))));
        }
  }
  SUBCASE("guards") {
    CHECK_THROWS_AS(stir1_gap({{1.0}}, std::vector<double>{1.0}, 6, 1), RangeError);
    CHECK_THROWS_AS(stir1_gap({{1, 1, 1, 1, 1}}, std::vector<double>{1.0}, 2, 5), RangeError);
    CHECK_THROWS(stir1_gap({{1.0}, {1.0}}, std::vector<double>{1.0}, 2, 1));
  }
}
