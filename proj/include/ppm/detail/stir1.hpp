#pragma once

// Scalar-generic evaluation of both sides of the column-labelled Stirling
// identity; instantiated with double by stir1_gap and with exact rationals
// in the tests.

#include <algorithm>
#include <numeric>
#include <vector>

namespace ppm::detail {

inline std::uint64_t factorial_u64(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

template <class T>
T power(const T& base, int e) {
  T out(1);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

// Calls fn(parts) for every composition of n into p nonnegative parts.
template <class Fn>
void for_each_composition(int n, int p, Fn&& fn) {
  std::vector<int> parts(p, 0);
  auto rec = [&](auto&& self, int i, int remaining) -> void {
    if (i == p - 1) {
      parts[i] = remaining;
      fn(static_cast<const std::vector<int>&>(parts));
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      parts[i] = v;
      self(self, i + 1, remaining - v);
    }
  };
  rec(rec, 0, n);
}

// Calls fn(tuple) for every tuple in {0..p-1}^m, last entry fastest.
template <class Fn>
void for_each_tuple(int p, int m, Fn&& fn) {
  std::vector<int> t(m, 0);
  while (true) {
    fn(static_cast<const std::vector<int>&>(t));
    int i = m - 1;
    while (i >= 0 && ++t[i] == p) t[i--] = 0;
    if (i < 0) return;
  }
}

template <class T>
T stir1_lhs(const std::vector<std::vector<T>>& alphas, const std::vector<T>& betas, int n, int m) {
  const int p = static_cast<int>(betas.size());
  T total(0);
  const T m_fact(static_cast<long long>(factorial_u64(m)));
  for_each_composition(n, p, [&](const std::vector<int>& ns) {
    std::uint64_t multinomial = factorial_u64(n);
    for (int v : ns) multinomial /= factorial_u64(v);
    // row_of[j]: the row set I_i that column j belongs to.
    for_each_tuple(p, m, [&](const std::vector<int>& row_of) {
      std::vector<int> sizes(p, 0);
      for (int r : row_of) ++sizes[r];
      for (int i = 0; i < p; ++i)
        if (sizes[i] > ns[i]) return;
      T term(static_cast<long long>(multinomial));
      for (int i = 0; i < p; ++i) {
        term *= T(static_cast<long long>(stirling2(ns[i], sizes[i])));
        term *= T(static_cast<long long>(factorial_u64(sizes[i])));
        term *= power(betas[i], ns[i]);
      }
      for (int j = 0; j < m; ++j) term *= alphas[row_of[j]][j];
      total += term / m_fact;
    });
  });
  return total;
}

template <class T>
T stir1_rhs(const std::vector<std::vector<T>>& alphas, const std::vector<T>& betas, int n, int m) {
  const int p = static_cast<int>(betas.size());
  T total(0);
  const T m_fact(static_cast<long long>(factorial_u64(m)));
  for (const Partition& part : partitions(n)) {
    if (part.block_count() != m) continue;
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    do {
      // Column j receives block order[j].
      for_each_tuple(p, m, [&](const std::vector<int>& rows) {
        T term(1);
        for (int j = 0; j < m; ++j) {
          term *= power(betas[rows[j]], part.blocks()[order[j]].size());
          term *= alphas[rows[j]][j];
        }
        total += term / m_fact;
      });
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return total;
}

}  // namespace ppm::detail
