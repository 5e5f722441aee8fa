#pragma once

// Addition operators ε⁺, finite differences D_x and D_Θ, the product
// (Leibniz-type) expansion over covers, and the cover-condition checker.
//
// Everything here is generic over the configuration type: SiteSet for the
// finite engine, PointPattern for planar windows.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ppm/combinatorics.hpp"
#include "ppm/configuration.hpp"
#include "ppm/errors.hpp"
#include "ppm/index_set.hpp"

namespace ppm {

template <class Config>
using Functional = std::function<double(const Config&)>;

template <class Config>
using Kernel = std::function<double(const point_t<Config>&, const Config&)>;

template <class Config>
using PointTuple = std::vector<point_t<Config>>;

/// ω ↦ F(ω ∪ {x_1, ..., x_n}).
template <Configuration Config>
Functional<Config> add_points(Functional<Config> f, PointTuple<Config> tuple) {
  return [f = std::move(f), tuple = std::move(tuple)](const Config& omega) {
    return f(with_points<Config>(omega, tuple));
  };
}

/// D_x F(ω) = F(ω ∪ {x}) - F(ω).
template <Configuration Config>
Functional<Config> diff(Functional<Config> f, point_t<Config> x) {
  return [f = std::move(f), x = std::move(x)](const Config& omega) { return f(with_point(omega, x)) - f(omega); };
}

/// D_Θ F = D_{θ_1} ∘ ... ∘ D_{θ_k} F by repeated application of diff.
template <Configuration Config>
Functional<Config> diff_iterated(Functional<Config> f, const PointTuple<Config>& theta) {
  for (const auto& x : theta) f = diff<Config>(std::move(f), x);
  return f;
}

/// D_Θ F(ω) = Σ_{η⊆Θ} (-1)^{|Θ|-|η|} F(ω ∪ η), the closed form of the
/// iterated difference. D_∅ is the identity.
template <Configuration Config>
Functional<Config> diff_multi(Functional<Config> f, PointTuple<Config> theta) {
  if (theta.size() >= 32) throw RangeError("diff_multi: at most 31 points");
  return [f = std::move(f), theta = std::move(theta)](const Config& omega) {
    const int k = static_cast<int>(theta.size());
    double acc = 0.0;
    for_each_subset(IndexSet::full(k), [&](IndexSet eta) {
      Config c = omega;
      for (int i : eta.elements()) c = with_point(std::move(c), theta[i]);
      const double v = f(c);
      acc += ((k - eta.size()) % 2 == 0) ? v : -v;
    });
    return acc;
  };
}

/// Values u_j(x_j, ω ∪ {x_i : i ∈ η}) for every position j and every
/// η ⊆ {0..l-1}; table[j][η.bits()].
template <Configuration Config>
std::vector<std::vector<double>> kernel_difference_table(const std::vector<Kernel<Config>>& kernels,
                                                         const PointTuple<Config>& points, const Config& omega) {
  const int l = static_cast<int>(points.size());
  const std::uint32_t count = 1u << l;
  std::vector<Config> augmented(count);
  for (std::uint32_t b = 0; b < count; ++b) {
    Config c = omega;
    for (int i : IndexSet(b).elements()) c = with_point(std::move(c), points[i]);
    augmented[b] = std::move(c);
  }
  std::vector<std::vector<double>> table(l, std::vector<double>(count));
  for (int j = 0; j < l; ++j)
    for (std::uint32_t b = 0; b < count; ++b) table[j][b] = kernels[j](points[j], augmented[b]);
  return table;
}

// D_Θ applied to one row of a difference table, one point of Θ at a time,
// so a row that ignores some θ ∈ Θ yields exactly 0.
inline double difference_from_table(const std::vector<double>& row, IndexSet theta) {
  const std::vector<int> elems = theta.elements();
  const int k = static_cast<int>(elems.size());
  // v[c] holds the value at the subset of Θ encoded by the k-bit code c.
  std::vector<double> v(std::size_t{1} << k);
  for (std::uint32_t c = 0; c < v.size(); ++c) {
    std::uint32_t bits = 0;
    for (int i = 0; i < k; ++i)
      if ((c >> i) & 1u) bits |= 1u << elems[i];
    v[c] = row[bits];
  }
  for (int i = 0; i < k; ++i)
    for (std::uint32_t c = 0; c < v.size(); ++c)
      if (!((c >> i) & 1u)) v[c] = v[c | (1u << i)] - v[c];
  return v[0];
}

namespace detail {

template <class Config>
void check_kernel_tuple(const std::vector<Kernel<Config>>& kernels, const PointTuple<Config>& points,
                        const char* who) {
  if (kernels.size() != points.size())
    throw ValidationError(std::string(who) + ": kernels and points must have equal length");
  if (points.empty() || points.size() > 4)
    throw RangeError(std::string(who) + ": need 1 <= length <= 4");
}

}  // namespace detail

/// Both sides of the product expansion at ω:
/// lhs = D_{x_1} ... D_{x_l} (Π_j u_j(x_j, ·)) (ω), via iterated diff;
/// rhs = Σ over (possibly empty) Θ_1..Θ_l with union {1..l} of
///       Π_j D_{Θ_j} u_j(x_j, ω), via the difference table.
template <Configuration Config>
Sides product_expansion_gap(const std::vector<Kernel<Config>>& kernels, const PointTuple<Config>& points,
                            const Config& omega) {
  detail::check_kernel_tuple(kernels, points, "product_expansion_gap");
  const int l = static_cast<int>(points.size());

  Functional<Config> product = [kernels, points](const Config& w) {
    double p = 1.0;
    for (std::size_t j = 0; j < kernels.size(); ++j) p *= kernels[j](points[j], w);
    return p;
  };
  Sides out;
  out.lhs = diff_iterated<Config>(product, points)(omega);

  const auto table = kernel_difference_table<Config>(kernels, points, omega);
  for (const Cover& cover : covers_exact(l, l, /*allow_empty=*/true)) {
    double term = 1.0;
    for (int j = 0; j < l && term != 0.0; ++j) term *= difference_from_table(table[j], cover.parts()[j]);
    out.rhs += term;
  }
  return out;
}

/// True iff |Π_j D_{Θ_j} u_j(x_j, ω)| <= tol for every family of nonempty
/// Θ_1..Θ_m with union {1..m}.
template <Configuration Config>
bool cover_condition_holds(const std::vector<Kernel<Config>>& kernels, const PointTuple<Config>& points,
                           const Config& omega, double tol = 1e-12) {
  detail::check_kernel_tuple(kernels, points, "cover_condition_holds");
  const int m = static_cast<int>(points.size());
  const auto table = kernel_difference_table<Config>(kernels, points, omega);

  // Differences D_Θ u_j for every nonempty Θ, computed once.
  const std::uint32_t count = 1u << m;
  std::vector<std::vector<double>> d(m, std::vector<double>(count, 0.0));
  for (int j = 0; j < m; ++j)
    for (std::uint32_t b = 1; b < count; ++b) d[j][b] = difference_from_table(table[j], IndexSet(b));

  for (const Cover& cover : covers_exact(m, m, /*allow_empty=*/false)) {
    double term = 1.0;
    for (int j = 0; j < m && term != 0.0; ++j) term *= d[j][cover.parts()[j].bits()];
    if (!(std::abs(term) <= tol)) return false;
  }
  return true;
}

}  // namespace ppm
