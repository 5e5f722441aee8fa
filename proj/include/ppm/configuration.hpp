#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

namespace ppm {

using Site = int;

/// A configuration of the finite ground space: a set of site indices
/// 0..m-1 (m <= 31), stored as a bitmask.
class SiteSet {
 public:
  constexpr SiteSet() = default;
  constexpr explicit SiteSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr SiteSet all(int m) { return SiteSet(m >= 32 ? ~0u : (1u << m) - 1u); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(Site x) const { return (bits_ >> x) & 1u; }
  constexpr SiteSet with(Site x) const { return SiteSet(bits_ | (1u << x)); }
  constexpr SiteSet without(Site x) const { return SiteSet(bits_ & ~(1u << x)); }
  constexpr bool is_subset_of(SiteSet o) const { return (bits_ & ~o.bits_) == 0; }

  std::vector<Site> sites() const {
    std::vector<Site> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend constexpr SiteSet operator|(SiteSet a, SiteSet b) { return SiteSet(a.bits_ | b.bits_); }
  friend constexpr SiteSet operator&(SiteSet a, SiteSet b) { return SiteSet(a.bits_ & b.bits_); }
  friend constexpr bool operator==(SiteSet, SiteSet) = default;
  friend constexpr auto operator<=>(SiteSet, SiteSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
  friend constexpr auto operator<=>(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double squared_norm(Point2 a) { return dot(a, a); }

/// A finite simple configuration of points in the plane.
///
/// Points are kept in insertion order; inserting a point equal to one
/// already present is a no-op, so the pattern stays simple.
class PointPattern {
 public:
  PointPattern() = default;
  explicit PointPattern(std::vector<Point2> pts) : points_(std::move(pts)) {}

  const std::vector<Point2>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool contains(Point2 p) const { return std::find(points_.begin(), points_.end(), p) != points_.end(); }

  void insert(Point2 p) {
    if (!contains(p)) points_.push_back(p);
  }
  void erase_at(std::size_t i) {
    points_[i] = points_.back();
    points_.pop_back();
  }

  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  friend bool operator==(const PointPattern&, const PointPattern&) = default;

 private:
  std::vector<Point2> points_;
};

// ω ∪ {x}, with set semantics.
inline SiteSet with_point(SiteSet omega, Site x) { return omega.with(x); }
inline PointPattern with_point(PointPattern omega, Point2 x) {
  omega.insert(x);
  return omega;
}

template <class Config>
struct config_traits;

template <>
struct config_traits<SiteSet> {
  using point_type = Site;
};

template <>
struct config_traits<PointPattern> {
  using point_type = Point2;
};

template <class Config>
using point_t = typename config_traits<Config>::point_type;

/// A configuration type the difference operators can act on.
template <class Config>
concept Configuration = requires(Config c, point_t<Config> x) {
  { with_point(c, x) } -> std::convertible_to<Config>;
};

// ω ∪ {x_1, ..., x_n}.
template <Configuration Config>
Config with_points(Config omega, std::span<const point_t<Config>> pts) {
  for (const auto& p : pts) omega = with_point(std::move(omega), p);
  return omega;
}

}  // namespace ppm
