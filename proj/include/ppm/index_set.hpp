#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ppm {

/// A subset of the positions {0, ..., 31}, stored as a bitmask.
///
/// Used for partition blocks, cover parts and the position sets Θ of the
/// finite difference operators. Positions are zero-based throughout.
class IndexSet {
 public:
  constexpr IndexSet() = default;
  constexpr explicit IndexSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr IndexSet full(int n) {
    return IndexSet(n >= 32 ? ~0u : ((1u << n) - 1u));
  }
  static constexpr IndexSet of(std::initializer_list<int> elems) {
    std::uint32_t b = 0;
    for (int e : elems) b |= 1u << e;
    return IndexSet(b);
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1u; }
  constexpr IndexSet with(int i) const { return IndexSet(bits_ | (1u << i)); }
  constexpr IndexSet without(int i) const { return IndexSet(bits_ & ~(1u << i)); }
  constexpr bool is_subset_of(IndexSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr int min_element() const { return std::countr_zero(bits_); }

  std::vector<int> elements() const {
    std::vector<int> out;
    out.reserve(size());
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend constexpr IndexSet operator|(IndexSet a, IndexSet b) { return IndexSet(a.bits_ | b.bits_); }
  friend constexpr IndexSet operator&(IndexSet a, IndexSet b) { return IndexSet(a.bits_ & b.bits_); }
  friend constexpr bool operator==(IndexSet, IndexSet) = default;
  friend constexpr auto operator<=>(IndexSet, IndexSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

// Calls fn(eta) for every subset eta of s, including the empty set and s.
template <class Fn>
void for_each_subset(IndexSet s, Fn&& fn) {
  const std::uint32_t full = s.bits();
  std::uint32_t sub = 0;
  while (true) {
    fn(IndexSet(sub));
    if (sub == full) break;
    sub = (sub - full) & full;
  }
}

}  // namespace ppm
