#pragma once

#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <vector>

#include "ppm/errors.hpp"
#include "ppm/index_set.hpp"

namespace ppm {

/// x (x-1) ... (x-n+1); the empty product 1 when n == 0.
double falling_factorial(double x, int n);

/// Stirling number of the second kind S(n, k), 0 <= k <= n <= 25.
///
/// Read from a table built once by the triangular recurrence
/// S(n, k) = k S(n-1, k) + S(n-1, k-1); every entry in range fits in
/// 64 bits (the largest, in row 25, is below 5e18).
std::uint64_t stirling2(int n, int k);

/// Bell number B_n for 0 <= n <= 25.
std::uint64_t bell(int n);

/// A set partition of {0, ..., n-1}.
///
/// Blocks are nonempty, pairwise disjoint, cover the ground set and are
/// sorted by their smallest element, so equality is structural.
class Partition {
 public:
  Partition(std::vector<IndexSet> blocks, int ground_size);

  const std::vector<IndexSet>& blocks() const { return blocks_; }
  int ground_size() const { return ground_size_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<IndexSet> blocks_;
  int ground_size_;
};

/// An ordered family of subsets of {0, ..., n-1} whose union is the whole set.
///
/// Parts may overlap. Position j of the family is meaningful: in the
/// difference-operator expansions part j is attached to the j-th kernel.
class Cover {
 public:
  Cover(std::vector<IndexSet> parts, int ground_size);

  const std::vector<IndexSet>& parts() const { return parts_; }
  int ground_size() const { return ground_size_; }
  int part_count() const { return static_cast<int>(parts_.size()); }

  friend bool operator==(const Cover&, const Cover&) = default;

 private:
  std::vector<IndexSet> parts_;
  int ground_size_;
};

// Input-range adapter for the lazy streams below: they expose next().
template <class Stream, class Value>
class StreamIterator {
 public:
  using value_type = Value;
  using difference_type = std::ptrdiff_t;

  StreamIterator() = default;
  explicit StreamIterator(Stream* s) : stream_(s) { ++*this; }

  const Value& operator*() const { return *current_; }
  const Value* operator->() const { return &*current_; }
  StreamIterator& operator++() {
    current_ = stream_->next();
    return *this;
  }
  void operator++(int) { ++*this; }
  friend bool operator==(const StreamIterator& it, std::default_sentinel_t) {
    return !it.current_.has_value();
  }

 private:
  Stream* stream_ = nullptr;
  std::optional<Value> current_;
};

/// Lazily enumerates set partitions of {0, ..., n-1}.
///
/// Order: lexicographic in the restricted-growth string a[0..n-1] with
/// a[0] = 0 and a[i] <= 1 + max(a[0..i-1]); block b holds the positions i
/// with a[i] = b. The first partition is the single block, the last the
/// all-singletons partition.
class PartitionStream {
 public:
  explicit PartitionStream(int n);

  std::optional<Partition> next();

  StreamIterator<PartitionStream, Partition> begin() { return StreamIterator<PartitionStream, Partition>(this); }
  std::default_sentinel_t end() const { return {}; }

 private:
  int n_;
  std::vector<int> rgs_;
  std::vector<int> prefix_max_;
  bool started_ = false;
  bool done_ = false;
};

/// Lazily enumerates ordered families (Θ_0, ..., Θ_{k-1}) of subsets of
/// {0, ..., n-1} with union {0, ..., n-1}, for min_parts <= k <= max_parts.
///
/// Order: by k, then lexicographically in the bitmasks (Θ_0, ..., Θ_{k-1})
/// with the last part varying fastest. When allow_empty is false every
/// part is nonempty.
class CoverStream {
 public:
  CoverStream(int n, int min_parts, int max_parts, bool allow_empty);

  std::optional<Cover> next();

  StreamIterator<CoverStream, Cover> begin() { return StreamIterator<CoverStream, Cover>(this); }
  std::default_sentinel_t end() const { return {}; }

 private:
  bool advance();

  int n_;
  int max_parts_;
  std::uint32_t lo_;
  std::uint32_t hi_;
  std::vector<std::uint32_t> masks_;
  bool started_ = false;
  bool done_ = false;
};

/// All partitions of {0, ..., n-1}; 1 <= n <= 12.
PartitionStream partitions(int n);

/// Families of 1..max_parts nonempty subsets covering {0, ..., n-1}; 1 <= n <= 6.
CoverStream covers(int n, int max_parts);

/// Families of exactly `parts` subsets covering {0, ..., n-1}, optionally
/// allowing empty members; 1 <= n <= 6, 1 <= parts <= 6.
CoverStream covers_exact(int n, int parts, bool allow_empty);

/// E[X^n] = Σ_{k=1}^{n} S(n, k) μ_k^f from factorial moments;
/// factorial_moments[k-1] holds μ_k^f.
double moments_from_factorial(std::span<const double> factorial_moments, int n);

/// n-th moment of β_1 Z_{α_1} + ... + β_p Z_{α_p} with independent Poisson
/// Z's, summed over set partitions (1 <= n <= 10).
double compound_poisson_moment(std::span<const double> betas, std::span<const double> alphas, int n);

struct Sides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Both sides of the column-labelled Stirling identity, each by direct
/// enumeration. `alphas` is p x m (row i, column j), `betas` has length p;
/// n <= 5, m <= 4, p <= 3.
///
/// Left side: compositions n_0 + ... + n_{p-1} = n and assignments of the m
/// columns to disjoint row sets I_0, ..., I_{p-1} with |I_i| <= n_i, weighted
/// by multinomial(n; n_i) Π S(n_i, |I_i|) Π |I_i|! / m!.
/// Right side: partitions of {0..n-1} into exactly m blocks with every
/// assignment of blocks to columns (averaged over the m! assignments) and
/// every row tuple (i_0, ..., i_{m-1}).
Sides stir1_gap(const std::vector<std::vector<double>>& alphas, std::span<const double> betas, int n, int m);

}  // namespace ppm

#include "ppm/detail/stir1.hpp"
