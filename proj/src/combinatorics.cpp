#include "ppm/combinatorics.hpp"

#include <array>
#include <string>

namespace ppm {

namespace {

constexpr int kStirlingMax = 25;
constexpr int kPartitionMax = 12;
constexpr int kCoverMax = 6;

using StirlingTable = std::array<std::array<std::uint64_t, kStirlingMax + 1>, kStirlingMax + 1>;

const StirlingTable& stirling_table() {
  static const StirlingTable table = [] {
    StirlingTable t{};
    t[0][0] = 1;
    for (int n = 1; n <= kStirlingMax; ++n)
      for (int k = 1; k <= n; ++k)
        t[n][k] = static_cast<std::uint64_t>(k) * t[n - 1][k] + t[n - 1][k - 1];
    return t;
  }();
  return table;
}

void check_range(bool ok, const std::string& what) {
  if (!ok) throw RangeError(what);
}

}  // namespace

double falling_factorial(double x, int n) {
  check_range(n >= 0, "falling_factorial: n must be nonnegative");
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= x - i;
  return out;
}

std::uint64_t stirling2(int n, int k) {
  check_range(0 <= k && k <= n && n <= kStirlingMax,
              "stirling2: need 0 <= k <= n <= 25, got n=" + std::to_string(n) + " k=" + std::to_string(k));
  return stirling_table()[n][k];
}

std::uint64_t bell(int n) {
  check_range(0 <= n && n <= kStirlingMax, "bell: need 0 <= n <= 25");
  std::uint64_t b = 0;
  for (int k = 0; k <= n; ++k) b += stirling_table()[n][k];
  return b;
}

Partition::Partition(std::vector<IndexSet> blocks, int ground_size)
    : blocks_(std::move(blocks)), ground_size_(ground_size) {
  std::uint32_t seen = 0;
  int prev_min = -1;
  for (IndexSet b : blocks_) {
    if (b.empty()) throw ValidationError("Partition: empty block");
    if ((seen & b.bits()) != 0) throw ValidationError("Partition: overlapping blocks");
    if (b.min_element() <= prev_min) throw ValidationError("Partition: blocks not in canonical order");
    prev_min = b.min_element();
    seen |= b.bits();
  }
  if (IndexSet(seen) != IndexSet::full(ground_size_))
    throw ValidationError("Partition: blocks do not cover the ground set");
}

Cover::Cover(std::vector<IndexSet> parts, int ground_size)
    : parts_(std::move(parts)), ground_size_(ground_size) {
  IndexSet seen;
  for (IndexSet p : parts_) seen = seen | p;
  if (seen != IndexSet::full(ground_size_)) throw ValidationError("Cover: parts do not cover the ground set");
}

PartitionStream::PartitionStream(int n) : n_(n), rgs_(n, 0), prefix_max_(n, 0) {
  check_range(1 <= n && n <= kPartitionMax, "partitions: need 1 <= n <= 12, got " + std::to_string(n));
}

std::optional<Partition> PartitionStream::next() {
  if (done_) return std::nullopt;
  if (started_) {
    // Increment the rightmost position that may still grow.
    int i = n_ - 1;
    while (i > 0 && rgs_[i] == prefix_max_[i - 1] + 1) --i;
    if (i == 0) {
      done_ = true;
      return std::nullopt;
    }
    ++rgs_[i];
    prefix_max_[i] = std::max(prefix_max_[i - 1], rgs_[i]);
    for (int j = i + 1; j < n_; ++j) {
      rgs_[j] = 0;
      prefix_max_[j] = prefix_max_[i];
    }
  }
  started_ = true;
  std::vector<IndexSet> blocks(prefix_max_[n_ - 1] + 1);
  for (int i = 0; i < n_; ++i) blocks[rgs_[i]] = blocks[rgs_[i]].with(i);
  return Partition(std::move(blocks), n_);
}

CoverStream::CoverStream(int n, int min_parts, int max_parts, bool allow_empty)
    : n_(n), max_parts_(max_parts), lo_(allow_empty ? 0u : 1u), hi_(IndexSet::full(n).bits()) {
  check_range(1 <= n && n <= kCoverMax, "covers: need 1 <= n <= 6, got " + std::to_string(n));
  check_range(1 <= min_parts && min_parts <= max_parts && max_parts <= 32, "covers: bad part-count range");
  masks_.assign(min_parts, lo_);
}

bool CoverStream::advance() {
  int i = static_cast<int>(masks_.size()) - 1;
  while (i >= 0 && masks_[i] == hi_) masks_[i--] = lo_;
  if (i >= 0) {
    ++masks_[i];
    return true;
  }
  if (static_cast<int>(masks_.size()) == max_parts_) return false;
  masks_.assign(masks_.size() + 1, lo_);
  return true;
}

std::optional<Cover> CoverStream::next() {
  if (done_) return std::nullopt;
  while (true) {
    if (started_ && !advance()) {
      done_ = true;
      return std::nullopt;
    }
    started_ = true;
    std::uint32_t u = 0;
    for (auto b : masks_) u |= b;
    if (u == hi_) {
      std::vector<IndexSet> parts;
      parts.reserve(masks_.size());
      for (auto b : masks_) parts.emplace_back(b);
      return Cover(std::move(parts), n_);
    }
  }
}

PartitionStream partitions(int n) { return PartitionStream(n); }

CoverStream covers(int n, int max_parts) {
  check_range(max_parts >= 1, "covers: max_parts must be positive");
  return CoverStream(n, 1, max_parts, false);
}

CoverStream covers_exact(int n, int parts, bool allow_empty) {
  check_range(1 <= parts && parts <= kCoverMax, "covers_exact: need 1 <= parts <= 6");
  return CoverStream(n, parts, parts, allow_empty);
}

double moments_from_factorial(std::span<const double> factorial_moments, int n) {
  check_range(n >= 1, "moments_from_factorial: n must be positive");
  if (static_cast<int>(factorial_moments.size()) < n)
    throw ValidationError("moments_from_factorial: need " + std::to_string(n) + " factorial moments, got " +
                          std::to_string(factorial_moments.size()));
  check_range(n <= kStirlingMax, "moments_from_factorial: n must be <= 25");
  double out = 0.0;
  for (int k = 1; k <= n; ++k) out += static_cast<double>(stirling2(n, k)) * factorial_moments[k - 1];
  return out;
}

double compound_poisson_moment(std::span<const double> betas, std::span<const double> alphas, int n) {
  if (betas.size() != alphas.size() || betas.empty())
    throw ValidationError("compound_poisson_moment: betas and alphas must have equal positive length");
  check_range(1 <= n && n <= 10, "compound_poisson_moment: need 1 <= n <= 10");
  for (double a : alphas)
    if (!(a >= 0.0)) throw ValidationError("compound_poisson_moment: alphas must be nonnegative");

  // cumulant[s] = Σ_i α_i β_i^s: the indices i_1..i_m factor block by block.
  std::vector<double> cumulant(n + 1, 0.0);
  for (int s = 1; s <= n; ++s)
    for (std::size_t i = 0; i < betas.size(); ++i) cumulant[s] += alphas[i] * detail::power(betas[i], s);

  double total = 0.0;
  for (const Partition& p : partitions(n)) {
    double term = 1.0;
    for (IndexSet b : p.blocks()) term *= cumulant[b.size()];
    total += term;
  }
  return total;
}

Sides stir1_gap(const std::vector<std::vector<double>>& alphas, std::span<const double> betas, int n, int m) {
  const int p = static_cast<int>(betas.size());
  check_range(1 <= n && n <= 5, "stir1_gap: need 1 <= n <= 5");
  check_range(1 <= m && m <= 4, "stir1_gap: need 1 <= m <= 4");
  check_range(1 <= p && p <= 3, "stir1_gap: need 1 <= p <= 3");
  if (static_cast<int>(alphas.size()) != p) throw ValidationError("stir1_gap: alphas must have p rows");
  for (const auto& row : alphas)
    if (static_cast<int>(row.size()) != m) throw ValidationError("stir1_gap: alphas must have m columns");
  std::vector<double> b(betas.begin(), betas.end());
  return {detail::stir1_lhs(alphas, b, n, m), detail::stir1_rhs(alphas, b, n, m)};
}

}  // namespace ppm
