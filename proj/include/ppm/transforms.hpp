#pragma once

// The hull-conditioned transformation: extreme points of ω inside the
// closed unit disk, an area-preserving star rotation of the open hull
// interior, push-forward, the cover-condition check for τ, and the
// Monte Carlo invariance experiments for Poisson input.

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ppm/configuration.hpp"
#include "ppm/montecarlo.hpp"
#include "ppm/stats.hpp"

namespace ppm {

/// Star coordinates of a hull-interior point: x = anchor + s (b(u) - anchor)
/// where b(u) is the boundary point at normalized cumulative sector area u.
struct StarCoords {
  double s = 0.0;
  double u = 0.0;
};

class HullFrame {
 public:
  /// Vertices must be CCW and strictly convex (at least three).
  explicit HullFrame(std::vector<Point2> ccw_vertices);

  const std::vector<Point2>& extremal_vertices() const { return vertices_; }
  Point2 anchor() const { return anchor_; }
  double area() const { return total_; }

  /// Distance from the anchor to the hull boundary along direction angle.
  double boundary_radius(double angle) const;
  /// Area of the hull swept counterclockwise from the ray through vertex 0
  /// to the ray at `angle`, in [0, area()).
  double cumulative_area(double angle) const;

  bool in_interior(Point2 p) const;
  StarCoords to_star(Point2 p) const;
  Point2 from_star(StarCoords c) const;

 private:
  std::size_t sector_of_angle(double angle) const;
  std::size_t sector_of(Point2 p) const;

  std::vector<Point2> vertices_;
  Point2 anchor_;
  std::vector<double> angles_;     // vertex angles about the anchor, increasing from angles_[0]
  std::vector<double> sector_;     // triangle areas (anchor, v_i, v_{i+1})
  std::vector<double> cumulative_;  // prefix sums of sector_, cumulative_[0] = 0
  double total_ = 0.0;
};

/// Extreme points of ω ∩ {|x| <= 1}; empty when there are fewer than three.
std::optional<HullFrame> hull_frame(const PointPattern& omega);

struct TransformSpec {
  /// Fraction of the hull area by which interior points are rotated; [0, 1).
  double rotation_offset = 0.0;

  void validate() const;
};

/// τ(x, ω): identity unless the hull frame exists and x lies in its open
/// interior; there the normalized cumulative-area coordinate is shifted by
/// the offset modulo 1 with the radial fraction kept.
Point2 apply_tau(const TransformSpec& spec, Point2 x, const PointPattern& omega);
Point2 apply_tau(const TransformSpec& spec, Point2 x, const std::optional<HullFrame>& frame);

/// τ*ω = {τ(x, ω) : x ∈ ω}. Throws Error if two images coincide.
PointPattern push_forward(const TransformSpec& spec, const PointPattern& omega);

/// Runs the cover-condition checker for kernels built from τ: every choice
/// of a coordinate of τ per position, and every choice of indicator 1_B∘τ
/// per position over a fixed family of boxes. tuple length 1..3.
bool verify_ffjkl_condition(const TransformSpec& spec, const PointPattern& omega,
                            const std::vector<Point2>& tuple, double tol = 1e-9);

// Fixed planar test sets.

struct Box {
  double x_min, x_max, y_min, y_max;
};
struct Disk {
  Point2 center;
  double radius;
};
using PlanarSet = std::variant<Box, Disk>;

double area(const PlanarSet& set);
bool contains(const PlanarSet& set, Point2 p);
bool inside_unit_disk(const PlanarSet& set);
/// Interiors do not meet (shared boundary allowed).
bool interiors_disjoint(const PlanarSet& a, const PlanarSet& b);

/// {"box": [x_min, x_max, y_min, y_max]} or {"disk": [cx, cy, r]}.
PlanarSet parse_planar_set(const nlohmann::json& j);
nlohmann::json to_json(const PlanarSet& set);

struct RegionStats {
  double expected_mean = 0.0;
  stats::ChiSquareResult gof;
  std::array<Estimate, 3> factorial;  // N_(1), N_(2), N_(3)
  std::array<double, 3> factorial_z{};
  /// Transformed minus untransformed count on the same draw.
  Estimate baseline_difference;
  double baseline_z = 0.0;
};

struct CovarianceStats {
  int i = 0;
  int j = 0;
  Estimate covariance;
  double z = 0.0;
};

struct InvarianceReport {
  std::vector<RegionStats> regions;
  std::vector<CovarianceStats> covariances;
  std::int64_t replicates = 0;

  double max_abs_z() const;
  double min_p_value() const;
  bool passes(double z_gate = 4.0, double p_gate = 1e-3) const;
};

void to_json(nlohmann::json& j, const InvarianceReport& r);

/// Samples Poisson(intensity) on the window, pushes each draw forward and
/// tests the region counts: Poisson fit per region, pairwise covariances,
/// factorial moments up to order 3, and the paired difference to the counts
/// of the untransformed draw. Regions must lie in the unit disk, have
/// disjoint interiors, and the window must contain the unit disk.
InvarianceReport invariance_suite(const TransformSpec& spec, const Window& window, double intensity,
                                  const std::vector<PlanarSet>& regions, std::int64_t n_replicates,
                                  std::uint64_t seed);

struct MomentCheck {
  std::vector<int> boxes;  // one index: first moment; two: N(B_i) N(B_j); repeated: N(B_i)_(2)
  Estimate estimate;
  double expected = 0.0;
  double z = 0.0;
};

struct RhoTauReport {
  std::vector<Box> boxes;
  std::vector<MomentCheck> checks;
  std::int64_t replicates = 0;

  double max_abs_z() const;
  bool passes(double z_gate = 4.0) const;
};

void to_json(nlohmann::json& j, const RhoTauReport& r);

/// First and second factorial moment measures of τ*ω on a 2x2 grid of
/// boxes covering [-1/2, 1/2]^2, against λ|B| and λ²|B_i||B_j|.
RhoTauReport rho_tau_check(const TransformSpec& spec, const Window& window, double intensity,
                           std::int64_t n_replicates, std::uint64_t seed);

}  // namespace ppm
