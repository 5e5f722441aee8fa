#include "ppm/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ppm/difference_ops.hpp"
#include "ppm/errors.hpp"
#include "ppm/geometry.hpp"

namespace ppm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

HullFrame::HullFrame(std::vector<Point2> ccw_vertices) : vertices_(std::move(ccw_vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw ValidationError("HullFrame: need at least three vertices");
  Point2 sum;
  for (const Point2& v : vertices_) sum = sum + v;
  anchor_ = (1.0 / static_cast<double>(n)) * sum;

  angles_.resize(n);
  sector_.resize(n);
  cumulative_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 d = vertices_[i] - anchor_;
    double a = std::atan2(d.y, d.x);
    if (i > 0)
      while (a <= angles_[i - 1]) a += kTwoPi;
    angles_[i] = a;
    sector_[i] = 0.5 * cross(vertices_[i] - anchor_, vertices_[(i + 1) % n] - anchor_);
    if (!(sector_[i] > 0.0)) throw ValidationError("HullFrame: vertices must be strictly convex and CCW");
    cumulative_[i + 1] = cumulative_[i] + sector_[i];
  }
  total_ = cumulative_[n];
}

std::size_t HullFrame::sector_of_angle(double angle) const {
  double a = std::fmod(angle - angles_[0], kTwoPi);
  if (a < 0.0) a += kTwoPi;
  a += angles_[0];
  const auto it = std::upper_bound(angles_.begin(), angles_.end(), a);
  return it == angles_.begin() ? 0 : static_cast<std::size_t>(it - angles_.begin()) - 1;
}

std::size_t HullFrame::sector_of(Point2 p) const {
  const Point2 d = p - anchor_;
  return sector_of_angle(std::atan2(d.y, d.x));
}

double HullFrame::boundary_radius(double angle) const {
  const std::size_t i = sector_of_angle(angle);
  const Point2 w{std::cos(angle), std::sin(angle)};
  const Point2 vi = vertices_[i] - anchor_;
  const Point2 e = vertices_[(i + 1) % vertices_.size()] - vertices_[i];
  return cross(vi, e) / cross(w, e);
}

double HullFrame::cumulative_area(double angle) const {
  const std::size_t i = sector_of_angle(angle);
  const Point2 w{std::cos(angle), std::sin(angle)};
  const Point2 vi = vertices_[i] - anchor_;
  const Point2 e = vertices_[(i + 1) % vertices_.size()] - vertices_[i];
  const double t = std::clamp(-cross(vi, w) / cross(e, w), 0.0, 1.0);
  return cumulative_[i] + t * sector_[i];
}

bool HullFrame::in_interior(Point2 p) const { return geometry::in_open_convex_polygon(vertices_, p); }

StarCoords HullFrame::to_star(Point2 p) const {
  const Point2 d = p - anchor_;
  if (d.x == 0.0 && d.y == 0.0) return {0.0, 0.0};
  const std::size_t i = sector_of(p);
  const Point2 vi = vertices_[i] - anchor_;
  const Point2 e = vertices_[(i + 1) % vertices_.size()] - vertices_[i];
  const double t = std::clamp(-cross(vi, d) / cross(e, d), 0.0, 1.0);
  StarCoords c;
  c.s = cross(d, e) / cross(vi, e);
  c.u = (cumulative_[i] + t * sector_[i]) / total_;
  if (c.u >= 1.0) c.u -= 1.0;
  return c;
}

Point2 HullFrame::from_star(StarCoords c) const {
  const double area_u = c.u * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end() - 1, area_u);
  std::size_t i = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  i = std::min(i, vertices_.size() - 1);
  const double t = std::clamp((area_u - cumulative_[i]) / sector_[i], 0.0, 1.0);
  const Point2 vi = vertices_[i];
  const Point2 b = vi + t * (vertices_[(i + 1) % vertices_.size()] - vi);
  return anchor_ + c.s * (b - anchor_);
}

std::optional<HullFrame> hull_frame(const PointPattern& omega) {
  std::vector<Point2> in_disk;
  for (const Point2& p : omega)
    if (squared_norm(p) <= 1.0) in_disk.push_back(p);
  std::vector<Point2> hull = geometry::convex_hull(std::move(in_disk));
  if (hull.size() < 3) return std::nullopt;
  return HullFrame(std::move(hull));
}

void TransformSpec::validate() const {
  if (!(rotation_offset >= 0.0 && rotation_offset < 1.0))
    throw ValidationError("TransformSpec: rotation_offset must lie in [0, 1)");
}

Point2 apply_tau(const TransformSpec& spec, Point2 x, const std::optional<HullFrame>& frame) {
  if (spec.rotation_offset == 0.0 || !frame || !frame->in_interior(x)) return x;
  StarCoords c = frame->to_star(x);
  c.u += spec.rotation_offset;
  if (c.u >= 1.0) c.u -= 1.0;
  return frame->from_star(c);
}

Point2 apply_tau(const TransformSpec& spec, Point2 x, const PointPattern& omega) {
  if (spec.rotation_offset == 0.0) return x;
  return apply_tau(spec, x, hull_frame(omega));
}

PointPattern push_forward(const TransformSpec& spec, const PointPattern& omega) {
  if (spec.rotation_offset == 0.0) return omega;
  const auto frame = hull_frame(omega);
  if (!frame) return omega;
  std::vector<Point2> images;
  images.reserve(omega.size());
  for (const Point2& x : omega) images.push_back(apply_tau(spec, x, frame));
  std::vector<Point2> sorted = images;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("push_forward: two points have the same image");
  return PointPattern(std::move(images));
}

bool verify_ffjkl_condition(const TransformSpec& spec, const PointPattern& omega, const std::vector<Point2>& tuple,
                            double tol) {
  spec.validate();
  const int m = static_cast<int>(tuple.size());
  if (m < 1 || m > 3) throw RangeError("verify_ffjkl_condition: need 1 <= tuple length <= 3");

  static const std::array<Box, 4> family{
      Box{-0.5, 0.0, -0.5, 0.0}, Box{0.0, 0.5, -0.5, 0.0}, Box{-0.5, 0.0, 0.0, 0.5}, Box{-0.3, 0.6, -0.1, 0.7}};
  using K = PlanarKernel;
  const auto coord = [&spec](int c) -> K {
    return [&spec, c](const Point2& x, const PointPattern& w) {
      const Point2 y = apply_tau(spec, x, w);
      return c == 0 ? y.x : y.y;
    };
  };
  const auto indicator = [&spec](const Box& b) -> K {
    return [&spec, b](const Point2& x, const PointPattern& w) {
      return contains(PlanarSet{b}, apply_tau(spec, x, w)) ? 1.0 : 0.0;
    };
  };

  // Coordinate kernels: one of x, y per position.
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<K> kernels;
    for (int j = 0; j < m; ++j) kernels.push_back(coord((mask >> j) & 1));
    if (!cover_condition_holds<PointPattern>(kernels, tuple, omega, tol)) return false;
  }
  // Box indicators: one family member per position.
  int combos = 1;
  for (int j = 0; j < m; ++j) combos *= static_cast<int>(family.size());
  for (int c = 0; c < combos; ++c) {
    std::vector<K> kernels;
    for (int j = 0, r = c; j < m; ++j, r /= static_cast<int>(family.size()))
      kernels.push_back(indicator(family[r % family.size()]));
    if (!cover_condition_holds<PointPattern>(kernels, tuple, omega, tol)) return false;
  }
  return true;
}

double area(const PlanarSet& set) {
  if (const auto* b = std::get_if<Box>(&set)) return (b->x_max - b->x_min) * (b->y_max - b->y_min);
  const auto& d = std::get<Disk>(set);
  return std::numbers::pi * d.radius * d.radius;
}

bool contains(const PlanarSet& set, Point2 p) {
  if (const auto* b = std::get_if<Box>(&set))
    return p.x >= b->x_min && p.x <= b->x_max && p.y >= b->y_min && p.y <= b->y_max;
  const auto& d = std::get<Disk>(set);
  return squared_norm(p - d.center) <= d.radius * d.radius;
}

bool inside_unit_disk(const PlanarSet& set) {
  if (const auto* b = std::get_if<Box>(&set)) {
    for (double x : {b->x_min, b->x_max})
      for (double y : {b->y_min, b->y_max})
        if (x * x + y * y > 1.0) return false;
    return true;
  }
  const auto& d = std::get<Disk>(set);
  return std::sqrt(squared_norm(d.center)) + d.radius <= 1.0;
}

namespace {

double distance_to_box(Point2 p, const Box& b) {
  const double dx = std::max({b.x_min - p.x, 0.0, p.x - b.x_max});
  const double dy = std::max({b.y_min - p.y, 0.0, p.y - b.y_max});
  return std::hypot(dx, dy);
}

}  // namespace

bool interiors_disjoint(const PlanarSet& a, const PlanarSet& b) {
  const auto* ba = std::get_if<Box>(&a);
  const auto* bb = std::get_if<Box>(&b);
  if (ba && bb)
    return ba->x_max <= bb->x_min || bb->x_max <= ba->x_min || ba->y_max <= bb->y_min || bb->y_max <= ba->y_min;
  if (!ba && !bb) {
    const auto& da = std::get<Disk>(a);
    const auto& db = std::get<Disk>(b);
    return std::sqrt(squared_norm(da.center - db.center)) >= da.radius + db.radius;
  }
  const Box& box = ba ? *ba : *bb;
  const Disk& disk = ba ? std::get<Disk>(b) : std::get<Disk>(a);
  return distance_to_box(disk.center, box) >= disk.radius;
}

PlanarSet parse_planar_set(const nlohmann::json& j) {
  const auto numbers = [](const nlohmann::json& v, std::size_t n, const char* what) {
    if (!v.is_array() || v.size() != n) throw ValidationError(std::string("region: ") + what + " needs " +
                                                             std::to_string(n) + " numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ValidationError(std::string("region: ") + what + " entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  };
  if (!j.is_object()) throw ValidationError("region: expected an object");
  if (j.contains("box")) {
    const auto v = numbers(j.at("box"), 4, "box");
    if (!(v[0] < v[1] && v[2] < v[3])) throw ValidationError("region: box needs x_min < x_max, y_min < y_max");
    return Box{v[0], v[1], v[2], v[3]};
  }
  if (j.contains("disk")) {
    const auto v = numbers(j.at("disk"), 3, "disk");
    if (!(v[2] > 0.0)) throw ValidationError("region: disk radius must be positive");
    return Disk{{v[0], v[1]}, v[2]};
  }
  throw ValidationError("region: expected a \"box\" or \"disk\" key");
}

nlohmann::json to_json(const PlanarSet& set) {
  if (const auto* b = std::get_if<Box>(&set)) return {{"box", {b->x_min, b->x_max, b->y_min, b->y_max}}};
  const auto& d = std::get<Disk>(set);
  return {{"disk", {d.center.x, d.center.y, d.radius}}};
}

namespace {

void check_window_covers_disk(const Window& w, const char* who) {
  if (!(w.x_min() <= -1.0 && w.x_max() >= 1.0 && w.y_min() <= -1.0 && w.y_max() >= 1.0))
    throw ValidationError(std::string(who) + ": window must contain the unit disk");
}

void check_run(const TransformSpec& spec, double intensity, std::int64_t n_replicates, const char* who) {
  spec.validate();
  if (!(intensity > 0.0) || !std::isfinite(intensity))
    throw ValidationError(std::string(who) + ": intensity must be positive");
  if (n_replicates < 2) throw RangeError(std::string(who) + ": need at least two replicates");
}

double abs_or_zero(double z) { return std::isnan(z) ? 0.0 : std::abs(z); }

}  // namespace

double InvarianceReport::max_abs_z() const {
  double z = 0.0;
  for (const auto& r : regions) {
    for (double f : r.factorial_z) z = std::max(z, abs_or_zero(f));
    z = std::max(z, abs_or_zero(r.baseline_z));
  }
  for (const auto& c : covariances) z = std::max(z, abs_or_zero(c.z));
  return z;
}

double InvarianceReport::min_p_value() const {
  double p = 1.0;
  for (const auto& r : regions) p = std::min(p, r.gof.p_value);
  return p;
}

bool InvarianceReport::passes(double z_gate, double p_gate) const {
  return max_abs_z() <= z_gate && min_p_value() >= p_gate;
}

void to_json(nlohmann::json& j, const InvarianceReport& r) {
  j = nlohmann::json::object();
  j["replicates"] = r.replicates;
  auto regions = nlohmann::json::array();
  for (const auto& s : r.regions) {
    nlohmann::json f = nlohmann::json::array();
    for (int n = 0; n < 3; ++n) f.push_back({{"order", n + 1}, {"estimate", s.factorial[n]},
                                             {"expected", std::pow(s.expected_mean, n + 1)},
                                             {"z", s.factorial_z[n]}});
    regions.push_back({{"expected_mean", s.expected_mean},
                       {"chi_square", {{"statistic", s.gof.statistic},
                                       {"df", s.gof.degrees_of_freedom},
                                       {"p_value", s.gof.p_value}}},
                       {"factorial_moments", f},
                       {"baseline_difference", s.baseline_difference},
                       {"baseline_z", s.baseline_z}});
  }
  j["regions"] = regions;
  auto cov = nlohmann::json::array();
  for (const auto& c : r.covariances)
    cov.push_back({{"i", c.i}, {"j", c.j}, {"covariance", c.covariance}, {"z", c.z}});
  j["covariances"] = cov;
  j["gof_tests"] = r.regions.size();
  j["max_abs_z"] = r.max_abs_z();
  j["min_p_value"] = r.min_p_value();
}

InvarianceReport invariance_suite(const TransformSpec& spec, const Window& window, double intensity,
                                  const std::vector<PlanarSet>& regions, std::int64_t n_replicates,
                                  std::uint64_t seed) {
  check_run(spec, intensity, n_replicates, "invariance_suite");
  check_window_covers_disk(window, "invariance_suite");
  if (regions.empty()) throw ValidationError("invariance_suite: need at least one region");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (!inside_unit_disk(regions[i])) throw ValidationError("invariance_suite: regions must lie in the unit disk");
    for (std::size_t k = i + 1; k < regions.size(); ++k)
      if (!interiors_disjoint(regions[i], regions[k]))
        throw ValidationError("invariance_suite: regions must be disjoint");
  }

  const std::size_t p = regions.size();
  std::vector<std::int64_t> moved(n_replicates * p), raw(n_replicates * p);
  parallel_replicates(n_replicates, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(Stream::Transform), static_cast<std::uint64_t>(i));
    const PointPattern omega = sample_poisson(window, intensity, rng);
    const PointPattern image = push_forward(spec, omega);
    for (std::size_t r = 0; r < p; ++r) {
      std::int64_t a = 0, b = 0;
      for (const Point2& x : image) a += contains(regions[r], x);
      for (const Point2& x : omega) b += contains(regions[r], x);
      moved[i * p + r] = a;
      raw[i * p + r] = b;
    }
  });

  InvarianceReport report;
  report.replicates = n_replicates;
  std::vector<double> means(p);
  std::vector<std::int64_t> column(n_replicates);
  std::vector<double> values(n_replicates);
  for (std::size_t r = 0; r < p; ++r) {
    RegionStats s;
    s.expected_mean = intensity * area(regions[r]);
    for (std::int64_t i = 0; i < n_replicates; ++i) column[i] = moved[i * p + r];
    s.gof = stats::chi_square_poisson(column, s.expected_mean);
    for (int n = 1; n <= 3; ++n) {
      for (std::int64_t i = 0; i < n_replicates; ++i) values[i] = falling_factorial(static_cast<double>(column[i]), n);
      s.factorial[n - 1] = Estimate::from_samples(values, seed);
      s.factorial_z[n - 1] = z_score(s.factorial[n - 1], std::pow(s.expected_mean, n));
    }
    means[r] = s.factorial[0].mean;
    for (std::int64_t i = 0; i < n_replicates; ++i)
      values[i] = static_cast<double>(moved[i * p + r] - raw[i * p + r]);
    s.baseline_difference = Estimate::from_samples(values, seed);
    s.baseline_z = z_score(s.baseline_difference, 0.0);
    report.regions.push_back(s);
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b) {
      for (std::int64_t i = 0; i < n_replicates; ++i)
        values[i] = (static_cast<double>(moved[i * p + a]) - means[a]) * (static_cast<double>(moved[i * p + b]) - means[b]);
      CovarianceStats c;
      c.i = static_cast<int>(a);
      c.j = static_cast<int>(b);
      c.covariance = Estimate::from_samples(values, seed);
      c.z = z_score(c.covariance, 0.0);
      report.covariances.push_back(c);
    }
  return report;
}

double RhoTauReport::max_abs_z() const {
  double z = 0.0;
  for (const auto& c : checks) z = std::max(z, abs_or_zero(c.z));
  return z;
}

bool RhoTauReport::passes(double z_gate) const { return max_abs_z() <= z_gate; }

void to_json(nlohmann::json& j, const RhoTauReport& r) {
  j = nlohmann::json::object();
  j["replicates"] = r.replicates;
  auto boxes = nlohmann::json::array();
  for (const Box& b : r.boxes) boxes.push_back(to_json(PlanarSet{b}));
  j["boxes"] = boxes;
  auto checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"boxes", c.boxes}, {"estimate", c.estimate}, {"expected", c.expected}, {"z", c.z}});
  j["checks"] = checks;
  j["max_abs_z"] = r.max_abs_z();
}

RhoTauReport rho_tau_check(const TransformSpec& spec, const Window& window, double intensity,
                           std::int64_t n_replicates, std::uint64_t seed) {
  check_run(spec, intensity, n_replicates, "rho_tau_check");
  check_window_covers_disk(window, "rho_tau_check");

  RhoTauReport report;
  report.replicates = n_replicates;
  for (double y0 : {-0.5, 0.0})
    for (double x0 : {-0.5, 0.0}) report.boxes.push_back(Box{x0, x0 + 0.5, y0, y0 + 0.5});
  const std::size_t p = report.boxes.size();

  std::vector<std::int64_t> counts(n_replicates * p);
  parallel_replicates(n_replicates, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(Stream::RhoTau), static_cast<std::uint64_t>(i));
    const PointPattern image = push_forward(spec, sample_poisson(window, intensity, rng));
    for (std::size_t r = 0; r < p; ++r) {
      std::int64_t a = 0;
      for (const Point2& x : image) a += contains(PlanarSet{report.boxes[r]}, x);
      counts[i * p + r] = a;
    }
  });

  std::vector<double> mass(p), values(n_replicates);
  for (std::size_t r = 0; r < p; ++r) mass[r] = intensity * area(PlanarSet{report.boxes[r]});
  const auto add = [&](std::vector<int> boxes, double expected, auto&& value) {
    for (std::int64_t i = 0; i < n_replicates; ++i) values[i] = value(&counts[i * p]);
    MomentCheck c;
    c.boxes = std::move(boxes);
    c.estimate = Estimate::from_samples(values, seed);
    c.expected = expected;
    c.z = z_score(c.estimate, expected);
    report.checks.push_back(std::move(c));
  };
  for (std::size_t a = 0; a < p; ++a)
    add({static_cast<int>(a)}, mass[a], [a](const std::int64_t* n) { return static_cast<double>(n[a]); });
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      if (a == b)
        add({static_cast<int>(a), static_cast<int>(a)}, mass[a] * mass[a],
            [a](const std::int64_t* n) { return falling_factorial(static_cast<double>(n[a]), 2); });
      else
        add({static_cast<int>(a), static_cast<int>(b)}, mass[a] * mass[b],
            [a, b](const std::int64_t* n) { return static_cast<double>(n[a]) * static_cast<double>(n[b]); });
    }
  return report;
}

}  // namespace ppm
