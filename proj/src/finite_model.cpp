#include "ppm/finite_model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ppm {

GroundSpace::GroundSpace(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("GroundSpace: need at least one site");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("GroundSpace: weights must be finite and positive");
}

FiniteModel::FiniteModel(GroundSpace space, const LogDensity& log_density) : space_(std::move(space)) {
  const int m = space_.size();
  if (m > kMaxExactSites)
    throw RangeError("FiniteModel: " + std::to_string(m) + " sites exceeds the enumeration guard of " +
                     std::to_string(kMaxExactSites));
  const std::uint32_t count = 1u << m;
  log_q_.resize(count);
  for (std::uint32_t b = 0; b < count; ++b) {
    const double lq = log_density(SiteSet(b));
    if (std::isnan(lq) || lq == std::numeric_limits<double>::infinity())
      throw ValidationError("FiniteModel: log density must be finite or -inf");
    log_q_[b] = lq;
  }
  if (!std::isfinite(log_q_[0])) throw ValidationError("FiniteModel: q(empty) must be positive");

  // Hereditary iff every positive configuration stays positive after
  // removing any single point; larger removals follow by induction.
  for (std::uint32_t b = 1; b < count; ++b) {
    if (!std::isfinite(log_q_[b])) continue;
    for (std::uint32_t r = b; r != 0; r &= r - 1) {
      const std::uint32_t smaller = b & ~(r & -r);
      if (!std::isfinite(log_q_[smaller]))
        throw ValidationError("FiniteModel: density is not hereditary (configuration " + std::to_string(b) + ")");
    }
  }

  // Shift by log q(∅) before exponentiating; P is invariant under it.
  const double shift = log_q_[0];
  std::vector<double> log_w(space_.weights().size());
  for (int x = 0; x < m; ++x) log_w[x] = std::log(space_.weight(x));
  prob_.resize(count);
  double z = 0.0;
  for (std::uint32_t b = 0; b < count; ++b) {
    if (!std::isfinite(log_q_[b])) {
      prob_[b] = 0.0;
      continue;
    }
    double lw = log_q_[b] - shift;
    for (std::uint32_t r = b; r != 0; r &= r - 1) lw += log_w[std::countr_zero(r)];
    prob_[b] = std::exp(lw);
    z += prob_[b];
  }
  if (!(z > 0.0) || !std::isfinite(z)) throw ValidationError("FiniteModel: partition constant is not finite");
  for (double& p : prob_) p /= z;
  z_ = z * std::exp(shift);
}

FiniteModel FiniteModel::poisson(GroundSpace space) {
  return FiniteModel(std::move(space), [](SiteSet) { return 0.0; });
}

FiniteModel FiniteModel::pairwise(GroundSpace space, double gamma, const std::vector<std::pair<Site, Site>>& pairs) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("pairwise: gamma must be finite and >= 0");
  const int m = space.size();
  for (const auto& [i, j] : pairs)
    if (i < 0 || j < 0 || i >= m || j >= m || i == j)
      throw ValidationError("pairwise: pair (" + std::to_string(i) + "," + std::to_string(j) + ") is invalid");
  const double log_gamma = std::log(gamma);
  return FiniteModel(std::move(space), [pairs, gamma, log_gamma](SiteSet omega) {
    int count = 0;
    for (const auto& [i, j] : pairs)
      if (omega.contains(i) && omega.contains(j)) ++count;
    if (count == 0) return 0.0;
    if (gamma == 0.0) return -std::numeric_limits<double>::infinity();
    return count * log_gamma;
  });
}

bool FiniteModel::is_poisson() const {
  for (double lq : log_q_)
    if (lq != log_q_[0]) return false;
  return true;
}

double FiniteModel::papangelou(Site x, SiteSet omega) const {
  if (omega.contains(x)) return 0.0;
  const double base = log_q_[omega.bits()];
  if (!std::isfinite(base)) return 0.0;
  return std::exp(log_q_[omega.with(x).bits()] - base);
}

double FiniteModel::compound_campbell(std::span<const Site> tuple, SiteSet omega) const {
  double out = 1.0;
  for (Site x : tuple) {
    out *= papangelou(x, omega);
    if (out == 0.0) return 0.0;
    omega = omega.with(x);
  }
  return out;
}

double FiniteModel::correlation(std::span<const Site> tuple) const {
  return expectation([&](SiteSet omega) { return compound_campbell(tuple, omega); });
}

Sides gnz_residual(const FiniteModel& model, const SiteKernel& u) {
  Sides out;
  out.lhs = model.expectation([&](SiteSet omega) {
    double s = 0.0;
    for (Site x : omega.sites()) s += u(x, omega);
    return s;
  });
  for (Site x = 0; x < model.size(); ++x) {
    out.rhs += model.space().weight(x) * model.expectation([&](SiteSet omega) {
      const double c = model.papangelou(x, omega);
      return c == 0.0 ? 0.0 : c * u(x, omega.with(x));
    });
  }
  return out;
}

void for_each_distinct_tuple(int m, int n, const std::function<void(std::span<const Site>)>& fn) {
  std::vector<Site> tuple(n);
  auto rec = [&](auto&& self, int depth, std::uint32_t used) -> void {
    if (depth == n) {
      fn(tuple);
      return;
    }
    for (Site x = 0; x < m; ++x) {
      if ((used >> x) & 1u) continue;
      tuple[depth] = x;
      self(self, depth + 1, used | (1u << x));
    }
  };
  rec(rec, 0, 0u);
}

}  // namespace ppm
