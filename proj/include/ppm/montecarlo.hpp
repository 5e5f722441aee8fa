#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ppm/configuration.hpp"
#include "ppm/difference_ops.hpp"
#include "ppm/errors.hpp"
#include "ppm/rng.hpp"

namespace ppm {

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
class Window {
 public:
  Window(double x_min, double x_max, double y_min, double y_max);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double area() const { return (x_max_ - x_min_) * (y_max_ - y_min_); }
  double diameter() const;
  bool contains(Point2 p) const { return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_; }
  Point2 sample(Rng& rng) const { return {rng.uniform(x_min_, x_max_), rng.uniform(y_min_, y_max_)}; }

 private:
  double x_min_, x_max_, y_min_, y_max_;
};

/// Homogeneous Poisson process on a window; c(x, ω) = intensity with
/// respect to Lebesgue measure.
struct PoissonProcess {
  Window window;
  double intensity;

  double papangelou(Point2, const PointPattern&) const { return intensity; }
};

/// Strauss process: c(x, ω) = β γ^{t(x, ω)}, t the number of points of ω
/// within distance r of x.
struct StraussModel {
  Window window;
  double beta;
  double gamma;
  double r;

  void validate() const;
  int close_neighbours(Point2 x, const PointPattern& omega) const;
  double papangelou(Point2 x, const PointPattern& omega) const;
};

using ProcessModel = std::variant<PoissonProcess, StraussModel>;

const Window& window_of(const ProcessModel& model);
double papangelou(const ProcessModel& model, Point2 x, const PointPattern& omega);
/// ĉ(x_1..x_n, ω) = Π_k c(x_k, ω ∪ {x_1..x_{k-1}}).
double compound_campbell(const ProcessModel& model, std::span<const Point2> tuple, const PointPattern& omega);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;

  /// Sample mean and sample standard deviation / sqrt(n).
  static Estimate from_samples(std::span<const double> samples, std::uint64_t seed);
};

void to_json(nlohmann::json& j, const Estimate& e);

/// (a - b) / sqrt(se_a² + se_b²); 0 when both are exact and equal.
double z_score(const Estimate& a, const Estimate& b);
/// (estimate - target) / se.
double z_score(const Estimate& a, double target);

/// N ~ Poisson(intensity · area), then N i.i.d. uniform points.
PointPattern sample_poisson(const Window& window, double intensity, Rng& rng);
PointPattern sample_poisson(const Window& window, double intensity, std::uint64_t seed);

/// Birth-death Metropolis-Hastings chain for a Strauss model.
///
/// Each step proposes, with probability 1/2 each, a birth at a uniform
/// window point u (accepted with probability min(1, c(u, ω) |W| / (|ω|+1)))
/// or the death of a uniformly chosen point x (accepted with probability
/// min(1, |ω| / (c(x, ω \ x) |W|))); a death proposal on the empty
/// configuration leaves it unchanged.
class BirthDeathChain {
 public:
  BirthDeathChain(StraussModel model, PointPattern start = {});

  void step(Rng& rng);
  void run(std::int64_t n_steps, Rng& rng) {
    for (std::int64_t i = 0; i < n_steps; ++i) step(rng);
  }
  const PointPattern& state() const { return state_; }

 private:
  StraussModel model_;
  PointPattern state_;
};

/// 40 · ceil(β · area) steps. A point survives about 2 · ceil(β · area)
/// steps, so traces of the empty start decay like exp(-20).
std::int64_t default_burn_in(const StraussModel& model);
/// ceil(β · area) steps.
std::int64_t default_thinning(const StraussModel& model);

/// Runs a chain from the empty configuration for n_steps >= default_burn_in.
PointPattern sample_gibbs(const StraussModel& model, std::int64_t n_steps, Rng& rng);
PointPattern sample_gibbs(const StraussModel& model, std::int64_t n_steps, std::uint64_t seed);

struct SamplerOptions {
  /// Gibbs steps per replicate; 0 selects default_burn_in.
  std::int64_t gibbs_steps = 0;
};

/// One independent draw of the process (a fresh chain for Strauss models).
PointPattern draw(const ProcessModel& model, Rng& rng, const SamplerOptions& options = {});

using PatternFunctional = Functional<PointPattern>;
using PlanarKernel = Kernel<PointPattern>;
using PlanarRegion = std::function<bool(Point2, const PointPattern&)>;

/// Documented RNG streams; replicate i of an estimator uses Rng(seed, stream, i).
enum class Stream : std::uint64_t {
  FactorialIdentity = 11,
  PartitionMoment = 12,
  CountMoments = 13,
  Transform = 14,
  RhoTau = 15,
};

/// Worker count: PPMOMENTS_THREADS when set (>= 1), else hardware concurrency.
int worker_threads();

/// Calls fn(i) for i in [0, n) on up to worker_threads() threads. Results
/// written by index are independent of scheduling.
void parallel_replicates(std::int64_t n, const std::function<void(std::int64_t)>& fn);

/// Estimates of E[F N(A)_(n)] (lhs) and of
/// E[|W|^n ĉ(𝔵, ω) F(ω ∪ 𝔵) Π_k 1_{A(ω ∪ 𝔵)}(x_k)] with 𝔵 i.i.d. uniform on
/// the window (rhs); n <= 3. Each replicate draws its own ω and 𝔵.
std::pair<Estimate, Estimate> estimate_factorial_identity(const ProcessModel& model, const PatternFunctional& F,
                                                          const PlanarRegion& A, int n, std::int64_t n_samples,
                                                          std::uint64_t seed, const SamplerOptions& options = {});

/// Estimates of E[(Σ_{x∈ω} u(x, ω))^n] (lhs) and of the sum over set
/// partitions of {1..n} of |W|^k ĉ(𝔵_k, ω) Π_j u(x_j, ω ∪ 𝔵_k)^{|B_j|} (rhs);
/// n <= 3. One uniform n-tuple per replicate, shared by all partitions.
std::pair<Estimate, Estimate> estimate_partition_moment(const ProcessModel& model, const PlanarKernel& u, int n,
                                                        std::int64_t n_samples, std::uint64_t seed,
                                                        const SamplerOptions& options = {});

/// estimate_partition_moment for several kernels on shared draws; entry q
/// equals the single-kernel result for kernels[q].
std::vector<std::pair<Estimate, Estimate>> estimate_partition_moments(const ProcessModel& model,
                                                                     std::span<const PlanarKernel> kernels, int n,
                                                                     std::int64_t n_samples, std::uint64_t seed,
                                                                     const SamplerOptions& options = {});

/// GNZ residual estimate: the order-1 case of estimate_partition_moment.
std::pair<Estimate, Estimate> estimate_gnz(const ProcessModel& model, const PlanarKernel& u, std::int64_t n_samples,
                                           std::uint64_t seed, const SamplerOptions& options = {});

}  // namespace ppm
