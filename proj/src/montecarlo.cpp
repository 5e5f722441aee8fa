#include "ppm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace ppm {

namespace {

constexpr double kMaxMeanCount = 1e6;

void check_mc_order(int n, const char* who) {
  if (n < 1 || n > 3) throw RangeError(std::string(who) + ": need 1 <= n <= 3");
}

void check_samples(std::int64_t n_samples, const char* who) {
  if (n_samples < 1) throw RangeError(std::string(who) + ": n_samples must be positive");
}

}  // namespace

Window::Window(double x_min, double x_max, double y_min, double y_max)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
  if (!(x_min < x_max) || !(y_min < y_max) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
      !std::isfinite(y_min) || !std::isfinite(y_max))
    throw ValidationError("Window: need finite x_min < x_max and y_min < y_max");
}

double Window::diameter() const { return std::hypot(x_max_ - x_min_, y_max_ - y_min_); }

void StraussModel::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("StraussModel: beta must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("StraussModel: gamma must lie in [0, 1]");
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("StraussModel: r must be positive");
  if (!(beta * window.area() < kMaxMeanCount)) throw RangeError("StraussModel: beta * area must be below 1e6");
}

int StraussModel::close_neighbours(Point2 x, const PointPattern& omega) const {
  const double r2 = r * r;
  int t = 0;
  for (const Point2& y : omega)
    if (squared_norm(x - y) <= r2) ++t;
  return t;
}

double StraussModel::papangelou(Point2 x, const PointPattern& omega) const {
  const int t = close_neighbours(x, omega);
  if (t == 0) return beta;
  if (gamma == 0.0) return 0.0;
  return beta * std::pow(gamma, t);
}

const Window& window_of(const ProcessModel& model) {
  return std::visit([](const auto& m) -> const Window& { return m.window; }, model);
}

double papangelou(const ProcessModel& model, Point2 x, const PointPattern& omega) {
  return std::visit([&](const auto& m) { return m.papangelou(x, omega); }, model);
}

double compound_campbell(const ProcessModel& model, std::span<const Point2> tuple, const PointPattern& omega) {
  PointPattern w = omega;
  double out = 1.0;
  for (const Point2& x : tuple) {
    out *= papangelou(model, x, w);
    if (out == 0.0) return 0.0;
    w.insert(x);
  }
  return out;
}

Estimate Estimate::from_samples(std::span<const double> samples, std::uint64_t seed) {
  Estimate e;
  e.seed = seed;
  e.n_samples = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double v : samples) sum += v;
  e.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - e.mean) * (v - e.mean);
    const double var = ss / static_cast<double>(samples.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return e;
}

void to_json(nlohmann::json& j, const Estimate& e) {
  j = {{"mean", e.mean}, {"std_error", e.std_error}, {"n_samples", e.n_samples}, {"seed", e.seed}};
}

double z_score(const Estimate& a, const Estimate& b) {
  const double se = std::hypot(a.std_error, b.std_error);
  const double diff = a.mean - b.mean;
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return diff / se;
}

double z_score(const Estimate& a, double target) {
  const double diff = a.mean - target;
  if (a.std_error == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return diff / a.std_error;
}

PointPattern sample_poisson(const Window& window, double intensity, Rng& rng) {
  if (!(intensity > 0.0) || !std::isfinite(intensity))
    throw ValidationError("sample_poisson: intensity must be positive");
  const double mean = intensity * window.area();
  if (!(mean < kMaxMeanCount)) throw RangeError("sample_poisson: intensity * area must be below 1e6");
  const std::int64_t n = rng.poisson(mean);
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) pts.push_back(window.sample(rng));
  return PointPattern(std::move(pts));
}

PointPattern sample_poisson(const Window& window, double intensity, std::uint64_t seed) {
  Rng rng(seed);
  return sample_poisson(window, intensity, rng);
}

BirthDeathChain::BirthDeathChain(StraussModel model, PointPattern start)
    : model_(std::move(model)), state_(std::move(start)) {
  model_.validate();
}

void BirthDeathChain::step(Rng& rng) {
  const double area = model_.window.area();
  const double n = static_cast<double>(state_.size());
  if (rng.uniform() < 0.5) {
    const Point2 u = model_.window.sample(rng);
    const double ratio = model_.papangelou(u, state_) * area / (n + 1.0);
    if (rng.uniform() < ratio) state_.insert(u);
  } else {
    if (state_.empty()) return;
    const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(state_.size()) - 1));
    const std::vector<Point2>& pts = state_.points();
    // c(x, ω \ x) without copying the configuration.
    const double r2 = model_.r * model_.r;
    int t = 0;
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (k != i && squared_norm(pts[k] - pts[i]) <= r2) ++t;
    const double c = t == 0 ? model_.beta : (model_.gamma == 0.0 ? 0.0 : model_.beta * std::pow(model_.gamma, t));
    // c == 0 cannot occur for a reachable state, the chain never enters q = 0.
    const double ratio = c > 0.0 ? n / (c * area) : 1.0;
    if (rng.uniform() < ratio) state_.erase_at(i);
  }
}

std::int64_t default_burn_in(const StraussModel& model) { return 40 * default_thinning(model); }

std::int64_t default_thinning(const StraussModel& model) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(model.beta * model.window.area())));
}

PointPattern sample_gibbs(const StraussModel& model, std::int64_t n_steps, Rng& rng) {
  model.validate();
  if (n_steps < default_burn_in(model))
    throw RangeError("sample_gibbs: n_steps must be at least the default burn-in of " +
                     std::to_string(default_burn_in(model)));
  BirthDeathChain chain(model);
  chain.run(n_steps, rng);
  return chain.state();
}

PointPattern sample_gibbs(const StraussModel& model, std::int64_t n_steps, std::uint64_t seed) {
  Rng rng(seed);
  return sample_gibbs(model, n_steps, rng);
}

PointPattern draw(const ProcessModel& model, Rng& rng, const SamplerOptions& options) {
  if (const auto* p = std::get_if<PoissonProcess>(&model)) return sample_poisson(p->window, p->intensity, rng);
  const auto& s = std::get<StraussModel>(model);
  const std::int64_t steps = options.gibbs_steps > 0 ? options.gibbs_steps : default_burn_in(s);
  return sample_gibbs(s, steps, rng);
}

int worker_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("PPMOMENTS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 256));
  }
  return hw;
}

void parallel_replicates(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  const int threads = static_cast<int>(std::min<std::int64_t>(worker_threads(), std::max<std::int64_t>(n, 1)));
  if (threads <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::int64_t i = t; i < n; i += threads) fn(i);
    });
}

std::pair<Estimate, Estimate> estimate_factorial_identity(const ProcessModel& model, const PatternFunctional& F,
                                                          const PlanarRegion& A, int n, std::int64_t n_samples,
                                                          std::uint64_t seed, const SamplerOptions& options) {
  check_mc_order(n, "estimate_factorial_identity");
  check_samples(n_samples, "estimate_factorial_identity");
  const Window& window = window_of(model);
  const double area_n = std::pow(window.area(), n);
  std::vector<double> lhs(n_samples), rhs(n_samples);
  parallel_replicates(n_samples, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(Stream::FactorialIdentity), static_cast<std::uint64_t>(i));
    const PointPattern omega = draw(model, rng, options);
    int count = 0;
    for (const Point2& x : omega)
      if (A(x, omega)) ++count;
    lhs[i] = count >= n ? falling_factorial(count, n) * F(omega) : 0.0;

    std::vector<Point2> tuple(n);
    for (auto& x : tuple) x = window.sample(rng);
    double v = compound_campbell(model, tuple, omega);
    if (v != 0.0) {
      const PointPattern aug = with_points<PointPattern>(omega, tuple);
      for (const Point2& x : tuple)
        if (!A(x, aug)) {
          v = 0.0;
          break;
        }
      if (v != 0.0) v *= area_n * F(aug);
    }
    rhs[i] = v;
  });
  return {Estimate::from_samples(lhs, seed), Estimate::from_samples(rhs, seed)};
}

std::vector<std::pair<Estimate, Estimate>> estimate_partition_moments(const ProcessModel& model,
                                                                     std::span<const PlanarKernel> kernels, int n,
                                                                     std::int64_t n_samples, std::uint64_t seed,
                                                                     const SamplerOptions& options) {
  check_mc_order(n, "estimate_partition_moment");
  check_samples(n_samples, "estimate_partition_moment");
  const Window& window = window_of(model);
  std::vector<Partition> parts;
  for (const Partition& p : partitions(n)) parts.push_back(p);
  const std::size_t nk = kernels.size();

  std::vector<double> lhs(n_samples * nk), rhs(n_samples * nk);
  parallel_replicates(n_samples, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(Stream::PartitionMoment), static_cast<std::uint64_t>(i));
    const PointPattern omega = draw(model, rng, options);
    std::vector<Point2> tuple(n);
    for (auto& x : tuple) x = window.sample(rng);

    // ĉ and the augmented configuration depend only on the block count.
    std::vector<double> weight(n + 1, 0.0);
    std::vector<PointPattern> aug(n + 1);
    for (int k = 1; k <= n; ++k) {
      const std::span<const Point2> head(tuple.data(), static_cast<std::size_t>(k));
      weight[k] = std::pow(window.area(), k) * compound_campbell(model, head, omega);
      if (weight[k] != 0.0) aug[k] = with_points<PointPattern>(omega, head);
    }
    for (std::size_t q = 0; q < nk; ++q) {
      const PlanarKernel& u = kernels[q];
      double s = 0.0;
      for (const Point2& x : omega) s += u(x, omega);
      lhs[i * nk + q] = std::pow(s, n);
      double total = 0.0;
      for (const Partition& p : parts) {
        const int k = p.block_count();
        if (weight[k] == 0.0) continue;
        double v = weight[k];
        for (int j = 0; j < k; ++j) v *= std::pow(u(tuple[j], aug[k]), p.blocks()[j].size());
        total += v;
      }
      rhs[i * nk + q] = total;
    }
  });

  std::vector<std::pair<Estimate, Estimate>> out;
  std::vector<double> l(n_samples), r(n_samples);
  for (std::size_t q = 0; q < nk; ++q) {
    for (std::int64_t i = 0; i < n_samples; ++i) {
      l[i] = lhs[i * nk + q];
      r[i] = rhs[i * nk + q];
    }
    out.emplace_back(Estimate::from_samples(l, seed), Estimate::from_samples(r, seed));
  }
  return out;
}

std::pair<Estimate, Estimate> estimate_partition_moment(const ProcessModel& model, const PlanarKernel& u, int n,
                                                        std::int64_t n_samples, std::uint64_t seed,
                                                        const SamplerOptions& options) {
  return estimate_partition_moments(model, std::span<const PlanarKernel>(&u, 1), n, n_samples, seed, options)[0];
}

std::pair<Estimate, Estimate> estimate_gnz(const ProcessModel& model, const PlanarKernel& u, std::int64_t n_samples,
                                           std::uint64_t seed, const SamplerOptions& options) {
  return estimate_partition_moment(model, u, 1, n_samples, seed, options);
}

}  // namespace ppm
