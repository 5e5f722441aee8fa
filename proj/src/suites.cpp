#include "ppm/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <map>
#include <numeric>

#include "ppm/combinatorics.hpp"
#include "ppm/difference_ops.hpp"
#include "ppm/errors.hpp"
#include "ppm/finite_model.hpp"
#include "ppm/identities.hpp"
#include "ppm/instances.hpp"
#include "ppm/montecarlo.hpp"
#include "ppm/rng.hpp"
#include "ppm/stats.hpp"
#include "ppm/transforms.hpp"

namespace ppm {

using nlohmann::json;

namespace {

// Collected records of one run, in instance order.
struct Records {
  std::vector<json> lines;
  std::int64_t failures = 0;
  std::int64_t statistical_tests = 0;

  void add(json record, bool pass) {
    record["pass"] = pass;
    if (!pass) ++failures;
    lines.push_back(std::move(record));
  }
};

struct Context {
  const SuiteConfig& config;
  json params;
  std::int64_t instances;

  double num(const char* key) const { return params.at(key).get<double>(); }
  std::int64_t integer(const char* key) const { return params.at(key).get<std::int64_t>(); }
  std::uint64_t derived_seed(std::uint64_t stream, std::uint64_t index) const {
    return Rng(config.seed, stream, index).bits();
  }
};

Window window_param(const json& v) {
  const auto w = v.get<std::vector<double>>();
  if (w.size() != 4) throw ValidationError("window must list x_min, x_max, y_min, y_max");
  return Window(w[0], w[1], w[2], w[3]);
}

Box box_param(const json& v) {
  const auto b = v.get<std::vector<double>>();
  if (b.size() != 4 || !(b[0] < b[1]) || !(b[2] < b[3]))
    throw ValidationError("box must list x_min < x_max, y_min < y_max");
  return Box{b[0], b[1], b[2], b[3]};
}

int int_in(const Context& ctx, const char* key, int lo, int hi) {
  const std::int64_t v = ctx.integer(key);
  if (v < lo || v > hi)
    throw RangeError(std::string("parameter ") + key + " must lie in [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::int64_t positive(const Context& ctx, const char* key) {
  const std::int64_t v = ctx.integer(key);
  if (v < 1) throw RangeError(std::string("parameter ") + key + " must be positive");
  return v;
}

InstanceBounds finite_bounds(const Context& ctx, int regions) {
  InstanceBounds b;
  b.min_sites = int_in(ctx, "min_sites", 1, kMaxExactSites);
  b.max_sites = int_in(ctx, "max_sites", b.min_sites, kMaxExactSites);
  b.regions = regions;
  b.weight_min = ctx.num("weight_min");
  b.weight_max = ctx.num("weight_max");
  return b;
}

SiteKernel random_site_kernel(int m, Rng& rng) {
  auto table = std::make_shared<std::vector<std::vector<double>>>(m, std::vector<double>(1u << m));
  for (auto& row : *table)
    for (auto& v : row) v = rng.uniform(-1.0, 1.0);
  return [table](Site x, SiteSet omega) { return (*table)[x][omega.bits()]; };
}

json identity_record(std::int64_t index, const IdentityReport& r) {
  json j = r;
  j["record"] = "identity";
  j["index"] = index;
  return j;
}

void add_exact(Records& out, std::int64_t index, const IdentityReport& r, double gate = kExactGate) {
  out.add(identity_record(index, r), r.rel_gap <= gate);
}

json z_record(std::int64_t index, const std::string& name, double z, json extra) {
  extra["record"] = "statistic";
  extra["index"] = index;
  extra["name"] = name;
  extra["z"] = z;
  return extra;
}

void add_z(Records& out, std::int64_t index, const std::string& name, double z, json extra) {
  ++out.statistical_tests;
  out.add(z_record(index, name, z, std::move(extra)), std::abs(z) <= kZGate);
}

// ---- exact suites ----

void suite_exact_gnz(const Context& ctx, Records& out) {
  const InstanceBounds bounds = finite_bounds(ctx, 0);
  const int per_model = int_in(ctx, "kernels_per_model", 1, 1000);
  std::int64_t index = 0;
  for (std::int64_t i = 0; i < ctx.instances; ++i) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, bounds, ctx.derived_seed(1, i));
    const FiniteModel model = inst.model();
    Rng rng(inst.seed, 0x6b);
    for (int k = 0; k < per_model; ++k) {
      const SiteKernel u = k == 0 ? inst.kernel() : random_site_kernel(inst.sites(), rng);
      const Sides s = gnz_residual(model, u);
      add_exact(out, index++,
                IdentityReport::make("gnz", s.lhs, s.rhs,
                                     {{"instance", i}, {"kernel", k}, {"sites", inst.sites()}, {"gamma", inst.gamma}}));
    }
  }
}

void suite_exact_factorial(const Context& ctx, Records& out) {
  const InstanceBounds bounds = finite_bounds(ctx, 1);
  const int max_order = int_in(ctx, "max_order", 1, 4);
  for (std::int64_t i = 0; i < ctx.instances; ++i) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, bounds, ctx.derived_seed(2, i));
    const int n = 1 + static_cast<int>(i % max_order);
    IdentityReport r = factorial_moment_identity(inst.model(), inst.functional(), inst.regions()[0], n);
    r.parameters["instance"] = i;
    add_exact(out, i, r);
  }
}

void suite_exact_joint(const Context& ctx, Records& out) {
  const InstanceBounds bounds = finite_bounds(ctx, 2);
  const int max_order = int_in(ctx, "max_order", 1, 2);
  const std::int64_t dtheta = ctx.integer("dtheta_instances");
  if (dtheta < 0) throw RangeError("parameter dtheta_instances must be nonnegative");
  std::int64_t index = 0;
  for (std::int64_t i = 0; i < ctx.instances; ++i) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, bounds, ctx.derived_seed(3, i));
    const int n = 1 + static_cast<int>(i % max_order);
    IdentityReport r = joint_factorial_identity(inst.model(), inst.functional(), inst.regions(), {n, n});
    r.parameters["instance"] = i;
    add_exact(out, index++, r);
  }
  for (std::int64_t d = 0; d < dtheta; ++d) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, bounds, ctx.derived_seed(4, d));
    const std::vector<int> orders{1 + static_cast<int>(d % 2), 1 + static_cast<int>((d / 2) % 2)};
    IdentityReport r = dtheta_joint_expansion(inst.model(), inst.functional(), inst.regions(), orders);
    r.parameters["instance"] = d;
    add_exact(out, index++, r);
  }
}

void suite_exact_stirling(const Context& ctx, Records& out) {
  const InstanceBounds bounds = finite_bounds(ctx, 1);
  const int max_order = int_in(ctx, "max_order", 1, 4);
  for (std::int64_t i = 0; i < ctx.instances; ++i) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, bounds, ctx.derived_seed(5, i));
    const int n = 1 + static_cast<int>(i % max_order);
    IdentityReport r = stirling_moment_identity(inst.model(), inst.functional(), inst.regions()[0], n);
    r.parameters["instance"] = i;
    add_exact(out, i, r);
  }
}

void suite_exact_partition(const Context& ctx, Records& out) {
  const InstanceBounds bounds = finite_bounds(ctx, 0);
  const int max_order = int_in(ctx, "max_order", 1, 4);
  for (std::int64_t i = 0; i < ctx.instances; ++i) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, bounds, ctx.derived_seed(6, i));
    const int n = 1 + static_cast<int>(i % max_order);
    IdentityReport r = partition_moment_identity(inst.model(), inst.kernel(), n);
    r.parameters["instance"] = i;
    add_exact(out, i, r);
  }
}

void suite_exact_independence(const Context& ctx, Records& out) {
  const int regions = int_in(ctx, "regions", 1, 4);
  const InstanceBounds bounds = finite_bounds(ctx, regions);
  const int max_order = int_in(ctx, "max_order", 1, 4);
  std::int64_t index = 0;
  for (std::int64_t i = 0; i < ctx.instances; ++i) {
    FiniteInstance inst = generate_random_instance(InstanceKind::Poisson, bounds, ctx.derived_seed(7, i));
    // Fixed regions: membership read from the even-parity label only.
    std::fill(inst.parity_masks.begin(), inst.parity_masks.end(), 0u);
    for (IdentityReport& r : poisson_independence_check(inst.model(), inst.regions(), max_order)) {
      r.parameters["instance"] = i;
      add_exact(out, index++, r);
    }
  }
}

void suite_stir1(const Context& ctx, Records& out) {
  const int max_n = int_in(ctx, "max_n", 1, 5);
  const int max_m = int_in(ctx, "max_m", 1, 4);
  const int max_p = int_in(ctx, "max_p", 1, 3);
  std::int64_t index = 0;
  for (int n = 1; n <= max_n; ++n)
    for (int m = 1; m <= max_m; ++m)
      for (int p = 1; p <= max_p; ++p)
        for (std::int64_t r = 0; r < ctx.instances; ++r) {
          Rng rng(ctx.config.seed, 8, static_cast<std::uint64_t>(index));
          std::vector<std::vector<double>> alphas(p, std::vector<double>(m));
          for (auto& row : alphas)
            for (auto& a : row) a = rng.uniform(-1.0, 1.0);
          std::vector<double> betas(p);
          for (auto& b : betas) b = rng.uniform(-1.0, 1.0);
          const Sides s = stir1_gap(alphas, betas, n, m);
          add_exact(out, index++,
                    IdentityReport::make("stir1", s.lhs, s.rhs,
                                         {{"n", n}, {"m", m}, {"p", p}, {"alphas", alphas}, {"betas", betas}}));
        }
}

// Distinct random sites and a random configuration avoiding them.
std::pair<std::vector<Site>, SiteSet> random_tuple(int m, int l, Rng& rng) {
  std::vector<Site> sites(m);
  std::iota(sites.begin(), sites.end(), 0);
  std::shuffle(sites.begin(), sites.end(), rng.engine());
  std::vector<Site> tuple(sites.begin(), sites.begin() + l);
  SiteSet omega;
  for (int k = l; k < m; ++k)
    if (rng.bernoulli(0.5)) omega = omega.with(sites[k]);
  return {tuple, omega};
}

void suite_ddd0(const Context& ctx, Records& out) {
  const InstanceBounds bounds = finite_bounds(ctx, 0);
  if (bounds.min_sites < 3) throw RangeError("parameter min_sites must be at least 3");
  const int max_length = int_in(ctx, "max_length", 1, 3);
  const std::int64_t constructed = ctx.integer("constructed_instances");
  const double gate = 1e-10;
  std::int64_t index = 0;
  for (std::int64_t i = 0; i < ctx.instances; ++i) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, bounds, ctx.derived_seed(9, i));
    Rng rng(inst.seed, 0xdd);
    for (int l = 1; l <= max_length; ++l) {
      const auto [tuple, omega] = random_tuple(inst.sites(), l, rng);
      std::vector<Kernel<SiteSet>> kernels;
      for (int j = 0; j < l; ++j) kernels.push_back(random_site_kernel(inst.sites(), rng));
      const Sides s = product_expansion_gap<SiteSet>(kernels, tuple, omega);
      const json params{{"instance", i}, {"length", l}, {"tuple", tuple}, {"omega", omega.bits()}};
      add_exact(out, index++, IdentityReport::make("product_expansion", s.lhs, s.rhs, params), gate);
      const SiteFunctional F = inst.functional();
      const double composed = diff_iterated<SiteSet>(F, tuple)(omega);
      const double closed = diff_multi<SiteSet>(F, tuple)(omega);
      add_exact(out, index++, IdentityReport::make("difference_closed_form", composed, closed, params), gate);
    }
  }
  // Kernels blind to one tuple position satisfy the cover condition, so the
  // full product difference must vanish.
  for (std::int64_t c = 0; c < constructed; ++c) {
    const FiniteInstance inst = generate_random_instance(InstanceKind::Pairwise, bounds, ctx.derived_seed(10, c));
    Rng rng(inst.seed, 0xdd);
    const int l = 2 + static_cast<int>(c % 2);
    const int blind = static_cast<int>(c % l);
    const auto [tuple, omega] = random_tuple(inst.sites(), l, rng);
    std::vector<Kernel<SiteSet>> kernels;
    for (int j = 0; j < l; ++j) {
      SiteKernel base = random_site_kernel(inst.sites(), rng);
      kernels.push_back([base, hidden = tuple[blind]](Site x, SiteSet w) { return base(x, w.without(hidden)); });
    }
    const bool condition = cover_condition_holds<SiteSet>(kernels, tuple, omega, 0.0);
    const Sides s = product_expansion_gap<SiteSet>(kernels, tuple, omega);
    json rec{{"record", "cover_implication"}, {"index", index++}, {"instance", c},   {"length", l},
             {"blind_position", blind},       {"condition", condition}, {"product_difference", s.lhs},
             {"expansion", s.rhs}};
    out.add(std::move(rec), condition && std::abs(s.lhs) <= gate && std::abs(s.rhs) <= gate);
  }
}

// ---- Monte Carlo suites ----

void suite_mc_poisson(const Context& ctx, Records& out) {
  const Window window = window_param(ctx.params.at("window"));
  const double intensity = ctx.num("intensity");
  const Box a = box_param(ctx.params.at("region"));
  const Box b = box_param(ctx.params.at("other_region"));
  if (!interiors_disjoint(a, b)) throw ValidationError("region and other_region must be disjoint");
  const std::int64_t n = positive(ctx, "samples");
  const std::uint64_t seed = ctx.config.seed;

  std::vector<std::int64_t> na(n), nb(n), total(n);
  parallel_replicates(n, [&](std::int64_t i) {
    Rng rng(seed, static_cast<std::uint64_t>(Stream::CountMoments), static_cast<std::uint64_t>(i));
    const PointPattern omega = sample_poisson(window, intensity, rng);
    std::int64_t ca = 0, cb = 0;
    for (const Point2& x : omega) {
      ca += contains(PlanarSet{a}, x);
      cb += contains(PlanarSet{b}, x);
    }
    na[i] = ca;
    nb[i] = cb;
    total[i] = static_cast<std::int64_t>(omega.size());
  });

  const double mass = intensity * area(PlanarSet{a});
  std::vector<double> v(n);
  std::int64_t index = 0;
  for (int k = 1; k <= 3; ++k) {
    for (std::int64_t i = 0; i < n; ++i) v[i] = falling_factorial(static_cast<double>(na[i]), k);
    const Estimate e = Estimate::from_samples(v, seed);
    add_z(out, index++, "factorial_moment", z_score(e, std::pow(mass, k)),
          {{"order", k}, {"estimate", e}, {"expected", std::pow(mass, k)}});
  }
  for (std::int64_t i = 0; i < n; ++i) v[i] = static_cast<double>(total[i]);
  const Estimate te = Estimate::from_samples(v, seed);
  add_z(out, index++, "window_count", z_score(te, intensity * window.area()),
        {{"estimate", te}, {"expected", intensity * window.area()}});

  double ma = 0.0, mb = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    ma += static_cast<double>(na[i]);
    mb += static_cast<double>(nb[i]);
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  for (std::int64_t i = 0; i < n; ++i)
    v[i] = (static_cast<double>(na[i]) - ma) * (static_cast<double>(nb[i]) - mb);
  const Estimate cov = Estimate::from_samples(v, seed);
  add_z(out, index++, "disjoint_covariance", z_score(cov, 0.0), {{"estimate", cov}, {"expected", 0.0}});

  const stats::ChiSquareResult gof = stats::chi_square_poisson(na, mass);
  ++out.statistical_tests;
  out.add({{"record", "goodness_of_fit"}, {"index", index++}, {"statistic", gof.statistic},
           {"df", gof.degrees_of_freedom}, {"p_value", gof.p_value}},
          gof.p_value >= kPGate);
}

StraussModel strauss_param(const Context& ctx, double gamma) {
  StraussModel s{window_param(ctx.params.at("window")), ctx.num("beta"), gamma, ctx.num("r")};
  s.validate();
  return s;
}

int close_pairs(const PointPattern& omega, double r) {
  const auto& p = omega.points();
  int count = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (squared_norm(p[i] - p[j]) <= r * r) ++count;
  return count;
}

void suite_mc_gibbs(const Context& ctx, Records& out) {
  const StraussModel strauss = strauss_param(ctx, ctx.num("gamma"));
  const std::int64_t n = positive(ctx, "samples");
  const std::uint64_t seed = ctx.config.seed;
  std::int64_t index = 0;

  const std::vector<PlanarKernel> kernels{
      [](const Point2&, const PointPattern&) { return 1.0; },
      [strauss](const Point2& x, const PointPattern& w) { return static_cast<double>(strauss.close_neighbours(x, w)); },
      [](const Point2& x, const PointPattern& w) { return x.x * x.x + 0.01 * static_cast<double>(w.size()); }};
  const char* names[] = {"constant", "close_neighbours", "position_and_size"};
  const auto gnz = estimate_partition_moments(strauss, kernels, 1, n, seed);
  for (std::size_t k = 0; k < kernels.size(); ++k)
    add_z(out, index++, "gnz_residual", z_score(gnz[k].first, gnz[k].second),
          {{"kernel", names[k]}, {"lhs", gnz[k].first}, {"rhs", gnz[k].second}});

  // γ = 1 chain against the direct Poisson sampler.
  const std::int64_t m = positive(ctx, "poisson_check_samples");
  const StraussModel free_chain = strauss_param(ctx, 1.0);
  std::vector<double> chain_count(m), chain_pairs(m), direct_count(m), direct_pairs(m);
  parallel_replicates(m, [&](std::int64_t i) {
    Rng a(seed, static_cast<std::uint64_t>(Stream::CountMoments), static_cast<std::uint64_t>(i));
    const PointPattern c = draw(free_chain, a);
    chain_count[i] = static_cast<double>(c.size());
    chain_pairs[i] = close_pairs(c, free_chain.r);
    Rng b(seed, static_cast<std::uint64_t>(Stream::CountMoments), static_cast<std::uint64_t>(m + i));
    const PointPattern d = sample_poisson(free_chain.window, free_chain.beta, b);
    direct_count[i] = static_cast<double>(d.size());
    direct_pairs[i] = close_pairs(d, free_chain.r);
  });
  const Estimate cc = Estimate::from_samples(chain_count, seed), dc = Estimate::from_samples(direct_count, seed);
  add_z(out, index++, "free_chain_mean_count", z_score(cc, dc), {{"chain", cc}, {"direct", dc}});
  const Estimate cp = Estimate::from_samples(chain_pairs, seed), dp = Estimate::from_samples(direct_pairs, seed);
  add_z(out, index++, "free_chain_close_pairs", z_score(cp, dp), {{"chain", cp}, {"direct", dp}});

  // Hard core: no sampled pair within r.
  const std::int64_t draws = ctx.integer("hardcore_draws");
  if (draws > 0) {
    const StraussModel hard = strauss_param(ctx, 0.0);
    std::int64_t violations = 0, points = 0;
    for (std::int64_t i = 0; i < draws; ++i) {
      Rng rng(seed, static_cast<std::uint64_t>(Stream::CountMoments), static_cast<std::uint64_t>(2 * m + i));
      const PointPattern w = draw(hard, rng);
      violations += close_pairs(w, hard.r);
      points += static_cast<std::int64_t>(w.size());
    }
    out.add({{"record", "hard_core"}, {"index", index++}, {"draws", draws}, {"points", points},
             {"close_pairs", violations}},
            violations == 0);
  }
}

void suite_mc_identity(const Context& ctx, Records& out) {
  const Window window = window_param(ctx.params.at("window"));
  const double intensity = ctx.num("intensity");
  const std::int64_t n = positive(ctx, "samples");
  const std::uint64_t seed = ctx.config.seed;
  std::int64_t index = 0;

  // Poisson, fixed left half, F ≡ 1.
  const PoissonProcess poisson{window, intensity};
  const double mid = 0.5 * (window.x_min() + window.x_max());
  const PlanarRegion left = [mid](Point2 x, const PointPattern&) { return x.x <= mid; };
  const PatternFunctional one = [](const PointPattern&) { return 1.0; };
  const double target = std::pow(intensity * 0.5 * window.area(), 2);
  const auto [pl, pr] = estimate_factorial_identity(poisson, one, left, 2, n, seed);
  add_z(out, index++, "poisson_factorial_sides", z_score(pl, pr), {{"order", 2}, {"lhs", pl}, {"rhs", pr}});
  add_z(out, index++, "poisson_factorial_lhs", z_score(pl, target), {{"lhs", pl}, {"expected", target}});
  add_z(out, index++, "poisson_factorial_rhs", z_score(pr, target), {{"rhs", pr}, {"expected", target}});

  // Strauss with an ω-dependent region and a bounded functional.
  const StraussModel strauss = strauss_param(ctx, ctx.num("gamma"));
  const double x0 = window.x_min(), width = window.x_max() - window.x_min();
  const PlanarRegion moving = [x0, width](Point2 x, const PointPattern& w) {
    return x.x <= x0 + width * (w.size() % 2 == 0 ? 0.4 : 0.7);
  };
  const PatternFunctional bounded = [](const PointPattern& w) {
    double s = 0.0;
    for (const Point2& p : w) s += p.y;
    return std::cos(s) + 0.5;
  };
  for (int k = 1; k <= 3; ++k) {
    const auto [l, r] = estimate_factorial_identity(strauss, bounded, moving, k, n, seed + k);
    add_z(out, index++, "strauss_factorial", z_score(l, r), {{"order", k}, {"lhs", l}, {"rhs", r}});
  }
  const PlanarKernel u = [strauss](const Point2& x, const PointPattern& w) {
    return x.x + 0.1 * static_cast<double>(strauss.close_neighbours(x, w));
  };
  for (int k = 1; k <= 3; ++k) {
    const auto [l, r] = estimate_partition_moment(strauss, u, k, n, seed + 10 + k);
    add_z(out, index++, "strauss_partition_moment", z_score(l, r), {{"order", k}, {"lhs", l}, {"rhs", r}});
  }
}

TransformSpec offset_param(const Context& ctx) {
  TransformSpec spec{ctx.num("offset")};
  spec.validate();
  return spec;
}

void suite_transform_invariance(const Context& ctx, Records& out) {
  const TransformSpec spec = offset_param(ctx);
  const Window window = window_param(ctx.params.at("window"));
  std::vector<PlanarSet> regions;
  for (const json& r : ctx.params.at("regions")) regions.push_back(parse_planar_set(r));
  const InvarianceReport report = invariance_suite(spec, window, ctx.num("intensity"), regions,
                                                   positive(ctx, "replicates"), ctx.config.seed);
  json rec = report;
  rec["record"] = "invariance";
  rec["index"] = 0;
  rec["offset"] = spec.rotation_offset;
  out.statistical_tests += static_cast<std::int64_t>(report.regions.size() * 5 + report.covariances.size());
  out.add(std::move(rec), report.passes(kZGate, kPGate));

  // The cover condition for τ on random configurations and tuples.
  const std::int64_t checks = ctx.integer("cover_instances");
  for (std::int64_t i = 0; i < checks; ++i) {
    Rng rng(ctx.config.seed, 16, static_cast<std::uint64_t>(i));
    const TransformSpec s{i == 0 ? 0.0 : rng.uniform()};
    const PointPattern omega = sample_poisson(Window(-1.2, 1.2, -1.2, 1.2), ctx.num("cover_intensity"), rng);
    std::vector<Point2> tuple(1 + static_cast<std::size_t>(rng.uniform_int(0, 2)));
    for (auto& x : tuple) x = {rng.uniform(-1.1, 1.1), rng.uniform(-1.1, 1.1)};
    const bool holds = verify_ffjkl_condition(s, omega, tuple, 1e-9);
    out.add({{"record", "cover_condition"}, {"index", 1 + i}, {"offset", s.rotation_offset},
             {"points", omega.size()}, {"tuple_length", tuple.size()}, {"holds", holds}},
            holds);
  }
}

void suite_rho_tau(const Context& ctx, Records& out) {
  const RhoTauReport report = rho_tau_check(offset_param(ctx), window_param(ctx.params.at("window")),
                                            ctx.num("intensity"), positive(ctx, "replicates"), ctx.config.seed);
  json rec = report;
  rec["record"] = "rho_tau";
  rec["index"] = 0;
  out.statistical_tests += static_cast<std::int64_t>(report.checks.size());
  out.add(std::move(rec), report.passes(kZGate));
}

using SuiteFn = void (*)(const Context&, Records&);

struct Entry {
  SuiteInfo info;
  SuiteFn fn;
};

json finite_defaults(int max_sites, json extra) {
  json j{{"min_sites", 2}, {"max_sites", max_sites}, {"weight_min", 0.1}, {"weight_max", 2.0}};
  j.update(extra);
  return j;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list{
      {{"exact-gnz", "GNZ identity on random finite pairwise models",
        "On a finite ground space with atomic weights, the expected sum of a kernel u(x, omega) over the points of "
        "omega equals the weighted sum over sites x of E[c(x, omega) u(x, omega + x)], where c is the Papangelou "
        "density. Both sides are computed by enumerating every configuration.",
        200, finite_defaults(8, {{"kernels_per_model", 5}})},
       suite_exact_gnz},
      {{"exact-factorial", "Factorial moments of a configuration-dependent region",
        "For a random region A(omega) and a functional F, E[F N(A)_(n)] equals the sum over distinct n-tuples of "
        "sites of their weight product times E[c-hat(tuple, omega) F(omega + tuple) prod_k 1_A(x_k)], all sets "
        "evaluated on the augmented configuration. c-hat is the sequential product of Papangelou densities.",
        100, finite_defaults(7, {{"max_order", 3}})},
       suite_exact_factorial},
      {{"exact-joint", "Joint factorial moments over disjoint random regions",
        "For random regions that are disjoint for every configuration, E[F prod_i N(A_i)_(n_i)] equals the "
        "tensorized version of the single-region formula. Extra instances re-expand the right side as a sum of "
        "multiple finite differences D_Theta over all subsets Theta and check a three-way agreement.",
        50, finite_defaults(7, {{"max_order", 2}, {"dtheta_instances", 25}})},
       suite_exact_joint},
      {{"exact-stirling", "Raw moments of region counts through Stirling numbers",
        "E[F N(A)^n] equals the sum over k of S(n, k) times the order-k factorial-moment right side, S being "
        "Stirling numbers of the second kind.",
        50, finite_defaults(7, {{"max_order", 3}})},
       suite_exact_stirling},
      {{"exact-partition", "Moments of a kernel sum over set partitions",
        "E[(sum_{x in omega} u(x, omega))^n] equals a sum over set partitions of {1..n}: each block contributes "
        "one added point whose kernel value is raised to the block size, weighted by c-hat.",
        50, finite_defaults(7, {{"max_order", 3}})},
       suite_exact_partition},
      {{"exact-independence", "Independence of region counts for the atomic Poisson model",
        "With q identically 1, counts in disjoint fixed regions are independent, so every joint factorial moment "
        "factorizes into single-region moments of independent Bernoulli atoms (success probability "
        "sigma / (1 + sigma)). Preconditions are checked before comparing.",
        50, finite_defaults(8, {{"regions", 2}, {"max_order", 3}})},
       suite_exact_independence},
      {{"stir1", "Rearrangement lemma for products of power sums",
        "Sum over compositions n_1 + ... + n_p = n and assignments of the m columns to the rows of the products "
        "of multinomial-weighted powers beta_i^{n_i} alpha_{i,j}, against the sum over partitions of {1..n} "
        "into m blocks and row indices, averaged over the m! orders of the blocks. Exhaustive over sizes, random "
        "real matrices.",
        20, json{{"max_n", 4}, {"max_m", 3}, {"max_p", 2}}},
       suite_stir1},
      {{"ddd0", "Product rule for finite differences over covers",
        "D_{x_1} ... D_{x_l} of a product of kernels equals the sum over families Theta_1..Theta_l (possibly empty, "
        "union {1..l}) of prod_j D_{Theta_j} u_j. Also checks the closed form of D_Theta against repeated "
        "single differences, and that kernels meeting the cover condition give a vanishing product difference.",
        50, finite_defaults(7, {{"min_sites", 3}, {"max_length", 3}, {"constructed_instances", 25}})},
       suite_ddd0},
      {{"mc-poisson", "Poisson sampler: factorial moments and independence",
        "Samples a homogeneous Poisson process on a rectangle. Factorial moments of a subregion count match "
        "(lambda |A|)^n, counts in disjoint subregions are uncorrelated, and the count is Poisson distributed.",
        1, json{{"window", {0.0, 2.0, 0.0, 1.0}}, {"intensity", 3.0}, {"region", {0.0, 1.0, 0.0, 1.0}},
                {"other_region", {1.0, 2.0, 0.0, 1.0}}, {"samples", 100000}}},
       suite_mc_poisson},
      {{"mc-gibbs", "Strauss sampler: Monte Carlo GNZ residuals",
        "Independent birth-death chains for a Strauss process. Both sides of the GNZ identity are estimated for "
        "three kernels; with gamma = 1 the chain is compared with the direct Poisson sampler; with gamma = 0 no "
        "two points may lie within r.",
        1, json{{"window", {0.0, 1.0, 0.0, 1.0}}, {"beta", 30.0}, {"gamma", 0.5}, {"r", 0.05},
                {"samples", 100000}, {"poisson_check_samples", 20000}, {"hardcore_draws", 200}}},
       suite_mc_gibbs},
      {{"mc-identity", "Monte Carlo factorial and partition moment identities",
        "Both sides of the factorial-moment identity (random region, bounded functional) and of the partition "
        "moment formula are estimated on continuous windows; the right sides use uniform points injected into "
        "the configuration, weighted by c-hat and the window area.",
        1, json{{"window", {0.0, 1.0, 0.0, 1.0}}, {"intensity", 6.0}, {"beta", 10.0}, {"gamma", 0.5}, {"r", 0.1},
                {"samples", 100000}}},
       suite_mc_identity},
      {{"transform-invariance", "Poisson invariance under the hull-conditioned rotation",
        "Points inside the convex hull of the extreme points of omega in the unit disk are rotated in "
        "cumulative-area coordinates; everything else is fixed. For Poisson input the image is again Poisson: "
        "region counts fit Poisson laws, are uncorrelated, and have the Poisson factorial moments. The cover "
        "condition for the transformation is checked on random configurations.",
        1, json{{"offset", 0.37}, {"intensity", 40.0}, {"window", {-1.0, 1.0, -1.0, 1.0}},
                {"regions", {{{"box", {-0.6, -0.1, -0.3, 0.3}}}, {{"box", {0.1, 0.6, -0.3, 0.3}}},
                             {{"disk", {0.0, 0.6, 0.25}}}}},
                {"replicates", 10000}, {"cover_instances", 100}, {"cover_intensity", 10.0}}},
       suite_transform_invariance},
      {{"rho-tau", "Correlation functions of the transformed Poisson process",
        "The first and second factorial moment measures of the transformed process on a grid of boxes are "
        "compared with those of the original Poisson process, whose correlation functions are constant.",
        1, json{{"offset", 0.37}, {"intensity", 40.0}, {"window", {-1.0, 1.0, -1.0, 1.0}}, {"replicates", 10000}}},
       suite_rho_tau},
  };
  return list;
}

const Entry* find_entry(std::string_view name) {
  for (const Entry& e : entries())
    if (e.info.name == name) return &e;
  return nullptr;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json resolved(const SuiteConfig& config) {
  const Entry* e = find_entry(config.suite);
  return {{"suite", config.suite},
          {"seed", config.seed},
          {"instance_count", config.instance_count > 0 ? config.instance_count : e->info.default_instances},
          {"parameters", resolved_parameters(config)}};
}

}  // namespace

const std::vector<SuiteInfo>& suite_catalog() {
  static const std::vector<SuiteInfo> list = [] {
    std::vector<SuiteInfo> out;
    for (const Entry& e : entries()) out.push_back(e.info);
    return out;
  }();
  return list;
}

const SuiteInfo* find_suite(std::string_view name) {
  const Entry* e = find_entry(name);
  return e ? &e->info : nullptr;
}

SuiteConfig parse_suite_config(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  SuiteConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "suite") {
      if (!value.is_string()) throw ValidationError("config: suite must be a string");
      c.suite = value.get<std::string>();
    } else if (key == "seed") {
      if (!value.is_number_integer()) throw ValidationError("config: seed must be an integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "instance_count") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 1)
        throw ValidationError("config: instance_count must be a positive integer");
      c.instance_count = value.get<std::int64_t>();
    } else if (key == "parameters") {
      if (!value.is_object()) throw ValidationError("config: parameters must be an object");
      c.parameters = value;
    } else {
      throw ValidationError("config: unknown key \"" + key + "\"");
    }
  }
  return c;
}

json resolved_parameters(const SuiteConfig& config) {
  const SuiteInfo* info = find_suite(config.suite);
  if (!info) throw ValidationError("unknown suite \"" + config.suite + "\"");
  json out = info->default_parameters;
  if (!config.parameters.is_object()) throw ValidationError("parameters must be an object");
  for (const auto& [key, value] : config.parameters.items()) {
    if (!out.contains(key)) throw ValidationError("suite " + config.suite + ": unknown parameter \"" + key + "\"");
    const json& d = out[key];
    const bool ok = d.is_number_integer() ? value.is_number_integer()
                    : d.is_number()       ? value.is_number()
                                          : d.type() == value.type();
    if (!ok) throw ValidationError("suite " + config.suite + ": parameter \"" + key + "\" has the wrong type");
    out[key] = value;
  }
  return out;
}

std::string config_hash(const SuiteConfig& config) {
  const std::string text = resolved(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SuiteResult run_suite(const SuiteConfig& config, std::ostream& out) {
  const Entry* entry = find_entry(config.suite);
  if (!entry) throw ValidationError("unknown suite \"" + config.suite + "\"");
  const json cfg = resolved(config);
  const Context ctx{config, cfg.at("parameters"), cfg.at("instance_count").get<std::int64_t>()};

  Records records;
  entry->fn(ctx, records);

  out << json{{"record", "header"},
              {"version", kReportVersion},
              {"suite", config.suite},
              {"config_hash", config_hash(config)},
              {"timestamp", utc_timestamp()}}
             .dump()
      << '\n';
  for (const json& line : records.lines) out << line.dump() << '\n';

  SuiteResult result;
  result.records = static_cast<std::int64_t>(records.lines.size());
  result.failures = records.failures;
  result.status = records.failures == 0 ? ExitStatus::Pass : ExitStatus::GateFailure;
  const double alarm = records.statistical_tests * 1e-3;
  out << json{{"record", "summary"},
              {"suite", config.suite},
              {"config", cfg},
              {"records", result.records},
              {"failures", result.failures},
              {"statistical_tests", records.statistical_tests},
              {"passed", result.failures == 0},
              {"gates", {{"exact_rel_gap", kExactGate}, {"abs_z", kZGate}, {"p_value", kPGate}}},
              {"multiplicity_note",
               records.statistical_tests == 0
                   ? std::string("no statistical tests")
                   : "each statistical test has a false-alarm rate of about 1e-4 (|z| <= 4) or 1e-3 (p >= 1e-3); "
                     "a Bonferroni bound for this run is " + json(alarm).dump()}}
             .dump()
      << '\n';
  out.flush();
  return result;
}

}  // namespace ppm
