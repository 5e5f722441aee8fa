#include "ppm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ppm/errors.hpp"

namespace ppm::stats {

double chi_square_sf(double statistic, int degrees_of_freedom) {
  if (degrees_of_freedom < 1) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * degrees_of_freedom, 0.5 * statistic);
}

ChiSquareResult chi_square_poisson(std::span<const std::int64_t> counts, double mean, double min_expected) {
  if (counts.empty()) throw ValidationError("chi_square_poisson: no observations");
  if (!(mean > 0.0)) throw ValidationError("chi_square_poisson: mean must be positive");
  const double n = static_cast<double>(counts.size());
  const boost::math::poisson_distribution<double> dist(mean);

  const std::int64_t kmax = std::max<std::int64_t>(*std::max_element(counts.begin(), counts.end()),
                                                   static_cast<std::int64_t>(mean + 10.0 * std::sqrt(mean) + 10.0));
  std::vector<double> observed(kmax + 1, 0.0);
  for (std::int64_t c : counts) {
    if (c < 0) throw ValidationError("chi_square_poisson: negative count");
    observed[c] += 1.0;
  }

  // Bins [lo_b, hi_b]; the first is open below at 0 and the last above.
  struct Bin {
    double observed = 0.0;
    double expected = 0.0;
  };
  std::vector<Bin> bins;
  Bin current;
  for (std::int64_t k = 0; k <= kmax; ++k) {
    current.observed += observed[k];
    current.expected += n * boost::math::pdf(dist, static_cast<double>(k));
    if (current.expected >= min_expected) {
      bins.push_back(current);
      current = Bin{};
    }
  }
  // Everything above kmax joins the leftover tail.
  current.expected += n * boost::math::cdf(boost::math::complement(dist, static_cast<double>(kmax)));
  if (bins.empty()) {
    bins.push_back(current);
  } else {
    bins.back().observed += current.observed;
    bins.back().expected += current.expected;
  }

  ChiSquareResult out;
  out.bins = static_cast<int>(bins.size());
  for (const Bin& b : bins) out.statistic += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
  out.degrees_of_freedom = out.bins - 1;
  out.p_value = chi_square_sf(out.statistic, out.degrees_of_freedom);
  return out;
}

}  // namespace ppm::stats
