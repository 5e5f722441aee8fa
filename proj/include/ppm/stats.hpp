#pragma once

#include <cstdint>
#include <span>

namespace ppm::stats {

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  int bins = 0;
};

/// Pearson goodness of fit of integer counts to Poisson(mean). Adjacent
/// count values are pooled from both tails until every bin expects at
/// least `min_expected` observations; the parameter is known, so
/// df = bins - 1.
ChiSquareResult chi_square_poisson(std::span<const std::int64_t> counts, double mean, double min_expected = 5.0);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, int degrees_of_freedom);

}  // namespace ppm::stats
