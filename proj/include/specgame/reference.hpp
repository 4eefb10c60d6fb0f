#pragma once
#include <span>
#include <utility>
#include <vector>

#include "specgame/analysis.hpp"

namespace specgame::reference {

// Naive serial implementations of the parallel kernels. They stay
// deliberately close to the textbook definitions (explicit pair vectors,
// nested loops over the double sums) and exist as independent oracles for
// the tests plus the baseline side of the benchmark tool.

double pearson(std::span<const double> x, std::span<const double> y);

AcfResult volatility_autocorrelation(const ReturnSeries& returns, int max_lag);

// Pairwise-difference Gini: sum_ij |x_i - x_j| / (2 n^2 mean). O(n^2).
double gini_pairwise(std::span<const double> values);

// CCDF by counting every sample against every unique value. O(n * u).
std::vector<std::pair<double, double>> ccdf_counting(std::span<const double> values);

// Population central moment of order k by direct evaluation.
double central_moment(std::span<const double> values, int k);

// sup |F_emp - F_fit| over a power-law tail, recomputing the empirical CDF
// from scratch per point. `tail` need not be sorted.
double ks_distance_powerlaw(std::span<const double> tail, double x_min, double alpha);

} // namespace specgame::reference
