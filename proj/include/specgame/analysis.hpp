#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "specgame/types.hpp"

namespace specgame {

// Log returns r(t) = ln p(t) - ln p(t-1) with a validity mask: entries whose
// operands are nonpositive or non-finite are masked out of every downstream
// statistic (extreme states can push the price below zero).
struct ReturnSeries {
    std::vector<double> values;   // NaN where invalid
    std::vector<uint8_t> valid;
    size_t n_valid() const;
};

ReturnSeries log_returns(std::span<const double> prices);

struct LogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct AcfResult {
    std::vector<int> lags;        // 1..max_lag
    std::vector<double> rho;
    std::optional<LogFit> fit;    // set by acf_log_fit
};

// Autocorrelation of volatility |r(t)|: Pearson correlation of
// (|r(t+tau)|, |r(t)|) over valid overlapping pairs, tau = 1..max_lag.
// OpenMP-parallel over lags; specgame::reference has the naive serial twin.
AcfResult volatility_autocorrelation(const ReturnSeries& returns, int max_lag);

// OLS of rho against ln(tau) over lags in [lag_lo, lag_hi].
LogFit log_fit(std::span<const int> lags, std::span<const double> rho,
               int lag_lo, int lag_hi);

// Convenience: fit attached to the result over the given window.
void acf_log_fit(AcfResult& acf, int lag_lo, int lag_hi);

// Population excess kurtosis, no small-sample correction.
double excess_kurtosis(std::span<const double> values);

// Gini coefficient of nonnegative values via the sorted-rank identity,
// exactly equal to sum_ij |w_i - w_j| / (2 n^2 mean).
double gini(std::span<const double> values);
double gini(std::span<const int64_t> values);

// Complementary cumulative distribution evaluated at the sorted unique
// values: (x, fraction of samples >= x), monotone nonincreasing from 1.
std::vector<std::pair<double, double>> ccdf(std::span<const double> values);
std::vector<std::pair<double, double>> ccdf(std::span<const int64_t> values);

// Interpolation-free CCDF lookup: fraction of samples >= x.
double ccdf_at(const std::vector<std::pair<double, double>>& curve, double x);

struct OrderClassCounts {
    uint64_t big = 0;
    uint64_t medium = 0;
    uint64_t small = 0;
};

OrderClassCounts classify_orders(std::span<const int64_t> quantities);

struct ActionFractions {
    double active_hold = 0.0;
    double passive_hold = 0.0;
    double buy = 0.0;
    double sell = 0.0;
};

ActionFractions action_ratios(std::span<const StepRecord> steps);
ActionFractions action_ratios(const ActionTotals& totals);

// Frequency map of completed real round trips keyed by
// (horizon = close - open, strategy gain).
using HorizonGainMap = std::map<std::pair<int64_t, int64_t>, uint64_t>;

HorizonGainMap horizon_gain_map(std::span<const TradeRecord> trades);
void accumulate_horizon_gain(HorizonGainMap& map, const TradeRecord& trade);

std::vector<std::pair<double, double>> horizon_distribution(
    std::span<const TradeRecord> trades);

// Population standard deviation of the price-change series, full run.
double sigma(std::span<const double> delta_p);

} // namespace specgame
