#include "specgame/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace specgame::reference {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson: need two equal-length series");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double cxy = 0.0, cxx = 0.0, cyy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - mx) * (y[i] - my);
        cxx += (x[i] - mx) * (x[i] - mx);
        cyy += (y[i] - my) * (y[i] - my);
    }
    if (cxx == 0.0 || cyy == 0.0)
        throw std::domain_error("pearson: zero variance");
    return cxy / std::sqrt(cxx * cyy);
}

AcfResult volatility_autocorrelation(const ReturnSeries& returns, int max_lag) {
    if (max_lag < 1) throw std::invalid_argument("max_lag must be >= 1");
    const size_t n = returns.values.size();
    AcfResult out;
    for (int lag = 1; lag <= max_lag; ++lag) {
        std::vector<double> xs, ys;
        for (size_t t = 0; t + static_cast<size_t>(lag) < n; ++t) {
            if (returns.valid[t] && returns.valid[t + lag]) {
                xs.push_back(std::fabs(returns.values[t]));
                ys.push_back(std::fabs(returns.values[t + lag]));
            }
        }
        out.lags.push_back(lag);
        if (xs.size() < 3) {
            out.rho.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        out.rho.push_back(pearson(xs, ys));
    }
    return out;
}

double gini_pairwise(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("gini needs at least one value");
    double total = 0.0;
    for (double v : values) total += v;
    if (total <= 0.0) throw std::domain_error("gini undefined for all-zero wealth");
    const double n = static_cast<double>(values.size());
    double acc = 0.0;
    for (size_t i = 0; i < values.size(); ++i)
        for (size_t j = 0; j < values.size(); ++j)
            acc += std::fabs(values[i] - values[j]);
    return acc / (2.0 * n * n * (total / n));
}

std::vector<std::pair<double, double>> ccdf_counting(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("ccdf needs at least one value");
    std::vector<double> uniq(values.begin(), values.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<std::pair<double, double>> out;
    for (double u : uniq) {
        size_t count = 0;
        for (double v : values)
            if (v >= u) ++count;
        out.emplace_back(u, static_cast<double>(count) / static_cast<double>(values.size()));
    }
    return out;
}

double central_moment(std::span<const double> values, int k) {
    if (values.empty()) throw std::invalid_argument("central_moment: empty input");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double acc = 0.0;
    for (double v : values) acc += std::pow(v - mean, k);
    return acc / n;
}

double ks_distance_powerlaw(std::span<const double> tail, double x_min, double alpha) {
    if (tail.empty()) throw std::invalid_argument("ks_distance: empty tail");
    const double n = static_cast<double>(tail.size());
    double d = 0.0;
    for (double x : tail) {
        size_t le = 0, lt = 0;
        for (double y : tail) {
            if (y <= x) ++le;
            if (y < x) ++lt;
        }
        // Empirical CDF jumps at x: compare the fitted CDF against both sides.
        const double f_fit = 1.0 - std::pow(x / x_min, 1.0 - alpha);
        d = std::max(d, std::fabs(static_cast<double>(le) / n - f_fit));
        d = std::max(d, std::fabs(static_cast<double>(lt) / n - f_fit));
    }
    return d;
}

} // namespace specgame::reference
