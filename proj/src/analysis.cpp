#include "specgame/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace specgame {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double clamp_rho(double r) { return std::min(1.0, std::max(-1.0, r)); }

} // namespace

size_t ReturnSeries::n_valid() const {
    size_t n = 0;
    for (uint8_t v : valid) n += v;
    return n;
}

ReturnSeries log_returns(std::span<const double> prices) {
    if (prices.size() < 2)
        throw std::invalid_argument("log_returns needs at least two prices");
    ReturnSeries rs;
    rs.values.reserve(prices.size() - 1);
    rs.valid.reserve(prices.size() - 1);
    for (size_t i = 1; i < prices.size(); ++i) {
        const double a = prices[i - 1], b = prices[i];
        if (a > 0 && b > 0 && std::isfinite(a) && std::isfinite(b)) {
            rs.values.push_back(std::log(b) - std::log(a));
            rs.valid.push_back(1);
        } else {
            rs.values.push_back(kNan);
            rs.valid.push_back(0);
        }
    }
    return rs;
}

AcfResult volatility_autocorrelation(const ReturnSeries& returns, int max_lag) {
    if (max_lag < 1) throw std::invalid_argument("max_lag must be >= 1");
    const size_t n = returns.values.size();
    if (returns.n_valid() < static_cast<size_t>(max_lag) + 2)
        throw std::invalid_argument("series too short for requested max_lag");

    std::vector<double> vol(n, 0.0);
    for (size_t i = 0; i < n; ++i)
        if (returns.valid[i]) vol[i] = std::fabs(returns.values[i]);

    // Whole-series degeneracy check up front.
    {
        double mean = 0.0;
        size_t m = 0;
        for (size_t i = 0; i < n; ++i)
            if (returns.valid[i]) { mean += vol[i]; ++m; }
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (returns.valid[i]) var += (vol[i] - mean) * (vol[i] - mean);
        if (var == 0.0)
            throw std::domain_error("volatility has zero variance; autocorrelation undefined");
    }

    AcfResult out;
    out.lags.resize(static_cast<size_t>(max_lag));
    out.rho.assign(static_cast<size_t>(max_lag), kNan);
    std::iota(out.lags.begin(), out.lags.end(), 1);

    const uint8_t* valid = returns.valid.data();
    const double* v = vol.data();

#pragma omp parallel for schedule(dynamic)
    for (int lag = 1; lag <= max_lag; ++lag) {
        // Two-pass Pearson over the overlapping pairs of this lag.
        double sx = 0.0, sy = 0.0;
        size_t m = 0;
        const size_t limit = n - static_cast<size_t>(lag);
        for (size_t t = 0; t < limit; ++t) {
            if (valid[t] && valid[t + lag]) {
                sx += v[t];
                sy += v[t + lag];
                ++m;
            }
        }
        if (m < 3) continue;
        const double mx = sx / static_cast<double>(m);
        const double my = sy / static_cast<double>(m);
        double cxy = 0.0, cxx = 0.0, cyy = 0.0;
        for (size_t t = 0; t < limit; ++t) {
            if (valid[t] && valid[t + lag]) {
                const double dx = v[t] - mx;
                const double dy = v[t + lag] - my;
                cxy += dx * dy;
                cxx += dx * dx;
                cyy += dy * dy;
            }
        }
        if (cxx > 0.0 && cyy > 0.0)
            out.rho[static_cast<size_t>(lag - 1)] = clamp_rho(cxy / std::sqrt(cxx * cyy));
    }
    return out;
}

LogFit log_fit(std::span<const int> lags, std::span<const double> rho,
               int lag_lo, int lag_hi) {
    if (lags.size() != rho.size())
        throw std::invalid_argument("log_fit: lags and rho must have equal length");
    if (lag_lo < 1 || lag_hi < lag_lo)
        throw std::invalid_argument("log_fit: degenerate lag window");
    std::vector<double> xs, ys;
    for (size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < lag_lo || lags[i] > lag_hi) continue;
        if (!std::isfinite(rho[i])) continue;
        xs.push_back(std::log(static_cast<double>(lags[i])));
        ys.push_back(rho[i]);
    }
    if (xs.size() < 3)
        throw std::invalid_argument("log_fit: fewer than 3 points in window");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("log_fit: degenerate lag window");
    LogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += e * e;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

void acf_log_fit(AcfResult& acf, int lag_lo, int lag_hi) {
    acf.fit = log_fit(acf.lags, acf.rho, lag_lo, lag_hi);
}

double excess_kurtosis(std::span<const double> values) {
    if (values.size() < 4)
        throw std::invalid_argument("excess_kurtosis needs at least 4 values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if (m2 == 0.0) throw std::domain_error("excess_kurtosis undefined for zero variance");
    return m4 / (m2 * m2) - 3.0;
}

namespace {

template <typename T>
double gini_impl(std::span<const T> values) {
    if (values.empty()) throw std::invalid_argument("gini needs at least one value");
    std::vector<double> xs(values.begin(), values.end());
    double total = 0.0;
    for (double x : xs) {
        if (x < 0) throw std::invalid_argument("gini requires nonnegative values");
        total += x;
    }
    if (total <= 0.0) throw std::domain_error("gini undefined for all-zero wealth");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    // sum_ij |x_i - x_j| = 2 sum_k (2k - n - 1) x_(k), k 1-based ascending.
    double weighted = 0.0;
    for (size_t k = 0; k < xs.size(); ++k)
        weighted += (2.0 * static_cast<double>(k + 1) - n - 1.0) * xs[k];
    const double g = weighted / (n * total);
    return std::min(1.0, std::max(0.0, g));
}

template <typename T>
std::vector<std::pair<double, double>> ccdf_impl(std::span<const T> values) {
    if (values.empty()) throw std::invalid_argument("ccdf needs at least one value");
    std::vector<double> xs(values.begin(), values.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    std::vector<std::pair<double, double>> out;
    size_t i = 0;
    while (i < xs.size()) {
        size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        out.emplace_back(xs[i], static_cast<double>(xs.size() - i) / n);
        i = j;
    }
    return out;
}

} // namespace

double gini(std::span<const double> values) { return gini_impl(values); }
double gini(std::span<const int64_t> values) { return gini_impl(values); }

std::vector<std::pair<double, double>> ccdf(std::span<const double> values) {
    return ccdf_impl(values);
}
std::vector<std::pair<double, double>> ccdf(std::span<const int64_t> values) {
    return ccdf_impl(values);
}

double ccdf_at(const std::vector<std::pair<double, double>>& curve, double x) {
    // Fraction >= x: the CCDF value of the smallest listed point >= x.
    double frac = 0.0;
    for (auto it = curve.rbegin(); it != curve.rend(); ++it) {
        if (it->first >= x) frac = it->second;
        else break;
    }
    return frac;
}

OrderClassCounts classify_orders(std::span<const int64_t> quantities) {
    OrderClassCounts c;
    for (int64_t q : quantities) {
        switch (order_class(q)) {
            case OrderClass::Big: ++c.big; break;
            case OrderClass::Medium: ++c.medium; break;
            case OrderClass::Small: ++c.small; break;
        }
    }
    return c;
}

ActionFractions action_ratios(const ActionTotals& totals) {
    const double denom = static_cast<double>(totals.active_hold + totals.passive_hold +
                                             totals.buys + totals.sells);
    if (denom == 0.0) throw std::invalid_argument("action_ratios: no actions recorded");
    return {static_cast<double>(totals.active_hold) / denom,
            static_cast<double>(totals.passive_hold) / denom,
            static_cast<double>(totals.buys) / denom,
            static_cast<double>(totals.sells) / denom};
}

ActionFractions action_ratios(std::span<const StepRecord> steps) {
    if (steps.empty()) throw std::invalid_argument("action_ratios: empty step records");
    ActionTotals t;
    for (const auto& s : steps) {
        t.active_hold += static_cast<uint64_t>(s.active_hold);
        t.passive_hold += static_cast<uint64_t>(s.passive_hold);
        t.buys += static_cast<uint64_t>(s.buys);
        t.sells += static_cast<uint64_t>(s.sells);
    }
    return action_ratios(t);
}

void accumulate_horizon_gain(HorizonGainMap& map, const TradeRecord& trade) {
    ++map[{trade.close_time - trade.open_time, trade.strategy_gain}];
}

HorizonGainMap horizon_gain_map(std::span<const TradeRecord> trades) {
    HorizonGainMap map;
    for (const auto& tr : trades) accumulate_horizon_gain(map, tr);
    return map;
}

std::vector<std::pair<double, double>> horizon_distribution(
    std::span<const TradeRecord> trades) {
    if (trades.empty()) throw std::invalid_argument("horizon_distribution: empty trade log");
    std::vector<double> horizons;
    horizons.reserve(trades.size());
    for (const auto& tr : trades)
        horizons.push_back(static_cast<double>(tr.close_time - tr.open_time));
    return ccdf(std::span<const double>(horizons));
}

double sigma(std::span<const double> delta_p) {
    if (delta_p.size() < 2) throw std::invalid_argument("sigma needs at least 2 values");
    const double n = static_cast<double>(delta_p.size());
    double mean = 0.0;
    for (double v : delta_p) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : delta_p) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

} // namespace specgame
