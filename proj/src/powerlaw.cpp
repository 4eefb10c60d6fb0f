#include "specgame/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "specgame/rng.hpp"

namespace specgame::powerlaw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sorted_copy(std::span<const double> samples) {
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    return xs;
}

void require_positive(std::span<const double> samples) {
    for (double x : samples)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("power-law fitting requires positive finite samples");
}

// KS over a sorted tail slice [first, last). Walks groups of tied values so
// both sides of every empirical-CDF jump are compared against the model.
double ks_sorted_tail(const double* first, const double* last, double x_min, double alpha) {
    const double m = static_cast<double>(last - first);
    const double expo = 1.0 - alpha;
    double d = 0.0;
    const double* g = first;
    while (g != last) {
        const double* e = g;
        while (e != last && *e == *g) ++e;
        const double f_fit = 1.0 - std::pow(*g / x_min, expo);
        const double lo = static_cast<double>(g - first) / m;
        const double hi = static_cast<double>(e - first) / m;
        d = std::max(d, std::max(std::fabs(lo - f_fit), std::fabs(hi - f_fit)));
        g = e;
    }
    return d;
}

} // namespace

const char* preferred_name(Preferred p) {
    switch (p) {
        case Preferred::PowerLaw: return "power-law";
        case Preferred::Exponential: return "exponential";
        case Preferred::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

double pareto_quantile(double u, double x_min, double alpha) {
    return x_min * std::pow(u, -1.0 / (alpha - 1.0));
}

double fit_alpha(std::span<const double> samples, double x_min, size_t min_tail) {
    require_positive(samples);
    double log_sum = 0.0;
    size_t n = 0;
    const double log_xmin = std::log(x_min);
    for (double x : samples) {
        if (x >= x_min) {
            log_sum += std::log(x) - log_xmin;
            ++n;
        }
    }
    if (n < min_tail)
        throw std::invalid_argument("tail too small: " + std::to_string(n) + " samples >= x_min");
    if (!(log_sum > 0.0))
        throw std::domain_error("all tail samples equal x_min; alpha is infinite");
    return 1.0 + static_cast<double>(n) / log_sum;
}

double ks_distance(std::span<const double> samples, double x_min, double alpha) {
    std::vector<double> tail;
    for (double x : samples)
        if (x >= x_min) tail.push_back(x);
    if (tail.empty()) throw std::invalid_argument("ks_distance: empty tail");
    std::sort(tail.begin(), tail.end());
    return ks_sorted_tail(tail.data(), tail.data() + tail.size(), x_min, alpha);
}

PowerLawFit scan_xmin(std::span<const double> samples, size_t min_tail) {
    require_positive(samples);
    if (samples.size() < 2 * min_tail)
        throw std::invalid_argument("scan_xmin needs at least 2 * min_tail samples");
    const std::vector<double> xs = sorted_copy(samples);
    const size_t n = xs.size();

    std::vector<double> logs(n);
    for (size_t i = 0; i < n; ++i) logs[i] = std::log(xs[i]);
    std::vector<double> suffix_log(n + 1, 0.0);
    for (size_t i = n; i-- > 0;) suffix_log[i] = suffix_log[i + 1] + logs[i];

    // Candidate x_min values: first index of every unique value whose tail
    // still holds min_tail samples.
    std::vector<size_t> candidates;
    for (size_t i = 0; i + min_tail <= n; ++i)
        if (i == 0 || xs[i] != xs[i - 1]) candidates.push_back(i);
    if (candidates.empty())
        throw std::invalid_argument("no x_min candidate leaves a large enough tail");

    std::vector<double> cand_alpha(candidates.size(), kInf);
    std::vector<double> cand_ks(candidates.size(), kInf);

#pragma omp parallel for schedule(dynamic)
    for (size_t c = 0; c < candidates.size(); ++c) {
        const size_t i = candidates[c];
        const double v = xs[i];
        const double m = static_cast<double>(n - i);
        const double log_sum = suffix_log[i] - m * logs[i];
        if (!(log_sum > 0.0)) continue; // whole tail tied at x_min
        const double alpha = 1.0 + m / log_sum;
        cand_alpha[c] = alpha;
        cand_ks[c] = ks_sorted_tail(xs.data() + i, xs.data() + n, v, alpha);
    }

    // Serial selection; strict < keeps the smallest x_min among KS ties.
    size_t best = candidates.size();
    double best_ks = kInf;
    for (size_t c = 0; c < candidates.size(); ++c) {
        if (cand_ks[c] < best_ks) {
            best_ks = cand_ks[c];
            best = c;
        }
    }
    if (best == candidates.size())
        throw std::domain_error("scan_xmin: every candidate tail is degenerate");

    PowerLawFit fit;
    fit.x_min = xs[candidates[best]];
    fit.alpha = cand_alpha[best];
    fit.ks_distance = cand_ks[best];
    fit.n_tail = n - candidates[best];
    return fit;
}

GofResult goodness_of_fit(std::span<const double> samples, const PowerLawFit& fit,
                          int n_bootstrap, uint64_t seed, size_t min_tail) {
    if (n_bootstrap < 100)
        throw std::invalid_argument("goodness_of_fit needs at least 100 bootstrap replicates");
    if (!(fit.alpha > 1.0) || !(fit.x_min > 0.0))
        throw std::invalid_argument("goodness_of_fit: invalid fit");
    require_positive(samples);

    std::vector<double> body;
    size_t n_tail = 0;
    for (double x : samples) {
        if (x >= fit.x_min) ++n_tail;
        else body.push_back(x);
    }
    if (n_tail == 0) throw std::invalid_argument("goodness_of_fit: fit tail is empty");
    const size_t n = samples.size();
    const double p_tail = static_cast<double>(n_tail) / static_cast<double>(n);

    std::vector<double> rep_ks(static_cast<size_t>(n_bootstrap), kInf);

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < n_bootstrap; ++r) {
        Rng rng(mix_seed(seed, static_cast<uint64_t>(r)));
        std::vector<double> rep(n);
        for (size_t i = 0; i < n; ++i) {
            if (body.empty() || rng.uniform01() < p_tail)
                rep[i] = pareto_quantile(rng.uniform01_open0(), fit.x_min, fit.alpha);
            else
                rep[i] = body[rng.below(body.size())];
        }
        try {
            rep_ks[static_cast<size_t>(r)] = scan_xmin(rep, min_tail).ks_distance;
        } catch (const std::exception&) {
            // Degenerate replicate counts as an arbitrarily poor refit.
        }
    }

    size_t worse = 0;
    for (double d : rep_ks)
        if (d >= fit.ks_distance) ++worse;
    return {static_cast<double>(worse) / static_cast<double>(n_bootstrap), n_bootstrap};
}

VuongResult vuong_test(std::span<const double> samples, double x_min, size_t min_tail) {
    require_positive(samples);
    std::vector<double> tail;
    for (double x : samples)
        if (x >= x_min) tail.push_back(x);
    if (tail.size() < min_tail)
        throw std::invalid_argument("vuong_test: tail too small");

    const double n = static_cast<double>(tail.size());
    double mean = 0.0;
    for (double x : tail) mean += x;
    mean /= n;
    if (!(mean > x_min))
        throw std::domain_error("vuong_test: degenerate tail (no spread above x_min)");
    const double alpha = fit_alpha(tail, x_min, min_tail);
    const double lambda = 1.0 / (mean - x_min); // MLE of the shifted exponential

    // Pointwise log-likelihood ratios power law vs exponential.
    const double log_pl_norm = std::log((alpha - 1.0) / x_min);
    const double log_ex_norm = std::log(lambda);
    std::vector<double> ell(tail.size());
    for (size_t i = 0; i < tail.size(); ++i) {
        const double x = tail[i];
        const double lpl = log_pl_norm - alpha * std::log(x / x_min);
        const double lex = log_ex_norm - lambda * (x - x_min);
        ell[i] = lpl - lex;
    }
    double lmean = 0.0;
    for (double e : ell) lmean += e;
    lmean /= n;
    double lvar = 0.0;
    for (double e : ell) lvar += (e - lmean) * (e - lmean);
    lvar /= n;
    if (!(lvar > 0.0))
        throw std::domain_error("vuong_test: degenerate tail (identical likelihoods)");

    VuongResult res;
    res.likelihood_ratio = lmean * n / (std::sqrt(lvar) * std::sqrt(n));
    res.p_value = std::erfc(std::fabs(res.likelihood_ratio) / std::sqrt(2.0));
    if (res.p_value < 0.1)
        res.preferred = res.likelihood_ratio > 0 ? Preferred::PowerLaw : Preferred::Exponential;
    else
        res.preferred = Preferred::Inconclusive;
    return res;
}

} // namespace specgame::powerlaw
