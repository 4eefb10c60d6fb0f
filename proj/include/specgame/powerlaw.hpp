#pragma once
#include <cstdint>
#include <span>
#include <vector>

namespace specgame::powerlaw {

inline constexpr size_t kDefaultMinTail = 10;
inline constexpr int kDefaultBootstrap = 1000;

struct PowerLawFit {
    double alpha = 0.0;       // tail index of the CCDF, > 1
    double x_min = 0.0;       // lower cut-off, one of the observed values
    double ks_distance = 0.0; // sup |F_emp - F_fit| on the tail
    size_t n_tail = 0;        // samples >= x_min
};

struct GofResult {
    double p_value = 0.0;
    int n_bootstrap = 0;
};

enum class Preferred { PowerLaw, Exponential, Inconclusive };

struct VuongResult {
    double likelihood_ratio = 0.0; // normalized: R / (s_l * sqrt(n))
    double p_value = 0.0;          // two-sided normal
    Preferred preferred = Preferred::Inconclusive;
};

const char* preferred_name(Preferred p);

// Continuous maximum-likelihood tail index over samples >= x_min:
// alpha = 1 + n / sum(ln(x_i / x_min)).
double fit_alpha(std::span<const double> samples, double x_min,
                 size_t min_tail = kDefaultMinTail);

// KS distance between the empirical tail CDF and the fitted power law.
double ks_distance(std::span<const double> samples, double x_min, double alpha);

// Scans every unique sample value as an x_min candidate, fits alpha, and
// returns the fit minimizing the KS distance (ties toward smaller x_min).
// Candidate evaluation is OpenMP-parallel; the selection pass is serial so
// the result is schedule-independent.
PowerLawFit scan_xmin(std::span<const double> samples,
                      size_t min_tail = kDefaultMinTail);

// Semi-parametric bootstrap goodness-of-fit: replicates resample the body
// empirically and the tail from the fitted law, are refit with scan_xmin,
// and the p-value is the fraction with KS >= the observed KS. Deterministic
// for a fixed seed; replicates run in the OpenMP pool with per-replicate
// derived seeds.
GofResult goodness_of_fit(std::span<const double> samples, const PowerLawFit& fit,
                          int n_bootstrap, uint64_t seed,
                          size_t min_tail = kDefaultMinTail);

// Vuong closeness test of power law vs exponential on the tail >= x_min.
VuongResult vuong_test(std::span<const double> samples, double x_min,
                       size_t min_tail = kDefaultMinTail);

// Inverse-CDF Pareto sampling, u in (0, 1]: x = x_min * u^(-1/(alpha-1)).
double pareto_quantile(double u, double x_min, double alpha);

} // namespace specgame::powerlaw
