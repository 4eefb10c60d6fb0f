// Benchmark comparing the OpenMP kernels against the serial reference
// implementations, plus raw engine throughput. Sizes are CLI-tunable.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "specgame/analysis.hpp"
#include "specgame/engine.hpp"
#include "specgame/powerlaw.hpp"
#include "specgame/reference.hpp"
#include "specgame/rng.hpp"

using namespace specgame;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_it(F&& f) {
    const double t0 = now_s();
    f();
    return now_s() - t0;
}

void row(const char* name, double serial_s, double parallel_s, double max_diff) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   max|diff| %.3g\n",
                name, serial_s, parallel_s, serial_s / parallel_s, max_diff);
}

} // namespace

int main(int argc, char** argv) {
    int series_len = 50'000;
    int max_lag = 1000;
    int n_samples = 20'000;
    if (argc > 1) series_len = std::atoi(argv[1]);
    if (argc > 2) max_lag = std::atoi(argv[2]);
    if (argc > 3) n_samples = std::atoi(argv[3]);

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled\n");
#endif

    // Engine throughput (no parallel variant: single runs are sequential by
    // contract; trials parallelize in the experiments layer).
    for (int memory : {5, 7}) {
        GameConfig cfg;
        cfg.n_players = 1000;
        cfg.memory = memory;
        cfg.n_steps = 5000;
        cfg.seed = 42;
        RunOptions opts;
        opts.collect_trades = false;
        double sink = 0.0;
        const double dt = time_it([&] { sink = run(cfg, opts).final_price; });
        std::printf("engine M=%d                   %8.3fs   %6.1f Mplayer-steps/s (p_T=%.1f)\n",
                    memory, dt,
                    cfg.n_players * static_cast<double>(cfg.n_steps) / dt / 1e6, sink);
    }

    // Volatility ACF: naive serial reference vs fused OpenMP kernel.
    {
        Rng rng(7);
        std::vector<double> prices{100.0};
        for (int i = 0; i < series_len; ++i)
            prices.push_back(prices.back() * std::exp(0.01 * (rng.uniform01() - 0.5)));
        const ReturnSeries rs = log_returns(prices);
        AcfResult a, b;
        const double ts = time_it([&] { a = reference::volatility_autocorrelation(rs, max_lag); });
        const double tp = time_it([&] { b = volatility_autocorrelation(rs, max_lag); });
        double diff = 0.0;
        for (size_t i = 0; i < a.rho.size(); ++i)
            diff = std::max(diff, std::fabs(a.rho[i] - b.rho[i]));
        row("volatility ACF", ts, tp, diff);
    }

    // Gini: pairwise O(n^2) reference vs sorted production kernel.
    {
        Rng rng(11);
        std::vector<double> wealth;
        for (int i = 0; i < n_samples; ++i)
            wealth.push_back(powerlaw::pareto_quantile(rng.uniform01_open0(), 9.0, 2.0));
        double a = 0.0, b = 0.0;
        const double ts = time_it([&] { a = reference::gini_pairwise(wealth); });
        const double tp = time_it([&] { b = gini(std::span<const double>(wealth)); });
        row("gini", ts, tp, std::fabs(a - b));
    }

    // x_min scan: single-thread vs OpenMP candidate evaluation.
    {
        Rng rng(13);
        std::vector<double> samples;
        for (int i = 0; i < n_samples; ++i) {
            const double u = rng.uniform01();
            samples.push_back(u < 0.5 ? 1.0 + 99.0 * rng.uniform01()
                                      : powerlaw::pareto_quantile(rng.uniform01_open0(),
                                                                  100.0, 2.5));
        }
        powerlaw::PowerLawFit fa, fb;
#ifdef _OPENMP
        const int threads = omp_get_max_threads();
        omp_set_num_threads(1);
        const double ts = time_it([&] { fa = powerlaw::scan_xmin(samples); });
        omp_set_num_threads(threads);
#else
        const double ts = time_it([&] { fa = powerlaw::scan_xmin(samples); });
#endif
        const double tp = time_it([&] { fb = powerlaw::scan_xmin(samples); });
        row("x_min scan", ts, tp,
            std::max(std::fabs(fa.alpha - fb.alpha), std::fabs(fa.x_min - fb.x_min)));
    }
    return 0;
}
