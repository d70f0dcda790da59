// Timing comparison of the OpenMP kernels against their serial reference
// implementations. Prints wall time and speedup per kernel; correctness of
// the bit-identical outputs is asserted as a side effect.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "martdiag/diagnostics.hpp"
#include "martdiag/stochastic_sim.hpp"
#include "martdiag/threshold_martingale.hpp"
#include "martdiag/winprob.hpp"

using namespace martdiag;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %10.4f s %10.4f s %8.2fx\n", name, serial, parallel,
                serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; comparing identical serial code paths\n");
#endif
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

    // Ensemble sampling.
    EnsembleConfig cfg;
    cfg.n_series = 20000;
    cfg.horizon = 60;
    cfg.master_seed = 1;
    auto t0 = clock_type::now();
    Ensemble es = sample_ensemble_serial(cfg);
    auto t1 = clock_type::now();
    Ensemble ep = sample_ensemble(cfg);
    auto t2 = clock_type::now();
    row("sample_ensemble", seconds(t0, t1), seconds(t1, t2));
    for (int j = 0; j < cfg.n_series; ++j)
        if (es.series[j].values != ep.series[j].values) {
            std::fprintf(stderr, "mismatch in ensemble member %d\n", j);
            return 1;
        }

    // Threshold probability paths.
    t0 = clock_type::now();
    auto ps = threshold_paths_serial(ep);
    t1 = clock_type::now();
    auto pp = threshold_paths(ep);
    t2 = clock_type::now();
    row("threshold_paths", seconds(t0, t1), seconds(t1, t2));
    for (std::size_t j = 0; j < ps.size(); ++j)
        if (ps[j].probs != pp[j].probs) {
            std::fprintf(stderr, "mismatch in probability path %zu\n", j);
            return 1;
        }

    // Prequential batch contrast.
    std::vector<std::vector<double>> diffs(2000);
    for (int j = 0; j < 2000; ++j) diffs[j] = differences(pp[j]);
    t0 = clock_type::now();
    auto rs = ols_vs_prequential_contrast_serial(diffs, 4);
    t1 = clock_type::now();
    auto rp = ols_vs_prequential_contrast(diffs, 4);
    t2 = clock_type::now();
    row("prequential_contrast", seconds(t0, t1), seconds(t1, t2));
    if (rs.fraction_negative != rp.fraction_negative) {
        std::fprintf(stderr, "prequential mismatch\n");
        return 1;
    }

    // Game simulation + model prediction.
    t0 = clock_type::now();
    auto gs = simulate_games_serial(4000, 0.02, 1.6, 192, 1.0, 3, "b");
    t1 = clock_type::now();
    auto gp = simulate_games(4000, 0.02, 1.6, 192, 1.0, 3, "b");
    t2 = clock_type::now();
    row("simulate_games", seconds(t0, t1), seconds(t1, t2));
    for (std::size_t j = 0; j < gs.size(); ++j)
        if (gs[j].score_diff != gp[j].score_diff) {
            std::fprintf(stderr, "mismatch in game %zu\n", j);
            return 1;
        }

    ModelWeighted w = fit_weighted(std::vector<GamePath>(gp.begin(), gp.begin() + 500), 5);
    t0 = clock_type::now();
    std::vector<ProbPath> pred_serial(gp.size());
    for (std::size_t j = 0; j < gp.size(); ++j) pred_serial[j] = predict(w, gp[j]);
    t1 = clock_type::now();
    auto pred_parallel = predict_games(w, gp);
    t2 = clock_type::now();
    row("predict_games", seconds(t0, t1), seconds(t1, t2));
    for (std::size_t j = 0; j < gp.size(); ++j)
        if (pred_serial[j].probs != pred_parallel[j].probs) {
            std::fprintf(stderr, "mismatch in prediction %zu\n", j);
            return 1;
        }

    std::printf("all kernel outputs bit-identical\n");
    return 0;
}
