#include "martdiag/stochastic_sim.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "martdiag/errors.hpp"
#include "martdiag/normal.hpp"

namespace martdiag {

void ArSpec::validate() const {
    if (!(std::fabs(rho) < 1.0))
        throw std::domain_error("ArSpec: |rho| < 1 required for stationarity");
    if (!(sigma_eps > 0.0))
        throw std::domain_error("ArSpec: sigma_eps must be positive");
    if (horizon < 1)
        throw std::domain_error("ArSpec: horizon must be >= 1");
}

void EnsembleConfig::validate() const {
    if (n_series < 1)
        throw std::domain_error("EnsembleConfig: n_series must be >= 1");
    if (!(beta_a > 0.0) || !(beta_b > 0.0))
        throw std::domain_error("EnsembleConfig: beta shapes must be positive");
    if (!(target_pi > 0.0 && target_pi < 1.0))
        throw std::domain_error("EnsembleConfig: target_pi must lie in (0,1)");
    if (horizon < 1)
        throw std::domain_error("EnsembleConfig: horizon must be >= 1");
    if (!(sigma_eps > 0.0))
        throw std::domain_error("EnsembleConfig: sigma_eps must be positive");
}

double stationary_sd(double rho, double sigma_eps) {
    if (!(std::fabs(rho) < 1.0))
        throw std::domain_error("stationary_sd: |rho| < 1 required");
    if (!(sigma_eps > 0.0))
        throw std::domain_error("stationary_sd: sigma_eps must be positive");
    return sigma_eps / std::sqrt(1.0 - rho * rho);
}

SeriesPath simulate_ar1(const ArSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    std::normal_distribution<double> stdnorm(0.0, 1.0);

    SeriesPath path;
    path.spec = spec;
    path.seed = seed;
    path.values.resize(spec.horizon);

    // y_1 from the exact stationary law removes burn-in bias.
    path.values[0] = stationary_sd(spec.rho, spec.sigma_eps) * stdnorm(rng);
    for (int t = 1; t < spec.horizon; ++t)
        path.values[t] = spec.rho * path.values[t - 1] + spec.sigma_eps * stdnorm(rng);
    return path;
}

double conditional_forecast(const SeriesPath& path, int t) {
    const int T = path.spec.horizon;
    if (t < 1 || t > T)
        throw std::out_of_range("conditional_forecast: t outside 1..T");
    return std::pow(path.spec.rho, T - t) * path.values[t - 1];
}

double threshold_for_quantile(double rho, double sigma_eps, double pi) {
    if (!(pi > 0.0 && pi < 1.0))
        throw std::domain_error("threshold_for_quantile: pi must lie in (0,1)");
    return norm_quantile(pi) * stationary_sd(rho, sigma_eps);
}

double forecast_step_variance(const ArSpec& spec, int s) {
    spec.validate();
    if (s < 1 || s > spec.horizon)
        throw std::out_of_range("forecast_step_variance: s outside 1..T");
    // Per-step update variance under the infinite-past representation; the
    // mass not covered by steps 1..T is the remainder rho^(2T) * Var(Y_T).
    return spec.sigma_eps * spec.sigma_eps * std::pow(spec.rho, 2 * (spec.horizon - s));
}

namespace {

void fill_ensemble_member(const EnsembleConfig& cfg, int j, Ensemble& out) {
    const std::uint64_t seed = split_seed(cfg.master_seed, static_cast<std::uint64_t>(j));
    Rng rng(seed);
    std::gamma_distribution<double> ga(cfg.beta_a, 1.0), gb(cfg.beta_b, 1.0);
    double x = ga(rng), y = gb(rng);
    double rho = x / (x + y);
    if (rho >= 1.0) rho = 1.0 - 1e-12;  // guard against degenerate draws
    if (rho <= -1.0) rho = -1.0 + 1e-12;

    ArSpec spec{rho, cfg.sigma_eps, cfg.horizon};
    SeriesPath path;
    path.spec = spec;
    path.seed = seed;
    path.values.resize(cfg.horizon);
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    path.values[0] = stationary_sd(rho, cfg.sigma_eps) * stdnorm(rng);
    for (int t = 1; t < cfg.horizon; ++t)
        path.values[t] = rho * path.values[t - 1] + cfg.sigma_eps * stdnorm(rng);

    out.series[j] = std::move(path);
    out.rho[j] = rho;
    out.tau[j] = threshold_for_quantile(rho, cfg.sigma_eps, cfg.target_pi);
}

Ensemble make_ensemble_shell(const EnsembleConfig& cfg) {
    cfg.validate();
    Ensemble e;
    e.series.resize(cfg.n_series);
    e.rho.resize(cfg.n_series);
    e.tau.resize(cfg.n_series);
    e.target_pi = cfg.target_pi;
    return e;
}

}  // namespace

Ensemble sample_ensemble(const EnsembleConfig& cfg) {
    Ensemble e = make_ensemble_shell(cfg);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < cfg.n_series; ++j) fill_ensemble_member(cfg, j, e);
    return e;
}

Ensemble sample_ensemble_serial(const EnsembleConfig& cfg) {
    Ensemble e = make_ensemble_shell(cfg);
    for (int j = 0; j < cfg.n_series; ++j) fill_ensemble_member(cfg, j, e);
    return e;
}

namespace {

// Grid in minutes at 15 s spacing; the final mark sits one second before the
// horn (47:59 on the standard 192-step grid).
std::vector<double> game_time_grid(int n_steps) {
    std::vector<double> t(n_steps + 1);
    for (int i = 0; i <= n_steps; ++i) t[i] = 0.25 * i;
    t[n_steps] = (n_steps * 15.0 - 1.0) / 60.0;
    return t;
}

}  // namespace

GamePath simulate_game(double drift, double step_sd, int n_steps,
                       double home_advantage_prob, std::uint64_t seed,
                       double momentum) {
    if (n_steps < 1)
        throw std::domain_error("simulate_game: n_steps must be >= 1");
    if (!(step_sd > 0.0))
        throw std::domain_error("simulate_game: step_sd must be positive");
    if (!(home_advantage_prob >= 0.0 && home_advantage_prob <= 1.0))
        throw std::domain_error("simulate_game: home_advantage_prob must lie in [0,1]");
    if (!(std::fabs(momentum) < 1.0))
        throw std::domain_error("simulate_game: |momentum| < 1 required");

    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> stdnorm(0.0, 1.0);

    const double mu = (unif(rng) < home_advantage_prob) ? drift : -drift;

    GamePath g;
    g.times_min = game_time_grid(n_steps);
    g.score_diff.resize(n_steps + 1);
    g.score_diff[0] = 0;
    long long x = 0;
    double dev = 0.0;  // AR(1) deviation of the latent increment from mu
    for (int i = 1; i <= n_steps; ++i) {
        dev = momentum * dev + step_sd * stdnorm(rng);
        x += std::llround(mu + dev);
        g.score_diff[i] = static_cast<int>(x);
    }
    // Ties broken by extra steps that affect only the label.
    long long final_x = x;
    while (final_x == 0) {
        dev = momentum * dev + step_sd * stdnorm(rng);
        final_x += std::llround(mu + dev);
    }
    g.home_win = final_x > 0 ? 1 : 0;
    return g;
}

namespace {

std::vector<GamePath> simulate_games_impl(bool parallel, int n_games, double drift,
                                          double step_sd, int n_steps,
                                          double home_advantage_prob,
                                          std::uint64_t master_seed,
                                          const std::string& season,
                                          int first_game_number, double momentum) {
    if (n_games < 1)
        throw std::domain_error("simulate_games: n_games must be >= 1");
    std::vector<GamePath> games(n_games);
#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j < n_games; ++j) {
        GamePath g = simulate_game(drift, step_sd, n_steps, home_advantage_prob,
                                   split_seed(master_seed, static_cast<std::uint64_t>(j)),
                                   momentum);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "G%06d", first_game_number + j);
        g.game_id = buf;
        g.season = season;
        games[j] = std::move(g);
    }
    return games;
}

}  // namespace

std::vector<GamePath> simulate_games(int n_games, double drift, double step_sd,
                                     int n_steps, double home_advantage_prob,
                                     std::uint64_t master_seed, const std::string& season,
                                     int first_game_number, double momentum) {
    return simulate_games_impl(true, n_games, drift, step_sd, n_steps,
                               home_advantage_prob, master_seed, season,
                               first_game_number, momentum);
}

std::vector<GamePath> simulate_games_serial(int n_games, double drift, double step_sd,
                                            int n_steps, double home_advantage_prob,
                                            std::uint64_t master_seed,
                                            const std::string& season,
                                            int first_game_number, double momentum) {
    return simulate_games_impl(false, n_games, drift, step_sd, n_steps,
                               home_advantage_prob, master_seed, season,
                               first_game_number, momentum);
}

double calibrate_drift(double step_sd, int n_steps, double home_advantage_prob,
                       double target_rate, int n_games, std::uint64_t master_seed,
                       double momentum) {
    if (!(target_rate > 0.0 && target_rate < 1.0))
        throw std::domain_error("calibrate_drift: target_rate must lie in (0,1)");
    auto rate_at = [&](double drift) {
        auto games = simulate_games(n_games, drift, step_sd, n_steps,
                                    home_advantage_prob, master_seed, "cal", 1, momentum);
        long wins = 0;
        for (const auto& g : games) wins += g.home_win;
        return static_cast<double>(wins) / n_games;
    };
    // Common random numbers per game make the realized rate monotone in the
    // drift, so plain bisection applies.
    double lo = 0.0, hi = step_sd;
    while (rate_at(hi) < target_rate) hi *= 2.0;
    for (int it = 0; it < 60 && hi - lo > 1e-12 * step_sd; ++it) {
        double mid = 0.5 * (lo + hi);
        if (rate_at(mid) < target_rate)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace martdiag
