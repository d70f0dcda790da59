#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "martdiag/rng.hpp"

namespace martdiag {

// Parameters of a stationary first-order autoregression.
struct ArSpec {
    double rho = 0.0;        // autoregressive coefficient, |rho| < 1
    double sigma_eps = 1.0;  // innovation standard deviation, > 0
    int horizon = 1;         // number of time steps T >= 1

    void validate() const;
};

// One simulated realization y_1..y_T together with the spec and seed that
// produced it. Regeneration with the same seed reproduces the values
// bit-exactly.
struct SeriesPath {
    std::vector<double> values;
    ArSpec spec;
    std::uint64_t seed = 0;
};

struct EnsembleConfig {
    int n_series = 1;
    double beta_a = 8.0;  // shape parameters of the coefficient distribution
    double beta_b = 2.0;
    double target_pi = 0.75;  // common threshold probability, in (0,1)
    int horizon = 40;
    double sigma_eps = 1.0;
    std::uint64_t master_seed = 0;

    void validate() const;
};

// Heterogeneous collection of AR(1) series with per-series thresholds chosen
// so that P(Y_T <= tau_j) = target_pi for every series.
struct Ensemble {
    std::vector<SeriesPath> series;
    std::vector<double> rho;
    std::vector<double> tau;
    double target_pi = 0.0;

    int size() const { return static_cast<int>(series.size()); }
};

// One synthetic game: integer random-walk score differences on a fixed time
// grid plus the 0/1 home-win label.
struct GamePath {
    std::string game_id;
    std::string season;
    std::vector<double> times_min;   // t_i in minutes
    std::vector<int> score_diff;     // X_i = home - away, X_0 = 0
    int home_win = 0;                // 0/1
};

// ---- operations ---------------------------------------------------------

// Draws y_1 from the stationary law N(0, sigma^2/(1-rho^2)) and iterates
// y_t = rho*y_{t-1} + eps_t. Deterministic given the seed.
SeriesPath simulate_ar1(const ArSpec& spec, std::uint64_t seed);

// sigma_eps / sqrt(1 - rho^2)
double stationary_sd(double rho, double sigma_eps);

// Optimal point forecast of Y_T at time t: rho^(T-t) * y_t. 1-based t.
double conditional_forecast(const SeriesPath& path, int t);

// tau with P(Y_T <= tau) = pi under the stationary law.
double threshold_for_quantile(double rho, double sigma_eps, double pi);

// Draws rho_j ~ Beta(beta_a, beta_b), simulates each series and sets the
// per-series threshold for the common target_pi. Per-series seeds come from
// split_seed(master_seed, j), so the parallel and serial versions produce
// bit-identical ensembles.
Ensemble sample_ensemble(const EnsembleConfig& config);
Ensemble sample_ensemble_serial(const EnsembleConfig& config);  // reference

// Closed-form variance contribution of the step s forecast update,
// E(Yhat_{T|s} - Yhat_{T|s-1})^2 = sigma^2 * rho^(2(T-s)).
double forecast_step_variance(const ArSpec& spec, int s);

// Synthetic game generator. Latent score increments follow an AR(1) around
// the drift, l_i = mu + momentum*(l_{i-1} - mu) + step_sd*z_i, and the score
// moves by round(l_i); negative momentum produces the catch-up dynamics that
// make score-only prediction models over-volatile. With probability
// home_advantage_prob the drift favors the home side, otherwise the away
// side. A tied final score is resolved by extra steps that only affect the
// label.
GamePath simulate_game(double drift, double step_sd, int n_steps,
                       double home_advantage_prob, std::uint64_t seed,
                       double momentum = 0.0);

// Corpus generator: games seeded by split_seed(master_seed, j).
std::vector<GamePath> simulate_games(int n_games, double drift, double step_sd,
                                     int n_steps, double home_advantage_prob,
                                     std::uint64_t master_seed,
                                     const std::string& season,
                                     int first_game_number = 1,
                                     double momentum = 0.0);
std::vector<GamePath> simulate_games_serial(int n_games, double drift, double step_sd,
                                            int n_steps, double home_advantage_prob,
                                            std::uint64_t master_seed,
                                            const std::string& season,
                                            int first_game_number = 1,
                                            double momentum = 0.0);

// Bisects the drift so that the realized home-win rate of the corpus hits
// the target (common random numbers make the rate monotone in the drift).
double calibrate_drift(double step_sd, int n_steps, double home_advantage_prob,
                       double target_rate, int n_games, std::uint64_t master_seed,
                       double momentum = 0.0);

}  // namespace martdiag
