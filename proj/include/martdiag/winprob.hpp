#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "martdiag/poly_basis.hpp"
#include "martdiag/stochastic_sim.hpp"
#include "martdiag/threshold_martingale.hpp"

namespace martdiag {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LogisticFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;  // classical; too small under within-game dependence
    std::string caveat;
    int iterations = 0;
    double loglik = 0.0;
    std::vector<double> loglik_trace;  // one entry per IRLS iteration
};

// Maximum likelihood by IRLS with step halving; converges when
// max |delta coef| < 1e-10 or after 100 iterations. The divergence guard
// trips at |coef| > 50 (separation).
LogisticFit logistic_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels);

// Constant-slope pooled logistic model: p = g(alpha0 + alpha1 * score_diff).
struct ModelSimple {
    double alpha0 = 0.0, alpha1 = 0.0;
    double se0 = 0.0, se1 = 0.0;
    long n_obs = 0;
    std::string caveat;
};

// Polynomial-time-weighted logistic model:
// p = g(baseline(t) + w(t) * score_diff), with w and the baseline expressed
// in an orthonormal time basis fitted over the training grid.
struct ModelWeighted {
    int degree = 0;
    bool include_baseline = true;
    OrthoPolyBasis basis;                // empty when degree == 0
    double beta0 = 0.0;                  // intercept
    std::vector<double> beta;            // baseline coefficients, basis 1..degree
    double gamma0 = 0.0;                 // constant part of the weight curve
    std::vector<double> gamma;           // weight coefficients, basis 1..degree
    long n_obs = 0;

    double baseline(double t_min) const;
    double weight(double t_min) const;
};

ModelSimple fit_simple(const std::vector<GamePath>& training);
ModelWeighted fit_weighted(const std::vector<GamePath>& training, int degree,
                           bool include_baseline = true);

// Weight curve w(t) of the fitted model at game time t (minutes).
double weight_curve(const ModelWeighted& model, double t_min);

// Predicted path with the p_{-1} = 0.5 prefix prepended and the 0/1 outcome
// appended, so length is (grid points) + 2.
ProbPath predict(const ModelSimple& model, const GamePath& game);
ProbPath predict(const ModelWeighted& model, const GamePath& game);

std::vector<ProbPath> predict_games(const ModelSimple& model,
                                    const std::vector<GamePath>& games);
std::vector<ProbPath> predict_games(const ModelWeighted& model,
                                    const std::vector<GamePath>& games);

// Per-game squared-error and volatility summaries.
struct GameEval {
    std::string game_id;
    double mse = 0.0;         // mean over the in-game grid cells
    double volatility = 0.0;  // S including the 0.5 prefix and terminal jump
};

struct ModelEvalSummary {
    std::string name;
    double avg_mse = 0.0;
    double avg_volatility = 0.0;
    std::vector<GameEval> per_game;
};

// paths[j] must carry the 0.5 prefix and terminal outcome for games[j].
ModelEvalSummary evaluate_prediction_paths(const std::string& name,
                                           const std::vector<ProbPath>& paths,
                                           const std::vector<GamePath>& games);

struct PairedZ {
    double mean_diff = 0.0;  // mean over games of (a - b)
    double se = 0.0;
    double z = 0.0;
};

PairedZ paired_mse_z(const ModelEvalSummary& a, const ModelEvalSummary& b);
PairedZ paired_volatility_z(const ModelEvalSummary& a, const ModelEvalSummary& b);

}  // namespace martdiag
