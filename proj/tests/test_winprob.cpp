#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "martdiag/errors.hpp"
#include "martdiag/rng.hpp"
#include "martdiag/stochastic_sim.hpp"
#include "martdiag/winprob.hpp"

using namespace martdiag;

namespace {

// A small synthetic corpus shared by several cases.
std::vector<GamePath> small_corpus(int n, std::uint64_t seed, int steps = 48) {
    return simulate_games(n, 0.02, 1.6, steps, 1.0, seed, "t");
}

}  // namespace

TEST_CASE("logistic_fit: symmetric data has zero intercept") {
    // Each (x, y) pair has a mirror (-x, 1-y), so the likelihood is invariant
    // under flipping the intercept's sign and the maximiser has intercept 0.
    // The overlapping labels at x = +-1 keep the problem non-separable.
    Eigen::MatrixXd X(6, 2);
    Eigen::VectorXd y(6);
    double xs[] = {-1, 1, -2, 2, 1, -1};
    double ys[] = {0, 1, 0, 1, 0, 1};
    for (int i = 0; i < 6; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = xs[i];
        y(i) = ys[i];
    }
    LogisticFit fit = logistic_fit(X, y);
    CHECK(std::fabs(fit.coef(0)) < 1e-8);
    CHECK(fit.coef(1) > 0.0);
}

TEST_CASE("logistic_fit: log-likelihood never decreases across iterations") {
    Rng rng(17);
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = 5000;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = 4.0 * stdnorm(rng);
        double p = logistic(0.3 + 0.15 * X(i, 1));
        y(i) = unif(rng) < p ? 1.0 : 0.0;
    }
    LogisticFit fit = logistic_fit(X, y);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
        CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-9);
    CHECK(!fit.caveat.empty());
}

TEST_CASE("logistic_fit recovers known coefficients at n = 200,000") {
    Rng rng(90);
    std::normal_distribution<double> scorelike(0.0, 8.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = 200000;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = scorelike(rng);
        y(i) = unif(rng) < logistic(0.3 + 0.15 * X(i, 1)) ? 1.0 : 0.0;
    }
    LogisticFit fit = logistic_fit(X, y);
    CHECK(std::fabs(fit.coef(0) - 0.3) < 3.0 * fit.se(0));
    CHECK(std::fabs(fit.coef(1) - 0.15) < 3.0 * fit.se(1));
}

TEST_CASE("logistic_fit rejects separable and degenerate designs") {
    // Perfect separation trips the divergence guard; the narrow margin makes
    // the maximum-likelihood slope run away quickly.
    Eigen::MatrixXd X(6, 2);
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = 0.5 * (i - 2.5);
        y(i) = i < 3 ? 0.0 : 1.0;
    }
    CHECK_THROWS_AS(logistic_fit(X, y), DivergenceError);

    // Constant second column duplicates the intercept.
    Eigen::MatrixXd Xc = Eigen::MatrixXd::Ones(6, 2);
    Eigen::VectorXd yc(6);
    yc << 0, 1, 0, 1, 1, 1;
    CHECK_THROWS_AS(logistic_fit(Xc, yc), SingularDesignError);

    Eigen::VectorXd bad(6);
    bad << 0, 1, 2, 0, 1, 0;
    CHECK_THROWS_AS(logistic_fit(X, bad), std::domain_error);
}

TEST_CASE("fit_simple: all-zero score differences are a singular design") {
    auto games = small_corpus(20, 3, 24);
    for (auto& g : games) for (auto& x : g.score_diff) x = 0;
    CHECK_THROWS_AS(fit_simple(games), SingularDesignError);
}

TEST_CASE("fit_simple intercept matches the empirical home-win rate") {
    auto games = simulate_games(2000, calibrate_drift(1.6, 48, 1.0, 0.585, 2000, 42),
                                1.6, 48, 1.0, 42, "t");
    long wins = 0;
    for (const auto& g : games) wins += g.home_win;
    double rate = static_cast<double>(wins) / games.size();
    ModelSimple m = fit_simple(games);
    CHECK(std::fabs(logistic(m.alpha0) - rate) < 0.02);
    CHECK(m.alpha1 > 0.0);
    CHECK(!m.caveat.empty());
}

TEST_CASE("degree 0 weighted model reduces exactly to the simple model") {
    auto games = small_corpus(150, 5);
    ModelSimple s = fit_simple(games);
    ModelWeighted w = fit_weighted(games, 0);
    for (const auto& g : games) {
        ProbPath ps = predict(s, g);
        ProbPath pw = predict(w, g);
        REQUIRE(ps.probs.size() == pw.probs.size());
        for (std::size_t i = 0; i < ps.probs.size(); ++i)
            CHECK(std::fabs(ps.probs[i] - pw.probs[i]) < 1e-10);
    }
}

TEST_CASE("predict equals the baseline/weight-curve composition") {
    auto games = small_corpus(150, 6);
    ModelWeighted w = fit_weighted(games, 4);
    const GamePath& g = games[0];
    ProbPath p = predict(w, g);
    for (std::size_t i = 0; i < g.score_diff.size(); ++i) {
        double t = g.times_min[i];
        double expect = logistic(w.baseline(t) + weight_curve(w, t) * g.score_diff[i]);
        CHECK(std::fabs(p.probs[i + 1] - expect) < 1e-12);
    }
    // Path carries 0.5 prefix and the 0/1 terminal.
    CHECK(p.probs.front() == 0.5);
    CHECK(p.probs.back() == static_cast<double>(g.home_win));
}

TEST_CASE("simple-model path is constant when the score never moves") {
    auto games = small_corpus(150, 7);
    ModelSimple s = fit_simple(games);
    GamePath flat = games[0];
    for (auto& x : flat.score_diff) x = 0;
    ProbPath p = predict(s, flat);
    for (std::size_t i = 1; i + 1 < p.probs.size(); ++i)
        CHECK(p.probs[i] == doctest::Approx(logistic(s.alpha0)).epsilon(1e-14));
}

TEST_CASE("monotone blowout under the weighted model") {
    auto games = small_corpus(400, 8);
    ModelWeighted w = fit_weighted(games, 5);
    GamePath blowout = games[0];
    for (std::size_t i = 0; i < blowout.score_diff.size(); ++i)
        blowout.score_diff[i] = static_cast<int>(i);
    blowout.home_win = 1;
    ProbPath p = predict(w, blowout);
    // Once the fitted weight curve is positive, a growing lead can only push
    // the probability up... provided the baseline drift does not fight it;
    // check the tail half of the game where the lead dominates.
    std::size_t half = blowout.score_diff.size() / 2;
    for (std::size_t i = half + 1; i < blowout.score_diff.size(); ++i) {
        CHECK(weight_curve(w, blowout.times_min[i]) > 0.0);
        CHECK(p.probs[i + 1] >= p.probs[i] - 1e-6);
    }
    CHECK(p.probs.back() == 1.0);
}

TEST_CASE("degree-1 weight curve is affine in time") {
    auto games = small_corpus(150, 9);
    ModelWeighted w = fit_weighted(games, 1);
    double t0 = 0.0, t1 = 40.0;
    double w0 = weight_curve(w, t0), w1 = weight_curve(w, t1);
    double slope = (w1 - w0) / (t1 - t0);
    for (double t : {5.0, 17.5, 33.0})
        CHECK(std::fabs(weight_curve(w, t) - (w0 + slope * t)) < 1e-12);
}

TEST_CASE("predict_games matches per-game predict") {
    auto games = small_corpus(64, 10);
    ModelWeighted w = fit_weighted(games, 3);
    auto paths = predict_games(w, games);
    REQUIRE(paths.size() == games.size());
    for (std::size_t j = 0; j < games.size(); ++j) {
        ProbPath one = predict(w, games[j]);
        for (std::size_t i = 0; i < one.probs.size(); ++i)
            CHECK(paths[j].probs[i] == one.probs[i]);
    }
}

TEST_CASE("evaluation of oracle and constant predictors") {
    auto games = small_corpus(50, 12, 24);

    // Clairvoyant predictor: p = Y from the first in-game cell.
    std::vector<ProbPath> oracle(games.size()), constant(games.size());
    for (std::size_t j = 0; j < games.size(); ++j) {
        double yv = games[j].home_win;
        oracle[j].probs.assign(games[j].score_diff.size() + 2, yv);
        oracle[j].probs.front() = 0.5;
        constant[j].probs.assign(games[j].score_diff.size() + 2, 0.5);
        constant[j].probs.back() = yv;
    }
    ModelEvalSummary eo = evaluate_prediction_paths("oracle", oracle, games);
    CHECK(eo.avg_mse == doctest::Approx(0.0));
    CHECK(eo.avg_volatility == doctest::Approx(0.25).epsilon(1e-15));

    ModelEvalSummary ec = evaluate_prediction_paths("coin", constant, games);
    CHECK(ec.avg_mse == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(ec.avg_volatility == doctest::Approx(0.25).epsilon(1e-15));

    PairedZ z = paired_mse_z(ec, eo);
    CHECK(z.mean_diff == doctest::Approx(0.25).epsilon(1e-12));
}
