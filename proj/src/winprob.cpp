#include "martdiag/winprob.hpp"

#include <cmath>
#include <stdexcept>

#include "martdiag/errors.hpp"

namespace martdiag {

namespace {

const char* kPooledCaveat =
    "pooled/dependent: classical standard errors treat every in-game cell as "
    "independent and are too small";

double clamp_prob(double p) {
    return std::min(1.0 - 1e-15, std::max(1e-15, p));
}

double bernoulli_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        double p = clamp_prob(logistic(eta(i)));
        ll += y(i) * std::log(p) + (1.0 - y(i)) * std::log(1.0 - p);
    }
    return ll;
}

void check_grids(const std::vector<GamePath>& games) {
    if (games.empty()) throw std::domain_error("winprob: need at least one game");
    const std::size_t len = games.front().times_min.size();
    for (const auto& g : games) {
        if (g.times_min.size() != g.score_diff.size() || g.times_min.size() != len)
            throw DataError("winprob: grid-length mismatch in game " + g.game_id);
        if (g.home_win != 0 && g.home_win != 1)
            throw DataError("winprob: missing 0/1 label in game " + g.game_id);
    }
}

}  // namespace

LogisticFit logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw std::domain_error("logistic_fit: label length mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
        if (y(i) != 0.0 && y(i) != 1.0)
            throw std::domain_error("logistic_fit: labels must be 0/1");
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        qr.setThreshold(1e-10);
        if (qr.rank() < p) {
            int col = static_cast<int>(qr.colsPermutation().indices()(qr.rank()));
            throw SingularDesignError(col, "logistic_fit: design is rank deficient at column " +
                                               std::to_string(col));
        }
    }

    LogisticFit fit;
    fit.coef = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    double ll = bernoulli_loglik(eta, y);
    fit.loglik_trace.push_back(ll);

    Eigen::MatrixXd info(p, p);
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd prob(n), w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            prob(i) = logistic(eta(i));
            w(i) = std::max(prob(i) * (1.0 - prob(i)), 1e-10);
        }
        info = X.transpose() * w.asDiagonal() * X;
        Eigen::VectorXd score = X.transpose() * (y - prob);
        Eigen::VectorXd step = info.ldlt().solve(score);

        // Step halving keeps the log-likelihood nondecreasing.
        double scale = 1.0;
        Eigen::VectorXd cand;
        double ll_new;
        for (int h = 0; h < 30; ++h) {
            cand = fit.coef + scale * step;
            ll_new = bernoulli_loglik(X * cand, y);
            if (ll_new >= ll - 1e-12) break;
            scale *= 0.5;
        }
        double delta = (cand - fit.coef).cwiseAbs().maxCoeff();
        fit.coef = cand;
        eta = X * fit.coef;
        ll = ll_new;
        fit.loglik_trace.push_back(ll);
        fit.iterations = it + 1;
        if (fit.coef.cwiseAbs().maxCoeff() > 50.0)
            throw DivergenceError("logistic_fit: coefficient guard tripped (separation?)");
        if (delta < 1e-10) break;
    }
    fit.loglik = ll;
    fit.se = info.ldlt()
                 .solve(Eigen::MatrixXd::Identity(p, p))
                 .diagonal()
                 .cwiseSqrt();
    fit.caveat = kPooledCaveat;
    return fit;
}

ModelSimple fit_simple(const std::vector<GamePath>& training) {
    check_grids(training);
    long rows = 0;
    for (const auto& g : training) rows += static_cast<long>(g.score_diff.size());
    Eigen::MatrixXd X(rows, 2);
    Eigen::VectorXd y(rows);
    long r = 0;
    for (const auto& g : training)
        for (int x : g.score_diff) {
            X(r, 0) = 1.0;
            X(r, 1) = x;
            y(r) = g.home_win;
            ++r;
        }
    LogisticFit fit = logistic_fit(X, y);
    ModelSimple m;
    m.alpha0 = fit.coef(0);
    m.alpha1 = fit.coef(1);
    m.se0 = fit.se(0);
    m.se1 = fit.se(1);
    m.n_obs = rows;
    m.caveat = fit.caveat;
    return m;
}

ModelWeighted fit_weighted(const std::vector<GamePath>& training, int degree,
                           bool include_baseline) {
    if (degree < 0) throw std::domain_error("fit_weighted: degree must be >= 0");
    check_grids(training);

    ModelWeighted m;
    m.degree = degree;
    m.include_baseline = include_baseline;

    if (degree == 0) {
        ModelSimple s = fit_simple(training);
        m.beta0 = s.alpha0;
        m.gamma0 = s.alpha1;
        m.n_obs = s.n_obs;
        return m;
    }

    try {
        m.basis = OrthoPolyBasis::fit(training.front().times_min, degree);
    } catch (const SingularDesignError&) {
        throw SingularDesignError(degree,
            "fit_weighted: time grid too short for degree " + std::to_string(degree));
    }

    const int nb = include_baseline ? degree : 0;
    const int cols = 1 + nb + 1 + degree;
    long rows = 0;
    for (const auto& g : training) rows += static_cast<long>(g.score_diff.size());
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    std::vector<double> phi;
    long r = 0;
    for (const auto& g : training)
        for (std::size_t i = 0; i < g.score_diff.size(); ++i) {
            m.basis.evaluate(g.times_min[i], phi);
            int c = 0;
            X(r, c++) = 1.0;
            for (int d = 0; d < nb; ++d) X(r, c++) = phi[d];
            X(r, c++) = g.score_diff[i];
            for (int d = 0; d < degree; ++d) X(r, c++) = g.score_diff[i] * phi[d];
            y(r) = g.home_win;
            ++r;
        }

    LogisticFit fit;
    try {
        fit = logistic_fit(X, y);
    } catch (const SingularDesignError& e) {
        throw SingularDesignError(e.column,
            "fit_weighted: rank-deficient interaction design at degree " +
            std::to_string(degree));
    }
    int c = 0;
    m.beta0 = fit.coef(c++);
    m.beta.resize(nb);
    for (int d = 0; d < nb; ++d) m.beta[d] = fit.coef(c++);
    m.gamma0 = fit.coef(c++);
    m.gamma.resize(degree);
    for (int d = 0; d < degree; ++d) m.gamma[d] = fit.coef(c++);
    m.n_obs = rows;
    return m;
}

double ModelWeighted::baseline(double t_min) const {
    double v = beta0;
    if (degree > 0 && !beta.empty()) {
        std::vector<double> phi;
        basis.evaluate(t_min, phi);
        for (std::size_t d = 0; d < beta.size(); ++d) v += beta[d] * phi[d];
    }
    return v;
}

double ModelWeighted::weight(double t_min) const {
    double v = gamma0;
    if (degree > 0) {
        std::vector<double> phi;
        basis.evaluate(t_min, phi);
        for (int d = 0; d < degree; ++d) v += gamma[d] * phi[d];
    }
    return v;
}

double weight_curve(const ModelWeighted& model, double t_min) {
    return model.weight(t_min);
}

namespace {

ProbPath wrap_path(std::vector<double> in_game, int outcome) {
    ProbPath p;
    p.pi = 0.5;
    p.probs.reserve(in_game.size() + 2);
    p.probs.push_back(0.5);  // pre-game prior
    for (double v : in_game) p.probs.push_back(v);
    p.probs.push_back(static_cast<double>(outcome));
    return p;
}

}  // namespace

ProbPath predict(const ModelSimple& model, const GamePath& game) {
    std::vector<double> probs(game.score_diff.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        probs[i] = logistic(model.alpha0 + model.alpha1 * game.score_diff[i]);
    return wrap_path(std::move(probs), game.home_win);
}

ProbPath predict(const ModelWeighted& model, const GamePath& game) {
    std::vector<double> probs(game.score_diff.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double t = game.times_min[i];
        probs[i] = logistic(model.baseline(t) + model.weight(t) * game.score_diff[i]);
    }
    return wrap_path(std::move(probs), game.home_win);
}

template <class Model>
static std::vector<ProbPath> predict_games_impl(const Model& model,
                                                const std::vector<GamePath>& games) {
    std::vector<ProbPath> out(games.size());
#pragma omp parallel for schedule(static)
    for (long j = 0; j < static_cast<long>(games.size()); ++j)
        out[j] = predict(model, games[j]);
    return out;
}

std::vector<ProbPath> predict_games(const ModelSimple& model,
                                    const std::vector<GamePath>& games) {
    return predict_games_impl(model, games);
}

std::vector<ProbPath> predict_games(const ModelWeighted& model,
                                    const std::vector<GamePath>& games) {
    return predict_games_impl(model, games);
}

ModelEvalSummary evaluate_prediction_paths(const std::string& name,
                                           const std::vector<ProbPath>& paths,
                                           const std::vector<GamePath>& games) {
    if (paths.size() != games.size())
        throw std::domain_error("evaluate: path/game count mismatch");
    ModelEvalSummary s;
    s.name = name;
    s.per_game.resize(games.size());
    for (std::size_t j = 0; j < games.size(); ++j) {
        const GamePath& g = games[j];
        const std::vector<double>& p = paths[j].probs;
        const std::size_t cells = g.score_diff.size();
        if (p.size() != cells + 2)
            throw DataError("evaluate: grid-length mismatch in game " + g.game_id);
        double y = g.home_win;
        double sse = 0.0, vol = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            double e = y - p[i + 1];
            sse += e * e;
        }
        for (std::size_t i = 1; i < p.size(); ++i) {
            double d = p[i] - p[i - 1];
            vol += d * d;
        }
        s.per_game[j] = {g.game_id, sse / cells, vol};
        s.avg_mse += sse / cells;
        s.avg_volatility += vol;
    }
    s.avg_mse /= games.size();
    s.avg_volatility /= games.size();
    return s;
}

namespace {

PairedZ paired_stat(const ModelEvalSummary& a, const ModelEvalSummary& b,
                    double GameEval::*field) {
    if (a.per_game.size() != b.per_game.size() || a.per_game.size() < 2)
        throw std::domain_error("paired comparison: mismatched or too few games");
    const std::size_t n = a.per_game.size();
    double sum = 0, sumsq = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a.per_game[j].*field - b.per_game[j].*field;
        sum += d;
        sumsq += d * d;
    }
    PairedZ z;
    z.mean_diff = sum / n;
    double var = (sumsq - sum * sum / n) / (n - 1);
    z.se = std::sqrt(var / n);
    z.z = z.se > 0 ? z.mean_diff / z.se : 0.0;
    return z;
}

}  // namespace

PairedZ paired_mse_z(const ModelEvalSummary& a, const ModelEvalSummary& b) {
    return paired_stat(a, b, &GameEval::mse);
}

PairedZ paired_volatility_z(const ModelEvalSummary& a, const ModelEvalSummary& b) {
    return paired_stat(a, b, &GameEval::volatility);
}

}  // namespace martdiag
