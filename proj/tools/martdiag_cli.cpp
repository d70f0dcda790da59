// Command-line surface for the forecast-evolution diagnostics toolkit.
//
// Subcommands: make-games, simulate, diagnose, fit, filter, evaluate.
// Exit codes: 0 success, 2 usage, 3 data/schema, 4 numerical.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "martdiag/diagnostics.hpp"
#include "martdiag/errors.hpp"
#include "martdiag/filter.hpp"
#include "martdiag/io.hpp"
#include "martdiag/normal.hpp"
#include "martdiag/stochastic_sim.hpp"
#include "martdiag/threshold_martingale.hpp"
#include "martdiag/winprob.hpp"

namespace fs = std::filesystem;
using namespace martdiag;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("MARTDIAG_OUT");
    return env ? env : ".";
}

std::string join(const std::string& dir, const std::string& file) {
    return (fs::path(dir) / file).string();
}

struct SimulateArgs {
    double rho = 0.8, sigma = 1.0, tau = 1.0;
    int horizon = 40;
    std::uint64_t seed = 0;
    bool ensemble = false;
    int n_series = 250;
    std::vector<double> beta{8.0, 2.0};
    double pi = 0.75;
    std::string out = default_out_dir();
};

int run_simulate(const SimulateArgs& a) {
    Provenance prov;
    prov.emplace_back("subcommand", "simulate");
    prov.emplace_back("seed", std::to_string(a.seed));
    prov.emplace_back("T", std::to_string(a.horizon));
    fs::create_directories(a.out);

    std::vector<ProbPath> paths;
    std::vector<SeriesPath> series;
    double pi;
    if (a.ensemble) {
        prov.emplace_back("mode", "ensemble");
        prov.emplace_back("n_series", std::to_string(a.n_series));
        prov.emplace_back("beta_a", fmt_double(a.beta[0]));
        prov.emplace_back("beta_b", fmt_double(a.beta[1]));
        prov.emplace_back("pi", fmt_double(a.pi));
        EnsembleConfig cfg;
        cfg.n_series = a.n_series;
        cfg.beta_a = a.beta[0];
        cfg.beta_b = a.beta[1];
        cfg.target_pi = a.pi;
        cfg.horizon = a.horizon;
        cfg.sigma_eps = a.sigma;
        cfg.master_seed = a.seed;
        Ensemble e = sample_ensemble(cfg);
        paths = threshold_paths(e);
        series = std::move(e.series);
        pi = a.pi;
    } else {
        prov.emplace_back("mode", "single");
        prov.emplace_back("rho", fmt_double(a.rho));
        prov.emplace_back("sigma", fmt_double(a.sigma));
        prov.emplace_back("tau", fmt_double(a.tau));
        ArSpec spec{a.rho, a.sigma, a.horizon};
        series.push_back(simulate_ar1(spec, a.seed));
        paths.push_back(threshold_path(series.front(), a.tau));
        pi = paths.front().pi;
    }
    write_series_csv(join(a.out, "series.csv"), series, prov);
    write_prob_csv(join(a.out, "probs.csv"), paths, prov);
    std::cout << "pi=" << fmt_double(pi)
              << " target_total_volatility=" << fmt_double(pi * (1.0 - pi)) << "\n";
    std::cout << "wrote " << join(a.out, "series.csv") << " and "
              << join(a.out, "probs.csv") << "\n";
    return 0;
}

struct DiagnoseArgs {
    std::string input;
    double pi = 0.75;
    int lag_t = 35, lag_s = 1;
    std::vector<int> lags{2, 3};
    int preq_lag = 4;
    int burn_in = -1;
    int scatter_s = 34, scatter_t = 35;
    std::string out = default_out_dir();
};

int run_diagnose(const DiagnoseArgs& a) {
    Provenance prov;
    prov.emplace_back("subcommand", "diagnose");
    prov.emplace_back("input", a.input);
    prov.emplace_back("pi", fmt_double(a.pi));
    prov.emplace_back("lag_t", std::to_string(a.lag_t));
    prov.emplace_back("lag_s", std::to_string(a.lag_s));
    prov.emplace_back("preq_lag", std::to_string(a.preq_lag));
    fs::create_directories(a.out);

    std::vector<ProbPath> paths = read_prob_csv(a.input);

    CalibrationReport cal = calibration_regression(paths, a.lag_t, a.lag_s, a.lags);
    write_calibration_json(join(a.out, "calibration.json"), cal, prov);

    VolatilityTestReport vol = total_volatility_test(paths, a.pi);
    write_volatility_json(join(a.out, "volatility_test.json"), vol, prov);

    std::vector<std::vector<double>> diffs(paths.size());
    for (std::size_t j = 0; j < paths.size(); ++j) diffs[j] = differences(paths[j]);
    PrequentialReport preq = ols_vs_prequential_contrast(diffs, a.preq_lag, a.burn_in);
    write_prequential_json(join(a.out, "prequential.json"), preq, prov);
    write_boxplot_csv(join(a.out, "boxplot.csv"), preq, prov);

    ScatterData sc = calibration_scatter(paths, a.scatter_s, a.scatter_t);
    write_scatter_csv(join(a.out, "scatter.csv"), sc, prov);

    std::cout << "volatility: mean=" << fmt_double(vol.mean_total)
              << " target=" << fmt_double(vol.target) << " z=" << fmt_double(vol.z)
              << "\n";
    std::cout << "calibration: slope=" << fmt_double(cal.slope)
              << " intercept_t=" << fmt_double(cal.intercept / cal.intercept_se)
              << " wald_p=" << fmt_double(cal.wald_pvalue) << "\n";
    std::cout << "prequential: fraction_negative=" << fmt_double(preq.fraction_negative)
              << "\n";
    return 0;
}

struct MakeGamesArgs {
    int n_train = 3000, n_test = 1000;
    std::uint64_t seed = 0;
    double step_sd = 1.6;
    int n_steps = 192;
    double home_adv_prob = 1.0;
    double momentum = -0.35;
    std::optional<double> drift;
    double target_rate = 0.585;
    std::string out = default_out_dir();
};

int run_make_games(const MakeGamesArgs& a) {
    const int n_total = a.n_train + a.n_test;
    double drift = a.drift ? *a.drift
                           : calibrate_drift(a.step_sd, a.n_steps, a.home_adv_prob,
                                             a.target_rate, n_total, a.seed, a.momentum);
    Provenance prov;
    prov.emplace_back("subcommand", "make-games");
    prov.emplace_back("seed", std::to_string(a.seed));
    prov.emplace_back("drift", fmt_double(drift));
    prov.emplace_back("step_sd", fmt_double(a.step_sd));
    prov.emplace_back("n_steps", std::to_string(a.n_steps));
    prov.emplace_back("home_advantage_prob", fmt_double(a.home_adv_prob));
    prov.emplace_back("momentum", fmt_double(a.momentum));
    fs::create_directories(a.out);

    // One seed stream for the whole corpus (so the calibrated drift applies
    // to exactly these games); train and test are a season split.
    auto all = simulate_games(n_total, drift, a.step_sd, a.n_steps, a.home_adv_prob,
                              a.seed, "2015-18", 1, a.momentum);
    std::vector<GamePath> train(all.begin(), all.begin() + a.n_train);
    std::vector<GamePath> test(all.begin() + a.n_train, all.end());
    for (auto& g : test) g.season = "2018-19";
    write_games_csv(join(a.out, "train.csv"), train, prov);
    write_games_csv(join(a.out, "test.csv"), test, prov);

    long wins = 0;
    for (const auto& g : all) wins += g.home_win;
    std::cout << "drift=" << fmt_double(drift) << " home_win_rate="
              << fmt_double(static_cast<double>(wins) / n_total) << "\n";
    return 0;
}

struct FitArgs {
    std::string train;
    int degree = 7;
    bool no_baseline = false;
    double tol = 1e-8;
    std::string out = default_out_dir();
};

PredictionMatrix in_game_matrix(const std::vector<ProbPath>& paths,
                                const std::vector<GamePath>& games) {
    PredictionMatrix m;
    m.n = static_cast<int>(paths.size());
    m.horizon = static_cast<int>(paths.front().probs.size()) - 2;  // drop prefix+terminal
    m.values.resize(static_cast<std::size_t>(m.n) * m.horizon);
    m.outcomes.resize(m.n);
    for (int j = 0; j < m.n; ++j) {
        for (int t = 0; t < m.horizon; ++t) m.at(j, t) = paths[j].probs[t + 1];
        m.outcomes[j] = games[j].home_win;
    }
    return m;
}

int run_fit(const FitArgs& a) {
    Provenance prov;
    prov.emplace_back("subcommand", "fit");
    prov.emplace_back("train", a.train);
    prov.emplace_back("degree", std::to_string(a.degree));
    prov.emplace_back("tol", fmt_double(a.tol));
    fs::create_directories(a.out);

    auto games = read_games_csv(a.train);
    ModelSimple simple = fit_simple(games);
    ModelWeighted weighted = fit_weighted(games, a.degree, !a.no_baseline);
    auto paths = predict_games(weighted, games);
    FilterModel filter = fit_filter(in_game_matrix(paths, games), a.tol);

    write_model_simple_json(join(a.out, "model_simple.json"), simple, prov);
    write_model_weighted_json(join(a.out, "model_weighted.json"), weighted, prov);
    write_filter_json(join(a.out, "filter.json"), filter, prov);

    std::cout << "simple: alpha0=" << fmt_double(simple.alpha0) << " (se "
              << fmt_double(simple.se0) << "), alpha1=" << fmt_double(simple.alpha1)
              << " (se " << fmt_double(simple.se1) << ")  [" << simple.caveat << "]\n";
    std::cout << "weighted: degree=" << weighted.degree
              << " p(t=0,X=0)=" << fmt_double(logistic(weighted.baseline(0.0))) << "\n";
    return 0;
}

struct FilterArgs {
    std::string model, weighted, games;
    bool clip = false;
    std::string out = default_out_dir();
};

int run_filter(const FilterArgs& a) {
    Provenance prov;
    prov.emplace_back("subcommand", "filter");
    prov.emplace_back("model", a.model);
    prov.emplace_back("games", a.games);
    fs::create_directories(a.out);

    FilterModel filter = read_filter_json(a.model);
    ModelWeighted weighted = read_model_weighted_json(a.weighted);
    auto games = read_games_csv(a.games);
    auto paths = predict_games(weighted, games);

    std::vector<ProbPath> filtered(paths.size());
    int warnings = 0;
    for (std::size_t j = 0; j < paths.size(); ++j) {
        std::vector<double> in_game(paths[j].probs.begin() + 1, paths[j].probs.end() - 1);
        FilteredPath fp = apply_filter(filter, in_game, a.clip);
        if (fp.ill_conditioned) ++warnings;
        ProbPath p;
        p.pi = 0.5;
        p.probs.push_back(0.5);
        p.probs.insert(p.probs.end(), fp.values.begin(), fp.values.end());
        p.probs.push_back(games[j].home_win);
        filtered[j] = std::move(p);
    }
    write_prob_csv(join(a.out, "filtered.csv"), filtered, prov);
    if (warnings > 0)
        std::cerr << "warning: " << warnings
                  << " path(s) had signal in dropped directions (ill-conditioned)\n";
    std::cout << "wrote " << join(a.out, "filtered.csv") << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string train, test, models;
    bool clip = false;
    std::string out = default_out_dir();
};

std::vector<ProbPath> filtered_paths(const FilterModel& filter,
                                     const std::vector<ProbPath>& weighted_paths,
                                     const std::vector<GamePath>& games, bool clip) {
    std::vector<ProbPath> out(weighted_paths.size());
    for (std::size_t j = 0; j < weighted_paths.size(); ++j) {
        std::vector<double> in_game(weighted_paths[j].probs.begin() + 1,
                                    weighted_paths[j].probs.end() - 1);
        FilteredPath fp = apply_filter(filter, in_game, clip);
        ProbPath p;
        p.pi = 0.5;
        p.probs.push_back(0.5);
        p.probs.insert(p.probs.end(), fp.values.begin(), fp.values.end());
        p.probs.push_back(games[j].home_win);
        out[j] = std::move(p);
    }
    return out;
}

int run_evaluate(const EvaluateArgs& a) {
    Provenance prov;
    prov.emplace_back("subcommand", "evaluate");
    prov.emplace_back("train", a.train);
    prov.emplace_back("test", a.test);
    prov.emplace_back("models", a.models);
    fs::create_directories(a.out);

    ModelSimple simple = read_model_simple_json(join(a.models, "model_simple.json"));
    ModelWeighted weighted = read_model_weighted_json(join(a.models, "model_weighted.json"));
    FilterModel filter = read_filter_json(join(a.models, "filter.json"));

    std::ofstream table(join(a.out, "table.csv"));
    if (!table) throw DataError("cannot open for writing: " + join(a.out, "table.csv"));
    for (const auto& [k, v] : prov) table << "# " << k << "=" << v << "\n";
    table << "set,count,predictor,avg_mse,avg_volatility\n";

    std::ofstream per_game(join(a.out, "per_game.csv"));
    if (!per_game) throw DataError("cannot open for writing: " + join(a.out, "per_game.csv"));
    for (const auto& [k, v] : prov) per_game << "# " << k << "=" << v << "\n";
    per_game << "set,game_id,predictor,mse,volatility\n";

    for (const std::string& which : {std::string("train"), std::string("test")}) {
        auto games = read_games_csv(which == "train" ? a.train : a.test);
        auto p_simple = predict_games(simple, games);
        auto p_weighted = predict_games(weighted, games);
        auto p_filtered = filtered_paths(filter, p_weighted, games, a.clip);

        auto e_simple = evaluate_prediction_paths("simple", p_simple, games);
        auto e_weighted = evaluate_prediction_paths("weighted", p_weighted, games);
        auto e_filtered = evaluate_prediction_paths("filtered", p_filtered, games);

        for (const auto* e : {&e_simple, &e_weighted, &e_filtered}) {
            table << which << "," << games.size() << "," << e->name << ","
                  << fmt_double(e->avg_mse) << "," << fmt_double(e->avg_volatility)
                  << "\n";
            for (const auto& g : e->per_game)
                per_game << which << "," << g.game_id << "," << e->name << ","
                         << fmt_double(g.mse) << "," << fmt_double(g.volatility) << "\n";
        }

        PairedZ z = paired_mse_z(e_weighted, e_filtered);
        std::cout << which << ": simple " << fmt_double(e_simple.avg_mse) << "/"
                  << fmt_double(e_simple.avg_volatility) << ", weighted "
                  << fmt_double(e_weighted.avg_mse) << "/"
                  << fmt_double(e_weighted.avg_volatility) << ", filtered "
                  << fmt_double(e_filtered.avg_mse) << "/"
                  << fmt_double(e_filtered.avg_volatility)
                  << ", mse z(weighted-filtered)=" << fmt_double(z.z) << "\n";
    }
    std::cout << "wrote " << join(a.out, "table.csv") << " and "
              << join(a.out, "per_game.csv") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forecast-evolution diagnostics: threshold martingales, "
                 "volatility tests, win-probability models, martingale filter"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate AR(1) series and probability paths");
    c_sim->add_option("--rho", sim.rho, "AR coefficient (single mode)");
    c_sim->add_option("--sigma", sim.sigma, "innovation sd");
    c_sim->add_option("--tau", sim.tau, "threshold (single mode)");
    c_sim->add_option("--T", sim.horizon, "horizon");
    c_sim->add_option("--seed", sim.seed, "RNG seed")->required();
    c_sim->add_flag("--ensemble", sim.ensemble, "ensemble mode");
    c_sim->add_option("--n", sim.n_series, "ensemble size");
    c_sim->add_option("--beta", sim.beta, "Beta shape parameters")->expected(2);
    c_sim->add_option("--pi", sim.pi, "common threshold probability (ensemble)");
    c_sim->add_option("--out", sim.out, "output directory");

    DiagnoseArgs diag;
    auto* c_diag = app.add_subcommand("diagnose", "Run ensemble diagnostics on probability paths");
    c_diag->add_option("--input", diag.input, "probs.csv input")->required();
    c_diag->add_option("--pi", diag.pi, "target probability")->required();
    c_diag->add_option("--lag-t", diag.lag_t, "difference-regression target time");
    c_diag->add_option("--lag-s", diag.lag_s, "difference lag s");
    c_diag->add_option("--lags", diag.lags, "regressor lags (all > s)");
    c_diag->add_option("--preq-lag", diag.preq_lag, "prequential lag order");
    c_diag->add_option("--burn-in", diag.burn_in, "prequential burn-in (-1 = default)");
    c_diag->add_option("--scatter-s", diag.scatter_s, "scatter x time");
    c_diag->add_option("--scatter-t", diag.scatter_t, "scatter y time");
    c_diag->add_option("--out", diag.out, "output directory");

    MakeGamesArgs mg;
    auto* c_mg = app.add_subcommand("make-games", "Generate a synthetic game corpus");
    c_mg->add_option("--train", mg.n_train, "training games");
    c_mg->add_option("--test", mg.n_test, "test games");
    c_mg->add_option("--seed", mg.seed, "RNG seed")->required();
    c_mg->add_option("--step-sd", mg.step_sd, "per-step score sd");
    c_mg->add_option("--n-steps", mg.n_steps, "steps per game");
    c_mg->add_option("--home-adv-prob", mg.home_adv_prob,
                     "probability the drift favors the home side");
    c_mg->add_option("--momentum", mg.momentum,
                     "AR(1) coefficient of the latent score increments");
    double drift_opt = 0.0;
    auto* drift_flag = c_mg->add_option("--drift", drift_opt, "per-step drift (skips calibration)");
    c_mg->add_option("--target-home-rate", mg.target_rate, "home-win rate to calibrate");
    c_mg->add_option("--out", mg.out, "output directory");

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Fit win-probability models and the filter");
    c_fit->add_option("--train", fit.train, "training game CSV")->required();
    c_fit->add_option("--degree", fit.degree, "weight polynomial degree");
    c_fit->add_flag("--no-baseline", fit.no_baseline, "drop the baseline time polynomial");
    c_fit->add_option("--tol", fit.tol, "filter degenerate-direction tolerance");
    c_fit->add_option("--out", fit.out, "output directory");

    FilterArgs fil;
    auto* c_fil = app.add_subcommand("filter", "Apply a saved martingale filter");
    c_fil->add_option("--model", fil.model, "filter.json")->required();
    c_fil->add_option("--weighted", fil.weighted, "model_weighted.json")->required();
    c_fil->add_option("--games", fil.games, "game CSV")->required();
    c_fil->add_flag("--clip", fil.clip, "truncate output to [0,1]");
    c_fil->add_option("--out", fil.out, "output directory");

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "Evaluate fitted models on train/test corpora");
    c_ev->add_option("--train", ev.train, "training game CSV")->required();
    c_ev->add_option("--test", ev.test, "test game CSV")->required();
    c_ev->add_option("--models", ev.models, "directory with model JSON files")->required();
    c_ev->add_flag("--clip", ev.clip, "truncate filtered output to [0,1]");
    c_ev->add_option("--out", ev.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*c_sim) return run_simulate(sim);
        if (*c_diag) return run_diagnose(diag);
        if (*c_mg) {
            if (*drift_flag) mg.drift = drift_opt;
            return run_make_games(mg);
        }
        if (*c_fit) return run_fit(fit);
        if (*c_fil) return run_filter(fil);
        if (*c_ev) return run_evaluate(ev);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
