#include "martdiag/threshold_martingale.hpp"

#include <cmath>
#include <stdexcept>

#include "martdiag/normal.hpp"

namespace martdiag {

double threshold_prob_ar1(const SeriesPath& path, int t, double tau) {
    const ArSpec& spec = path.spec;
    spec.validate();
    const int T = spec.horizon;
    if (t < 1 || t > T)
        throw std::out_of_range("threshold_prob_ar1: t outside 1..T");

    const double y_t = path.values[t - 1];
    const int h = T - t;
    if (h == 0)  // exact terminal indicator; equality counts as <=
        return y_t <= tau ? 1.0 : 0.0;

    const double mean = std::pow(spec.rho, h) * y_t;
    const double var = spec.sigma_eps * spec.sigma_eps *
                       (1.0 - std::pow(spec.rho, 2 * h)) / (1.0 - spec.rho * spec.rho);
    return norm_cdf((tau - mean) / std::sqrt(var));
}

ProbPath threshold_path(const SeriesPath& path, double tau) {
    const int T = path.spec.horizon;
    ProbPath p;
    p.tau = tau;
    p.pi = norm_cdf(tau / stationary_sd(path.spec.rho, path.spec.sigma_eps));
    p.probs.resize(T + 1);
    p.probs[0] = p.pi;
    for (int t = 1; t <= T; ++t) p.probs[t] = threshold_prob_ar1(path, t, tau);
    return p;
}

namespace {

std::vector<ProbPath> threshold_paths_impl(const Ensemble& e, bool parallel) {
    std::vector<ProbPath> out(e.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j < e.size(); ++j) out[j] = threshold_path(e.series[j], e.tau[j]);
    return out;
}

}  // namespace

std::vector<ProbPath> threshold_paths(const Ensemble& e) {
    return threshold_paths_impl(e, true);
}

std::vector<ProbPath> threshold_paths_serial(const Ensemble& e) {
    return threshold_paths_impl(e, false);
}

std::vector<double> differences(const ProbPath& p) {
    if (p.probs.size() < 2)
        throw std::domain_error("differences: path needs at least two points");
    std::vector<double> d(p.probs.size() - 1);
    for (std::size_t t = 1; t < p.probs.size(); ++t) d[t - 1] = p.probs[t] - p.probs[t - 1];
    return d;
}

VolatilityPath quadratic_variation(const ProbPath& p) {
    VolatilityPath v;
    const std::size_t n = p.probs.size();
    v.s_values.resize(n);
    v.v_values.resize(n);
    v.s_values[0] = 0.0;
    v.v_values[0] = p.probs[0] * (1.0 - p.probs[0]);
    for (std::size_t t = 1; t < n; ++t) {
        double d = p.probs[t] - p.probs[t - 1];
        v.s_values[t] = v.s_values[t - 1] + d * d;
        v.v_values[t] = v.s_values[t] + p.probs[t] * (1.0 - p.probs[t]);
    }
    return v;
}

VolatilityPath compensated_volatility(const ProbPath& p) {
    return quadratic_variation(p);
}

}  // namespace martdiag
