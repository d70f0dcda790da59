#pragma once

#include <vector>

#include "martdiag/stochastic_sim.hpp"

namespace martdiag {

// One realization's threshold-probability sequence p_0..p_T. For complete
// paths the last entry is the 0/1 outcome indicator.
struct ProbPath {
    std::vector<double> probs;  // p_0..p_T
    double tau = 0.0;
    double pi = 0.0;  // expected initial level

    int horizon() const { return static_cast<int>(probs.size()) - 1; }
    double terminal() const { return probs.back(); }
};

// Cumulative squared differences S_t and the compensated process
// V_t = S_t + p_t(1-p_t).
struct VolatilityPath {
    std::vector<double> s_values;  // S_0..S_T
    std::vector<double> v_values;  // V_0..V_T
};

// P(Y_T <= tau | F_t) for a stationary AR(1): Phi((tau - rho^h y_t)/s_h)
// with h = T-t and s_h^2 = sigma^2 (1-rho^(2h))/(1-rho^2). At t = T this is
// the exact indicator {y_T <= tau}. 1-based t.
double threshold_prob_ar1(const SeriesPath& path, int t, double tau);

// Full probability path; p_0 is the stationary probability Phi(tau/sd).
ProbPath threshold_path(const SeriesPath& path, double tau);

// Probability paths for a whole ensemble (each series against its own tau).
std::vector<ProbPath> threshold_paths(const Ensemble& ensemble);
std::vector<ProbPath> threshold_paths_serial(const Ensemble& ensemble);  // reference

// Martingale differences d_t = p_t - p_{t-1}, t = 1..T.
std::vector<double> differences(const ProbPath& p);

// S_t = sum_{s<=t} d_s^2, S_0 = 0 (plus the matching V_t).
VolatilityPath quadratic_variation(const ProbPath& p);

// Same object with v_values populated; kept as the named entry point for the
// compensated process.
VolatilityPath compensated_volatility(const ProbPath& p);

}  // namespace martdiag
