#pragma once

#include <vector>

namespace martdiag {

// n paths of T predictions of a scalar outcome per path. Row-major.
struct PredictionMatrix {
    int n = 0, horizon = 0;
    std::vector<double> values;    // n * horizon
    std::vector<double> outcomes;  // length n

    double at(int i, int t) const { return values[static_cast<std::size_t>(i) * horizon + t]; }
    double& at(int i, int t) { return values[static_cast<std::size_t>(i) * horizon + t]; }
};

// Result of the Gram-Schmidt decomposition with column-averaged loadings.
// Index 0 is the explicit constant direction, indices 1..T the prediction
// times, so R is (T+1) x (T+1) lower triangular.
struct FilterModel {
    int horizon = 0;          // T
    double tol = 1e-8;        // degenerate-direction threshold
    std::vector<double> r;    // packed lower triangle, row-major: r[t][s], s <= t
    std::vector<double> col_means;      // r_bar_s over prediction rows t = max(s,1)..T
    std::vector<char> retained;         // per direction

    double loading(int t, int s) const {
        return r[static_cast<std::size_t>(t) * (t + 1) / 2 + s];
    }
    double& loading(int t, int s) {
        return r[static_cast<std::size_t>(t) * (t + 1) / 2 + s];
    }
};

struct FilteredPath {
    std::vector<double> values;  // filtered predictions, times 1..T
    bool ill_conditioned = false;
};

struct RiskDecomposition {
    double risk_orig = 0.0;      // per-row total squared error of the inputs
    double risk_filtered = 0.0;
    double spread_term = 0.0;    // sum over (s,t) of (r_ts - r_bar_s)^2
    double cross_term = 0.0;     // vanishes with sample moments
};

// Modified Gram-Schmidt under the sample inner product (1/n) sum_i u_i v_i,
// with an all-ones column prepended as the constant direction. Directions
// whose residual norm falls below tol * (column norm) are dropped.
FilterModel fit_filter(const PredictionMatrix& m, double tol = 1e-8);

// Back-substitutes the triangular transform to recover the coordinates of
// one path, zeroes the dropped directions, and reconstructs with the
// column-mean loadings. Output may leave [0,1]; set clip to truncate.
FilteredPath apply_filter(const FilterModel& f, const std::vector<double>& path,
                          bool clip = false);

// In-sample decomposition risk_orig = risk_filtered + spread + 2*cross over
// the prediction cells; the cross term vanishes identically with sample
// moments, so risk_filtered <= risk_orig holds exactly.
RiskDecomposition risk_decomposition(const FilterModel& f, const PredictionMatrix& m);

}  // namespace martdiag
