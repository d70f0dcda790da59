#include "martdiag/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "martdiag/errors.hpp"

namespace martdiag {

FilterModel fit_filter(const PredictionMatrix& m, double tol) {
    if (m.n < 2) throw std::domain_error("fit_filter: need at least 2 paths");
    if (!(tol > 0.0)) throw std::domain_error("fit_filter: tol must be positive");
    if (m.values.size() != static_cast<std::size_t>(m.n) * m.horizon ||
        m.outcomes.size() != static_cast<std::size_t>(m.n))
        throw std::domain_error("fit_filter: inconsistent matrix shape");

    const int n = m.n, T = m.horizon, dim = T + 1;
    double max_norm = 0.0;
    for (int t = 0; t < T; ++t) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += m.at(i, t) * m.at(i, t);
        max_norm = std::max(max_norm, s);
    }
    if (max_norm == 0.0)
        throw NumericalError("fit_filter: degenerate input, all prediction columns are zero");

    FilterModel f;
    f.horizon = T;
    f.tol = tol;
    f.r.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
    f.col_means.assign(dim, 0.0);
    f.retained.assign(dim, 0);

    // Basis vectors, unit sample norm <u,v> = (1/n) sum u_i v_i.
    std::vector<std::vector<double>> Q(dim);
    std::vector<double> v(n);

    for (int t = 0; t < dim; ++t) {
        double col_norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = (t == 0) ? 1.0 : m.at(i, t - 1);
            col_norm2 += v[i] * v[i];
        }
        col_norm2 /= n;

        for (int s = 0; s < t; ++s) {
            if (!f.retained[s]) continue;  // dropped directions carry zero loadings
            const std::vector<double>& q = Q[s];
            double proj = 0.0;
            for (int i = 0; i < n; ++i) proj += v[i] * q[i];
            proj /= n;
            f.loading(t, s) = proj;
            for (int i = 0; i < n; ++i) v[i] -= proj * q[i];
        }

        double resid2 = 0.0;
        for (int i = 0; i < n; ++i) resid2 += v[i] * v[i];
        resid2 /= n;
        double resid = std::sqrt(resid2);
        if (col_norm2 == 0.0 || resid < tol * std::sqrt(col_norm2)) {
            f.retained[t] = 0;  // Q_t = 0, r_tt = 0
        } else {
            f.retained[t] = 1;
            f.loading(t, t) = resid;
            Q[t].resize(n);
            for (int i = 0; i < n; ++i) Q[t][i] = v[i] / resid;
        }
    }

    // Column means over the prediction rows t = max(s,1)..T; the constant
    // direction's self-loading r_00 is not a prediction and stays out of the
    // average, so columns of constants pass through the filter unchanged.
    // Dropped directions stay zero.
    for (int s = 0; s < dim; ++s) {
        if (!f.retained[s]) continue;
        int first = std::max(s, 1);
        double sum = 0.0;
        for (int t = first; t < dim; ++t) sum += f.loading(t, s);
        f.col_means[s] = sum / (dim - first);
    }
    return f;
}

FilteredPath apply_filter(const FilterModel& f, const std::vector<double>& path,
                          bool clip) {
    const int T = f.horizon, dim = T + 1;
    if (static_cast<int>(path.size()) != T)
        throw std::domain_error("apply_filter: path length does not match the model");

    FilteredPath out;
    out.values.resize(T);
    std::vector<double> q(dim, 0.0);
    q[0] = 1.0;  // the constant direction
    double acc = f.col_means[0];
    for (int t = 1; t < dim; ++t) {
        double resid = path[t - 1];
        for (int s = 0; s < t; ++s) resid -= f.loading(t, s) * q[s];
        if (f.retained[t]) {
            q[t] = resid / f.loading(t, t);
        } else {
            q[t] = 0.0;
            if (std::fabs(resid) > f.tol * (1.0 + std::fabs(path[t - 1])))
                out.ill_conditioned = true;  // signal lost in a dropped direction
        }
        acc += f.col_means[t] * q[t];
        out.values[t - 1] = clip ? std::min(1.0, std::max(0.0, acc)) : acc;
    }
    return out;
}

RiskDecomposition risk_decomposition(const FilterModel& f, const PredictionMatrix& m) {
    if (f.horizon != m.horizon)
        throw std::domain_error("risk_decomposition: model/matrix horizon mismatch");
    const int n = m.n, T = f.horizon, dim = T + 1;

    RiskDecomposition d;
    std::vector<double> path(T);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < T; ++t) path[t] = m.at(i, t);
        FilteredPath filt = apply_filter(f, path);
        const double y = m.outcomes[i];
        for (int t = 0; t < T; ++t) {
            double eo = y - path[t], ef = y - filt.values[t];
            d.risk_orig += eo * eo;
            d.risk_filtered += ef * ef;
            d.cross_term += ef * (filt.values[t] - path[t]);
        }
    }
    d.risk_orig /= n;
    d.risk_filtered /= n;
    d.cross_term /= n;

    // Independent algebraic route for the spread, over the prediction rows.
    for (int s = 0; s < dim; ++s) {
        if (!f.retained[s]) continue;
        for (int t = std::max(s, 1); t < dim; ++t) {
            double dev = f.loading(t, s) - f.col_means[s];
            d.spread_term += dev * dev;
        }
    }
    return d;
}

}  // namespace martdiag
