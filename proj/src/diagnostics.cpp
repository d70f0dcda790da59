#include "martdiag/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "martdiag/errors.hpp"
#include "martdiag/poly_basis.hpp"

namespace martdiag {

OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool robust) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n < p) throw std::domain_error("ols_fit: fewer rows than columns");
    if (y.size() != n) throw std::domain_error("ols_fit: response length mismatch");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        int col = static_cast<int>(qr.colsPermutation().indices()(qr.rank()));
        throw SingularDesignError(col, "ols_fit: design is rank deficient at column " +
                                           std::to_string(col));
    }

    OlsFit fit;
    fit.robust = robust;
    fit.coef = qr.solve(y);
    fit.residuals = y - X * fit.coef;

    Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(
        Eigen::MatrixXd::Identity(p, p));
    if (robust) {
        // HC0 sandwich: (X'X)^-1 X' diag(e^2) X (X'X)^-1
        Eigen::MatrixXd meat = X.transpose() *
                               fit.residuals.array().square().matrix().asDiagonal() * X;
        fit.cov = xtx_inv * meat * xtx_inv;
    } else {
        double dof = static_cast<double>(n - p);
        double s2 = dof > 0 ? fit.residuals.squaredNorm() / dof : 0.0;
        fit.cov = s2 * xtx_inv;
    }
    return fit;
}

namespace {

// Regularized upper incomplete gamma Q(a, x) by series / continued fraction.
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // series for P(a,x)
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q(a,x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

double prob_at(const ProbPath& p, int t) {
    if (t < 0 || t > p.horizon())
        throw std::out_of_range("diagnostics: lag outside 0..T");
    return p.probs[t];
}

}  // namespace

double chisq_sf(double x, int df) {
    if (df < 1) throw std::domain_error("chisq_sf: df must be >= 1");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

CalibrationReport calibration_regression(const std::vector<ProbPath>& paths,
                                         int t, int s, const std::vector<int>& lags,
                                         int poly_degree) {
    const int n = static_cast<int>(paths.size());
    const int k = static_cast<int>(lags.size());
    if (k < 1) throw std::domain_error("calibration_regression: need regressor lags");
    if (n < k + 2) throw std::domain_error("calibration_regression: ensemble too small");
    if (s < 1 || s >= t) throw std::domain_error("calibration_regression: need 0 < s < t");
    int prev = s;
    for (int sj : lags) {
        if (sj <= prev) throw std::domain_error("calibration_regression: lags must increase past s");
        if (sj > t) throw std::domain_error("calibration_regression: lag beyond t");
        prev = sj;
    }

    CalibrationReport rep;
    rep.lag_s = t - s;
    rep.lag_t = t;
    rep.diff_lags = lags;

    // Level fit p_t ~ p_{t-s}
    Eigen::MatrixXd Xl(n, 2);
    Eigen::VectorXd yl(n);
    for (int j = 0; j < n; ++j) {
        Xl(j, 0) = 1.0;
        Xl(j, 1) = prob_at(paths[j], t - s);
        yl(j) = prob_at(paths[j], t);
    }
    OlsFit level = ols_fit(Xl, yl, true);
    rep.intercept = level.coef(0);
    rep.slope = level.coef(1);
    rep.intercept_se = std::sqrt(level.cov(0, 0));
    rep.slope_se = std::sqrt(level.cov(1, 1));

    // Polynomial fit, orthogonalized over the observed regressor values.
    if (poly_degree >= 1) {
        std::vector<double> xs(n);
        for (int j = 0; j < n; ++j) xs[j] = Xl(j, 1);
        OrthoPolyBasis basis = OrthoPolyBasis::fit(xs, poly_degree);
        Eigen::MatrixXd Xp(n, poly_degree + 1);
        std::vector<double> phi;
        for (int j = 0; j < n; ++j) {
            Xp(j, 0) = 1.0;
            basis.evaluate(xs[j], phi);
            for (int d = 0; d < poly_degree; ++d) Xp(j, d + 1) = phi[d];
        }
        OlsFit pf = ols_fit(Xp, yl, true);
        rep.poly_coef.resize(poly_degree);
        rep.poly_t.resize(poly_degree);
        for (int d = 0; d < poly_degree; ++d) {
            rep.poly_coef[d] = pf.coef(d + 1);
            rep.poly_t[d] = pf.coef(d + 1) / std::sqrt(pf.cov(d + 1, d + 1));
        }
    }

    // Difference regression (the martingale-null test).
    Eigen::MatrixXd Xd(n, k + 1);
    Eigen::VectorXd yd(n);
    for (int j = 0; j < n; ++j) {
        Xd(j, 0) = 1.0;
        for (int c = 0; c < k; ++c) Xd(j, c + 1) = prob_at(paths[j], t - lags[c]);
        yd(j) = prob_at(paths[j], t) - prob_at(paths[j], t - s);
    }
    OlsFit df = ols_fit(Xd, yd, true);
    rep.diff_coef.resize(k + 1);
    rep.diff_se.resize(k + 1);
    rep.diff_t.resize(k + 1);
    for (int c = 0; c <= k; ++c) {
        rep.diff_coef[c] = df.coef(c);
        rep.diff_se[c] = std::sqrt(df.cov(c, c));
        rep.diff_t[c] = df.coef(c) / rep.diff_se[c];
    }
    rep.wald_df = k + 1;
    rep.wald_stat = df.coef.dot(df.cov.ldlt().solve(df.coef));
    rep.wald_pvalue = chisq_sf(rep.wald_stat, rep.wald_df);
    return rep;
}

ScatterData calibration_scatter(const std::vector<ProbPath>& paths, int s, int t) {
    if (s >= t) throw std::domain_error("calibration_scatter: need s < t");
    ScatterData sc;
    sc.lag_s = s;
    sc.lag_t = t;
    const int n = static_cast<int>(paths.size());
    sc.x.resize(n);
    sc.y.resize(n);
    for (int j = 0; j < n; ++j) {
        sc.x[j] = prob_at(paths[j], s);
        sc.y[j] = prob_at(paths[j], t);
    }
    if (n >= 2) {
        double mx = 0, my = 0;
        for (int j = 0; j < n; ++j) { mx += sc.x[j]; my += sc.y[j]; }
        mx /= n;
        my /= n;
        double sxx = 0, sxy = 0;
        for (int j = 0; j < n; ++j) {
            sxx += (sc.x[j] - mx) * (sc.x[j] - mx);
            sxy += (sc.x[j] - mx) * (sc.y[j] - my);
        }
        if (sxx > 1e-12 * n) {  // vertical bands (e.g. s = 0) have no line
            sc.slope = sxy / sxx;
            sc.intercept = my - sc.slope * mx;
            sc.line_defined = true;
        }
    }
    return sc;
}

VolatilityTestReport total_volatility_test(const std::vector<ProbPath>& paths,
                                           double pi) {
    const int n = static_cast<int>(paths.size());
    if (n < 2) throw std::domain_error("total_volatility_test: need at least 2 paths");
    std::string incomplete;
    for (int j = 0; j < n; ++j) {
        double pT = paths[j].terminal();
        if (pT != 0.0 && pT != 1.0) incomplete += (incomplete.empty() ? "" : ",") + std::to_string(j);
    }
    if (!incomplete.empty())
        throw DataError("total_volatility_test: paths without 0/1 terminal: " + incomplete);

    VolatilityTestReport rep;
    rep.target = pi * (1.0 - pi);
    double sum = 0, sumsq = 0, sum_s = 0, sum_d = 0, sumsq_d = 0;
    for (int j = 0; j < n; ++j) {
        double dev = paths[j].terminal() - pi;
        double v = dev * dev;
        VolatilityPath vol = quadratic_variation(paths[j]);
        double sT = vol.s_values.back();
        sum += v;
        sumsq += v * v;
        sum_s += sT;
        double diff = v - sT;
        sum_d += diff;
        sumsq_d += diff * diff;
    }
    rep.mean_total = sum / n;
    rep.mean_s_total = sum_s / n;
    double var = (sumsq - sum * sum / n) / (n - 1);
    rep.se = std::sqrt(var / n);
    rep.z = (rep.mean_total - rep.target) / rep.se;
    // Equal in expectation only; flag when they drift apart.
    double var_d = (sumsq_d - sum_d * sum_d / n) / (n - 1);
    double se_d = std::sqrt(var_d / n);
    rep.cross_check_flag = se_d > 0 && std::fabs(rep.mean_total - rep.mean_s_total) > 4.0 * se_d;
    return rep;
}

int prequential_default_burn_in(int lag) {
    return lag + std::max(10, 2 * lag + 2);
}

namespace {

// Covariance-form recursive least squares with ridge eps on the initial
// information matrix.
class Rls {
  public:
    Rls(int dim, double eps) : theta_(Eigen::VectorXd::Zero(dim)),
                               P_(Eigen::MatrixXd::Identity(dim, dim) / eps) {}

    double predict(const Eigen::VectorXd& x) const { return theta_.dot(x); }

    void update(const Eigen::VectorXd& x, double y) {
        Eigen::VectorXd Px = P_ * x;
        double denom = 1.0 + x.dot(Px);
        Eigen::VectorXd gain = Px / denom;
        theta_ += gain * (y - theta_.dot(x));
        P_ -= gain * Px.transpose();
    }

  private:
    Eigen::VectorXd theta_;
    Eigen::MatrixXd P_;
};

}  // namespace

double prequential_r2(const std::vector<double>& d, int lag, int burn_in) {
    if (lag < 1) throw std::domain_error("prequential_r2: lag must be >= 1");
    const int T = static_cast<int>(d.size());
    int t0 = burn_in < 0 ? prequential_default_burn_in(lag) : burn_in;
    if (t0 < lag + 1)
        throw std::domain_error("prequential_r2: burn-in cannot precede the first usable row");
    if (t0 > T)
        throw std::domain_error("prequential_r2: series too short for burn-in");

    Rls rls(lag + 1, 1e-8);
    Eigen::VectorXd x(lag + 1);
    double sse = 0.0, sst = 0.0;
    // 1-based time t maps to d[t-1]; rows exist for t = lag+1 .. T.
    for (int t = lag + 1; t <= T; ++t) {
        x(0) = 1.0;
        for (int j = 1; j <= lag; ++j) x(j) = d[t - 1 - j];
        double y = d[t - 1];
        if (t >= t0) {
            double e = y - rls.predict(x);
            sse += e * e;
            sst += y * y;
        }
        rls.update(x, y);
    }
    if (!(sst > 0.0))
        throw UndefinedStatisticError("prequential_r2: zero denominator (all-zero differences)");
    return 1.0 - sse / sst;
}

double series_ols_r2(const std::vector<double>& d, int lag) {
    if (lag < 1) throw std::domain_error("series_ols_r2: lag must be >= 1");
    const int T = static_cast<int>(d.size());
    const int rows = T - lag;
    if (rows < 1) throw std::domain_error("series_ols_r2: series too short");
    Eigen::MatrixXd X(rows, lag + 1);
    Eigen::VectorXd y(rows);
    for (int r = 0; r < rows; ++r) {
        int t = lag + 1 + r;
        X(r, 0) = 1.0;
        for (int j = 1; j <= lag; ++j) X(r, j) = d[t - 1 - j];
        y(r) = d[t - 1];
    }
    double mean = y.mean();
    double sst = (y.array() - mean).matrix().squaredNorm();
    Eigen::VectorXd coef = X.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    double sse = (y - X * coef).squaredNorm();
    // A numerically exact (possibly saturated minimum-norm) fit reports R^2=1
    // even when the centered total sum of squares is zero; this is the
    // leverage pathology the prequential statistic is immune to.
    if (sse <= 1e-28 * std::max(1.0, y.squaredNorm())) return 1.0;
    if (!(sst > 0.0))
        throw UndefinedStatisticError("series_ols_r2: response has no variation");
    return 1.0 - sse / sst;
}

namespace {

PrequentialReport contrast_impl(const std::vector<std::vector<double>>& ds,
                                int lag, int burn_in, bool parallel) {
    PrequentialReport rep;
    rep.lag = lag;
    rep.burn_in = burn_in < 0 ? prequential_default_burn_in(lag) : burn_in;
    const int n = static_cast<int>(ds.size());
    rep.r2_tilde.assign(n, std::numeric_limits<double>::quiet_NaN());
    rep.ols_r2.assign(n, std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j < n; ++j) {
        try {
            rep.r2_tilde[j] = prequential_r2(ds[j], lag, rep.burn_in);
        } catch (const UndefinedStatisticError&) {
        }
        try {
            rep.ols_r2[j] = series_ols_r2(ds[j], lag);
        } catch (const UndefinedStatisticError&) {
        }
    }
    int defined = 0, negative = 0;
    for (int j = 0; j < n; ++j) {
        if (std::isnan(rep.r2_tilde[j])) continue;
        ++defined;
        if (rep.r2_tilde[j] < 0.0) ++negative;
    }
    rep.fraction_negative = defined > 0 ? static_cast<double>(negative) / defined : 0.0;
    return rep;
}

}  // namespace

PrequentialReport ols_vs_prequential_contrast(
    const std::vector<std::vector<double>>& ds, int lag, int burn_in) {
    return contrast_impl(ds, lag, burn_in, true);
}

PrequentialReport ols_vs_prequential_contrast_serial(
    const std::vector<std::vector<double>>& ds, int lag, int burn_in) {
    return contrast_impl(ds, lag, burn_in, false);
}

}  // namespace martdiag
