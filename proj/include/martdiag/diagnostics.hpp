#pragma once

#include <Eigen/Dense>
#include <vector>

#include "martdiag/threshold_martingale.hpp"

namespace martdiag {

// Least-squares fit with either classical or HC0 sandwich covariance.
struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::MatrixXd cov;
    Eigen::VectorXd residuals;
    bool robust = false;

    Eigen::VectorXd std_errors() const { return cov.diagonal().cwiseSqrt(); }
};

// Throws SingularDesignError (with the offending column) on rank deficiency.
OlsFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
               bool robust);

// Upper tail of the chi-square distribution, for Wald tests.
double chisq_sf(double x, int df);

struct CalibrationReport {
    int lag_s = 0, lag_t = 0;

    // Level regression p_t on p_{t-s} with robust standard errors.
    double slope = 0.0, intercept = 0.0;
    double slope_se = 0.0, intercept_se = 0.0;

    // Fifth-degree fit of p_t on orthogonalized polynomials of p_{t-s};
    // robust t-statistics, degree 1..5.
    std::vector<double> poly_coef, poly_t;

    // Difference regression p_t - p_{t-s} on the requested lagged
    // probabilities (martingale null: all coefficients zero).
    std::vector<int> diff_lags;
    std::vector<double> diff_coef, diff_se, diff_t;
    double wald_stat = 0.0;
    double wald_pvalue = 1.0;
    int wald_df = 0;
};

// Regresses p_t - p_{t-s} on (p_{t-s1}, ..., p_{t-sk}) across the ensemble
// and attaches the level and polynomial calibration fits at lag s.
CalibrationReport calibration_regression(const std::vector<ProbPath>& paths,
                                         int t, int s, const std::vector<int>& lags,
                                         int poly_degree = 5);

struct ScatterData {
    int lag_s = 0, lag_t = 0;
    std::vector<double> x, y;
    double slope = 0.0, intercept = 0.0;
    bool line_defined = false;  // false for single points or vertical bands
};

// (p_{s,j}, p_{t,j}) pairs plus the least-squares line for plot export.
ScatterData calibration_scatter(const std::vector<ProbPath>& paths, int s, int t);

struct VolatilityTestReport {
    double mean_total = 0.0;  // mean over series of (p_T - pi)^2
    double se = 0.0;
    double z = 0.0;
    double target = 0.0;  // pi (1 - pi)
    double mean_s_total = 0.0;  // mean of S_T, equal in expectation
    bool cross_check_flag = false;  // set when the two statistics disagree
};

VolatilityTestReport total_volatility_test(const std::vector<ProbPath>& paths,
                                           double pi);

// Default burn-in for the prequential statistic: the first predicted index
// after the initial fit is overdetermined.
int prequential_default_burn_in(int lag);

// Prequential R~2 of the difference series d_1..d_T against its own lags.
// Each d_t with t >= burn_in is predicted by recursive least squares fit to
// the rows strictly before t.
double prequential_r2(const std::vector<double>& d, int lag, int burn_in = -1);

// Full-sample OLS R^2 (intercept included; minimum-norm fit when the design
// is rank deficient, which is what makes the leverage pathology visible).
double series_ols_r2(const std::vector<double>& d, int lag);

struct PrequentialReport {
    std::vector<double> r2_tilde;   // NaN where undefined
    std::vector<double> ols_r2;
    double fraction_negative = 0.0;  // over series with defined R~2
    int lag = 0;
    int burn_in = 0;
};

PrequentialReport ols_vs_prequential_contrast(
    const std::vector<std::vector<double>>& difference_series, int lag,
    int burn_in = -1);
PrequentialReport ols_vs_prequential_contrast_serial(
    const std::vector<std::vector<double>>& difference_series, int lag,
    int burn_in = -1);  // reference

}  // namespace martdiag
