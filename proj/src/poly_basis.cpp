#include "martdiag/poly_basis.hpp"

#include <cmath>
#include <stdexcept>

#include "martdiag/errors.hpp"

namespace martdiag {

OrthoPolyBasis OrthoPolyBasis::fit(const std::vector<double>& x, int degree) {
    if (degree < 1) throw std::domain_error("OrthoPolyBasis: degree must be >= 1");
    const std::size_t n = x.size();
    if (n < static_cast<std::size_t>(degree) + 1)
        throw std::domain_error("OrthoPolyBasis: not enough points for requested degree");

    OrthoPolyBasis b;
    b.degree = degree;
    b.alpha.resize(degree);
    b.beta.assign(degree, 0.0);
    b.norm.resize(degree + 1);

    // Monic recurrence pi_{k+1}(t) = (t - a_k) pi_k(t) - b_k pi_{k-1}(t)
    // with inner product (1/n) sum_i f(x_i) g(x_i).
    std::vector<double> prev(n, 0.0), cur(n, 1.0);
    double nrm_prev = 0.0, nrm_cur = 1.0;  // <pi_k, pi_k>
    b.norm[0] = 1.0;
    for (int k = 0; k < degree; ++k) {
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) a += x[i] * cur[i] * cur[i];
        a /= n * nrm_cur;
        b.alpha[k] = a;
        double bk = (k == 0) ? 0.0 : nrm_cur / nrm_prev;
        if (k > 0) b.beta[k] = bk;

        std::vector<double> next(n);
        double nrm_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = (x[i] - a) * cur[i] - bk * prev[i];
            nrm_next += next[i] * next[i];
        }
        nrm_next /= n;
        if (!(nrm_next > 0.0) || !std::isfinite(nrm_next))
            throw SingularDesignError(k + 1,
                "OrthoPolyBasis: degenerate values, polynomial degree " +
                std::to_string(k + 1) + " has zero norm");
        b.norm[k + 1] = std::sqrt(nrm_next);
        prev = std::move(cur);
        cur = std::move(next);
        nrm_prev = nrm_cur;
        nrm_cur = nrm_next;
    }
    return b;
}

void OrthoPolyBasis::evaluate(double t, std::vector<double>& out) const {
    out.resize(degree);
    double prev = 0.0, cur = 1.0;
    for (int k = 0; k < degree; ++k) {
        double next = (t - alpha[k]) * cur - (k > 0 ? beta[k] : 0.0) * prev;
        out[k] = next / norm[k + 1];
        prev = cur;
        cur = next;
    }
}

}  // namespace martdiag
