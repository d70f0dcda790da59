#pragma once

#include <vector>

namespace martdiag {

// Orthonormal polynomial basis over an observed set of values, built with
// the Stieltjes three-term recurrence. phi_1..phi_degree all have zero mean
// and unit sample norm over the fitting values, and the stored recurrence
// makes evaluation at new points bit-reproducible.
struct OrthoPolyBasis {
    int degree = 0;
    std::vector<double> alpha;  // recurrence shifts a_0..a_{degree-1}
    std::vector<double> beta;   // recurrence weights b_1..b_{degree-1}
    std::vector<double> norm;   // sample norms of the monic polynomials, 0..degree

    static OrthoPolyBasis fit(const std::vector<double>& x, int degree);

    // Fills out[0..degree-1] with phi_1(t)..phi_degree(t).
    void evaluate(double t, std::vector<double>& out) const;
};

}  // namespace martdiag
