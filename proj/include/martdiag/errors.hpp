#pragma once

#include <stdexcept>
#include <string>

namespace martdiag {

// Data / schema problems (bad files, mismatched grids). CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures (singular designs, divergence). CLI exit code 4.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rank-deficient regression design; carries the offending column.
struct SingularDesignError : NumericalError {
    int column;
    explicit SingularDesignError(int col, const std::string& what)
        : NumericalError(what), column(col) {}
};

// IRLS divergence guard tripped (separation and friends).
struct DivergenceError : NumericalError {
    using NumericalError::NumericalError;
};

// Statistic whose defining ratio is 0/0 (e.g. all-zero differences).
struct UndefinedStatisticError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace martdiag
