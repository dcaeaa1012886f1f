#ifndef PERMREG_LINALG_HPP
#define PERMREG_LINALG_HPP

#include <cstddef>
#include <utility>

#include "permreg/dataset.hpp"

namespace permreg {

// Root-mean-square norm: (mean of squared entries)^{1/2}. This is the norm
// used everywhere in this library (criterion terms, R² scores). It is
// permutation-invariant and equals 1 on a standardized response; it is NOT
// the Euclidean norm.
double norm2(const Vector& v);

// Cholesky factorization A = L Lᵀ of a symmetric positive definite matrix,
// kept around so several right-hand sides can be solved against one
// factorization. Throws NumericalError (with the failing pivot index) if A
// is not positive definite.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const Matrix& A);

    Vector solve(const Vector& b) const;

    Eigen::Index dim() const { return L_.rows(); }

private:
    Matrix L_;
};

// Solves A x = b for symmetric positive definite A.
Vector ridge_solve(const Matrix& A, const Vector& b);

// Centering/rescaling applied to a dataset, retained so that coefficients
// and predictions can be mapped back to the original scale. Scales are
// population (divide-by-n) standard deviations, so a standardized response
// has RMS norm exactly 1.
struct StandardizationMeta {
    Vector x_mean;   // per feature column
    Vector x_scale;  // per feature column, > 0 (all ones when X untouched)
    double y_mean = 0.0;
    double y_scale = 1.0;
};

// Centers and rescales Y (always) and the columns of X (unless
// standardize_x is false) to mean 0 and unit RMS norm. Rejects constant
// columns and a constant response with DegenerateDataError naming the
// offending column.
std::pair<Dataset, StandardizationMeta> standardize(const Dataset& data,
                                                    bool standardize_x = true);

}  // namespace permreg

#endif  // PERMREG_LINALG_HPP
