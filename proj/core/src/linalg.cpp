#include "permreg/linalg.hpp"

#include <cmath>
#include <string>

#include "permreg/errors.hpp"

namespace permreg {

double norm2(const Vector& v) {
    if (v.size() < 1) {
        throw InvalidInputError("norm2: vector must have at least one entry");
    }
    if (!v.allFinite()) {
        throw InvalidInputError("norm2: non-finite entry");
    }
    return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

CholeskyFactor::CholeskyFactor(const Matrix& A) {
    const Eigen::Index p = A.rows();
    if (p < 1 || A.cols() != p) {
        throw InvalidInputError("CholeskyFactor: matrix must be square and nonempty");
    }
    L_ = Matrix::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double diag = A(j, j) - L_.row(j).head(j).squaredNorm();
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw NumericalError(
                "Cholesky factorization failed at pivot " + std::to_string(j) +
                    ": matrix is not positive definite",
                static_cast<std::size_t>(j));
        }
        diag = std::sqrt(diag);
        L_(j, j) = diag;
        for (Eigen::Index i = j + 1; i < p; ++i) {
            L_(i, j) = (A(i, j) - L_.row(i).head(j).dot(L_.row(j).head(j))) / diag;
        }
    }
}

Vector CholeskyFactor::solve(const Vector& b) const {
    if (b.size() != L_.rows()) {
        throw InvalidInputError("CholeskyFactor::solve: right-hand side has wrong length");
    }
    Vector x = L_.triangularView<Eigen::Lower>().solve(b);
    L_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

Vector ridge_solve(const Matrix& A, const Vector& b) {
    if (A.rows() != b.size()) {
        throw InvalidInputError("ridge_solve: dimension mismatch");
    }
    if (!A.allFinite() || !b.allFinite()) {
        throw InvalidInputError("ridge_solve: non-finite input");
    }
    return CholeskyFactor(A).solve(b);
}

namespace {

// Population mean/RMS-deviation of one column; scale is zero for a constant
// column.
std::pair<double, double> column_moments(const Vector& column) {
    const double mean = column.mean();
    const double variance = (column.array() - mean).square().mean();
    return {mean, std::sqrt(variance)};
}

}  // namespace

std::pair<Dataset, StandardizationMeta> standardize(const Dataset& data, bool standardize_x) {
    const Eigen::Index n = data.X.rows();
    const Eigen::Index p = data.X.cols();
    if (n < 2) {
        throw InvalidInputError("standardize: need at least two rows");
    }
    if (data.Y.size() != n) {
        throw InvalidInputError("standardize: X and Y row counts differ");
    }
    if (!data.X.allFinite() || !data.Y.allFinite()) {
        throw InvalidInputError("standardize: non-finite entry");
    }

    StandardizationMeta meta;
    meta.x_mean = Vector::Zero(p);
    meta.x_scale = Vector::Ones(p);

    Dataset out = data;
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto [mean, scale] = column_moments(data.X.col(j));
        if (scale <= 0.0) {
            throw DegenerateDataError(
                "standardize: column " + std::to_string(j) + " is constant",
                static_cast<std::size_t>(j));
        }
        if (standardize_x) {
            meta.x_mean(j) = mean;
            meta.x_scale(j) = scale;
            out.X.col(j) = (data.X.col(j).array() - mean) / scale;
        }
    }

    const auto [y_mean, y_scale] = column_moments(data.Y);
    if (y_scale <= 0.0) {
        throw DegenerateDataError("standardize: response is constant");
    }
    meta.y_mean = y_mean;
    meta.y_scale = y_scale;
    out.Y = (data.Y.array() - y_mean) / y_scale;
    return {std::move(out), std::move(meta)};
}

}  // namespace permreg
