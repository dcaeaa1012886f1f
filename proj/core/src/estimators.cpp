#include "permreg/estimators.hpp"

#include <cmath>

#include "permreg/errors.hpp"

namespace permreg {

std::string family_name(FamilyTag family) {
    switch (family) {
        case FamilyTag::Ridge:
            return "bkk";
        case FamilyTag::SparseRidge:
            return "sbkk";
        case FamilyTag::Aggregated:
            return "abkk";
    }
    return "bkk";
}

FamilyTag family_from_name(const std::string& name) {
    if (name == "bkk" || name == "ridge") return FamilyTag::Ridge;
    if (name == "sbkk" || name == "sparse") return FamilyTag::SparseRidge;
    if (name == "abkk" || name == "aggregated") return FamilyTag::Aggregated;
    throw InvalidInputError("unknown estimator family '" + name + "' (expected bkk, sbkk or abkk)");
}

RegParams default_params(Eigen::Index p) {
    RegParams theta;
    theta.gamma = Vector::Zero(p);
    return theta;
}

void validate_params(const RegParams& theta, FamilyTag family, Eigen::Index p) {
    if (!(theta.lambda > 0.0) || !std::isfinite(theta.lambda)) {
        throw InvalidInputError("lambda must be positive and finite");
    }
    if (family == FamilyTag::Ridge) return;
    if (!(theta.kappa > 0.0) || !std::isfinite(theta.kappa)) {
        throw InvalidInputError("kappa must be positive and finite");
    }
    if (theta.gamma.size() != p) {
        throw InvalidInputError("gamma length does not match the feature count");
    }
    if (!theta.gamma.allFinite()) {
        throw InvalidInputError("gamma has a non-finite entry");
    }
    if (family == FamilyTag::Aggregated && !std::isfinite(theta.mu)) {
        throw InvalidInputError("mu must be finite");
    }
}

double sigmoid(double z) {
    if (z > 500.0) z = 500.0;
    if (z < -500.0) z = -500.0;
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Vector sparsifier_gates(double kappa, const Vector& gamma, bool normalized_spread) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw InvalidInputError("sparsifier: kappa must be positive and finite");
    }
    if (gamma.size() < 1 || !gamma.allFinite()) {
        throw InvalidInputError("sparsifier: gamma must be nonempty and finite");
    }
    const double mean = gamma.mean();
    double spread = (gamma.array() - mean).square().sum();
    if (normalized_spread) {
        spread /= static_cast<double>(gamma.size());
    }
    const double sharpness = kappa * (spread + 1e-2);
    Vector gates(gamma.size());
    for (Eigen::Index j = 0; j < gamma.size(); ++j) {
        gates(j) = sigmoid(sharpness * (gamma(j) - mean));
    }
    return gates;
}

Matrix sparsifier(double kappa, const Vector& gamma, bool normalized_spread) {
    return sparsifier_gates(kappa, gamma, normalized_spread).asDiagonal();
}

SparsityReport sparsity_report(const Vector& gates) {
    SparsityReport report;
    for (Eigen::Index j = 0; j < gates.size(); ++j) {
        if (gates(j) < 1e-6) {
            ++report.selected_out;
        } else if (gates(j) > 1.0 - 1e-6) {
            ++report.selected_in;
        } else {
            ++report.undecided;
        }
    }
    return report;
}

Vector beta_ridge(double lambda, const Matrix& X, const Vector& Y) {
    if (X.rows() != Y.size()) {
        throw InvalidInputError("beta_ridge: X and Y row counts differ");
    }
    if (!(lambda > 0.0)) {
        throw InvalidInputError("beta_ridge: lambda must be positive");
    }
    Matrix A = X.transpose() * X;
    A.diagonal().array() += lambda;
    return ridge_solve(A, X.transpose() * Y);
}

Vector beta_sparse(double lambda, double kappa, const Vector& gamma, const Matrix& X,
                   const Vector& Y, bool normalized_spread) {
    if (gamma.size() != X.cols()) {
        throw InvalidInputError("beta_sparse: gamma length does not match the feature count");
    }
    const Vector gates = sparsifier_gates(kappa, gamma, normalized_spread);
    const Matrix scaled = X * gates.asDiagonal();
    return gates.asDiagonal() * beta_ridge(lambda, scaled, Y);
}

Vector beta_aggregated(double lambda, double kappa, const Vector& gamma, double mu,
                       const Matrix& X, const Vector& Y, bool normalized_spread) {
    const double weight = sigmoid(mu);
    const Vector ridge = beta_ridge(lambda, X, Y);
    const Vector sparse = beta_sparse(lambda, kappa, gamma, X, Y, normalized_spread);
    return weight * ridge + (1.0 - weight) * sparse;
}

Vector beta_family(FamilyTag family, const RegParams& theta, const Matrix& X, const Vector& Y,
                   bool normalized_spread) {
    validate_params(theta, family, X.cols());
    switch (family) {
        case FamilyTag::Ridge:
            return beta_ridge(theta.lambda, X, Y);
        case FamilyTag::SparseRidge:
            return beta_sparse(theta.lambda, theta.kappa, theta.gamma, X, Y, normalized_spread);
        case FamilyTag::Aggregated:
            return beta_aggregated(theta.lambda, theta.kappa, theta.gamma, theta.mu, X, Y,
                                   normalized_spread);
    }
    throw InvalidInputError("beta_family: unknown family");
}

Vector predict(const Vector& beta, const Matrix& X_raw, const StandardizationMeta& meta) {
    if (beta.size() != X_raw.cols()) {
        throw InvalidInputError("predict: beta length does not match the feature count");
    }
    if (meta.x_mean.size() != beta.size() || meta.x_scale.size() != beta.size()) {
        throw InvalidInputError("predict: standardization meta does not match the feature count");
    }
    Vector standardized_pred(X_raw.rows());
    const Vector scaled_beta = beta.array() / meta.x_scale.array();
    standardized_pred = X_raw * scaled_beta;
    standardized_pred.array() -= meta.x_mean.dot(scaled_beta);
    return (standardized_pred.array() * meta.y_scale + meta.y_mean).matrix();
}

}  // namespace permreg
