#ifndef PERMREG_ESTIMATORS_HPP
#define PERMREG_ESTIMATORS_HPP

#include <cstddef>
#include <string>

#include "permreg/linalg.hpp"

namespace permreg {

// The three closed-form estimator families. Each reads a subset of the
// regularization parameter bundle:
//   Ridge       — lambda only
//   SparseRidge — lambda, kappa, gamma
//   Aggregated  — lambda, kappa, gamma, mu
enum class FamilyTag { Ridge, SparseRidge, Aggregated };

std::string family_name(FamilyTag family);
FamilyTag family_from_name(const std::string& name);

// Regularization parameter bundle theta = (lambda, kappa, gamma, mu).
struct RegParams {
    double lambda = 1e3;
    double kappa = 0.1;
    Vector gamma;  // length p, zero-initialized by default_params
    double mu = 0.0;
};

// Table defaults: lambda 10^3, kappa 0.1, gamma 0_p, mu 0.
RegParams default_params(Eigen::Index p);

// Validates the components a family reads (positivity, finiteness, gamma
// length). Throws InvalidInputError.
void validate_params(const RegParams& theta, FamilyTag family, Eigen::Index p);

// Overflow-safe logistic sigmoid; the exponent is clamped to ±500 so extreme
// arguments saturate to exactly 0 or 1 instead of producing NaN.
double sigmoid(double z);

// Per-feature sigmoid gates s_j = sigmoid(kappa * (sigma² + 10⁻²) * (gamma_j - mean(gamma)))
// where sigma² is the sum of squared deviations of gamma (unnormalized).
// With normalized_spread the mean of squared deviations is used instead
// (experimentation knob; not the default behavior).
Vector sparsifier_gates(double kappa, const Vector& gamma, bool normalized_spread = false);

// The gates as a diagonal p×p matrix, entries in (0,1).
Matrix sparsifier(double kappa, const Vector& gamma, bool normalized_spread = false);

// Counts gates numerically saturated below 1e-6 (selected out) and above
// 1 - 1e-6 (selected in); the rest are undecided.
struct SparsityReport {
    std::size_t selected_in = 0;
    std::size_t selected_out = 0;
    std::size_t undecided = 0;
};
SparsityReport sparsity_report(const Vector& gates);

// Ridge estimator: (XᵀX + lambda I)⁻¹ XᵀY.
Vector beta_ridge(double lambda, const Matrix& X, const Vector& Y);

// Sparse-ridge estimator: S · ridge(lambda, X·S, Y) with S = sparsifier(kappa, gamma).
Vector beta_sparse(double lambda, double kappa, const Vector& gamma, const Matrix& X,
                   const Vector& Y, bool normalized_spread = false);

// Aggregated estimator: sigmoid(mu) · beta_ridge + (1 - sigmoid(mu)) · beta_sparse.
Vector beta_aggregated(double lambda, double kappa, const Vector& gamma, double mu,
                       const Matrix& X, const Vector& Y, bool normalized_spread = false);

// Dispatch on the family tag.
Vector beta_family(FamilyTag family, const RegParams& theta, const Matrix& X, const Vector& Y,
                   bool normalized_spread = false);

// Applies a model fitted on standardized data to raw inputs and returns
// predictions on the original response scale.
Vector predict(const Vector& beta, const Matrix& X_raw, const StandardizationMeta& meta);

}  // namespace permreg

#endif  // PERMREG_ESTIMATORS_HPP
