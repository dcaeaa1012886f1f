#ifndef PERMREG_CRITERION_HPP
#define PERMREG_CRITERION_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "permreg/estimators.hpp"

namespace permreg {

// A fixed set of T response permutations. Sampled once per run and held
// fixed across all optimizer iterations; regeneration from (seed, T, n) is
// bit-identical.
struct PermutationSet {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint32_t>> perms;

    std::size_t size() const { return perms.size(); }
};

// T independent uniform permutations of {0,...,n-1} via seeded Fisher-Yates.
// T = 0 yields an empty set (the criterion then degrades to the plain
// empirical risk). n < 2 is rejected.
PermutationSet make_permutations(std::size_t n, std::size_t T, std::uint64_t seed);

// Applies perm to v: out_i = v_{perm(i)}.
Vector apply_permutation(const std::vector<std::uint32_t>& perm, const Vector& v);

// Everything the criterion needs besides theta: the estimator family, the
// fixed permutations, and the differentiability guard. With
// kink_subgradient_zero the gradient uses a 0 subgradient at kinks instead
// of raising NondifferentiablePointError.
struct CriterionSpec {
    FamilyTag family = FamilyTag::Ridge;
    PermutationSet perms;
    double guard_eps = 1e-12;
    bool kink_subgradient_zero = false;
    bool normalized_spread = false;  // forwarded to the sparsifier
};

// Instrumentation shared by the criterion and the optimizer. A "fit" is one
// estimator evaluation for one (X, Y') pair; every criterion evaluation
// performs exactly perms.size() + 1 of them.
struct WorkCounter {
    std::uint64_t evaluations = 0;      // criterion value(+gradient) evaluations
    std::uint64_t forward_fits = 0;     // one per criterion term
    std::uint64_t factorizations = 0;   // Cholesky factorizations
    std::uint64_t forward_solves = 0;   // triangular solves in forward fits
    std::uint64_t gradient_solves = 0;  // adjoint solves for the gradient
};

// Criterion value for a parameter bundle on standardized data:
//   ||Y - X·beta(theta, X, Y)|| + (1/T) Σ_t | 1 - ||π_t(Y) - X·beta(theta, X, π_t(Y))|| |
// in the RMS norm. The first term fits the data; each permutation term
// refits beta on the permuted response and is penalized for beating the
// intercept model on it. Y must be standardized (RMS norm 1, mean 0).
double bkks_value(const CriterionSpec& spec, const RegParams& theta, const Matrix& X,
                  const Vector& Y, WorkCounter* work = nullptr);

// Empirical-risk function handle: (X, Y, theta) -> nonnegative risk.
using EmpiricalRisk = std::function<double(const Matrix&, const Vector&, const RegParams&)>;

// Generic permutation-augmented criterion for an arbitrary risk:
//   er(X, Y, theta) + (1/T) Σ_t | er(X0, Y, theta) - er(X, π_t(Y), theta) |
// where X0 is the intercept-only design (first column ones, the rest zero).
// bkks_value equals this form specialized to the RMS residual risk on a
// standardized response, where er(X0, Y, theta) = 1.
double erg_value(const EmpiricalRisk& er, const RegParams& theta, const Matrix& X,
                 const Vector& Y, const PermutationSet& perms);

// Gradient of bkks_value with respect to the family's active components,
// in natural parameterization. Components a family does not read come back
// zero-sized/zero.
struct CriterionGradient {
    double value = 0.0;  // criterion value at theta (byproduct of the evaluation)
    double d_lambda = 0.0;
    double d_kappa = 0.0;
    Vector d_gamma;  // empty for Ridge
    double d_mu = 0.0;
};

// Exact gradient via closed-form differentiation through the ridge solves,
// reusing each evaluation's Cholesky factors for the adjoint solves. Raises
// NondifferentiablePointError when a residual norm or an absolute-value
// argument is within guard_eps of a kink (unless kink_subgradient_zero).
CriterionGradient criterion_gradient(const CriterionSpec& spec, const RegParams& theta,
                                     const Matrix& X, const Vector& Y,
                                     WorkCounter* work = nullptr);

}  // namespace permreg

#endif  // PERMREG_CRITERION_HPP
