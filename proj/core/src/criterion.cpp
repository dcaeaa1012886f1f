#include "permreg/criterion.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "permreg/errors.hpp"
#include "permreg/rng.hpp"

namespace permreg {

PermutationSet make_permutations(std::size_t n, std::size_t T, std::uint64_t seed) {
    if (n < 2) {
        throw InvalidInputError("make_permutations: n must be at least 2");
    }
    PermutationSet set;
    set.n = n;
    set.seed = seed;
    set.perms.reserve(T);
    Rng rng(seed);
    std::vector<std::uint32_t> identity(n);
    std::iota(identity.begin(), identity.end(), 0u);
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<std::uint32_t> perm = identity;
        rng.shuffle(perm);
        set.perms.push_back(std::move(perm));
    }
    return set;
}

Vector apply_permutation(const std::vector<std::uint32_t>& perm, const Vector& v) {
    if (static_cast<Eigen::Index>(perm.size()) != v.size()) {
        throw InvalidInputError("apply_permutation: length mismatch");
    }
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out(i) = v(perm[static_cast<std::size_t>(i)]);
    }
    return out;
}

namespace {

// Per-theta state shared by all T+1 criterion terms: the Gram matrix and the
// factorization(s) of the regularized normal equations. Only the right-hand
// side changes between terms, so each factorization is computed once and
// reused for every fit and every adjoint solve.
struct FamilyState {
    FamilyTag family = FamilyTag::Ridge;
    double lambda = 0.0;
    double agg_weight = 1.0;  // sigmoid(mu); 1 for Ridge, 0 for SparseRidge
    Vector gates;             // sparsifier diagonal (empty for Ridge)
    Matrix gram;              // XᵀX
    std::optional<CholeskyFactor> ridge_chol;   // XᵀX + lambda I
    std::optional<CholeskyFactor> sparse_chol;  // S XᵀX S + lambda I
};

bool uses_ridge_branch(const FamilyState& state) {
    return state.family != FamilyTag::SparseRidge;
}

bool uses_sparse_branch(const FamilyState& state) {
    return state.family != FamilyTag::Ridge;
}

FamilyState prepare_family_state(const CriterionSpec& spec, const RegParams& theta,
                                 const Matrix& X, WorkCounter* work) {
    FamilyState state;
    state.family = spec.family;
    state.lambda = theta.lambda;
    state.gram = X.transpose() * X;

    if (uses_ridge_branch(state)) {
        Matrix A = state.gram;
        A.diagonal().array() += theta.lambda;
        state.ridge_chol.emplace(A);
        if (work) ++work->factorizations;
    }
    if (uses_sparse_branch(state)) {
        state.gates = sparsifier_gates(theta.kappa, theta.gamma, spec.normalized_spread);
        Matrix A = state.gates.asDiagonal() * state.gram * state.gates.asDiagonal();
        A.diagonal().array() += theta.lambda;
        state.sparse_chol.emplace(A);
        if (work) ++work->factorizations;
    }
    state.agg_weight = state.family == FamilyTag::Ridge        ? 1.0
                       : state.family == FamilyTag::SparseRidge ? 0.0
                                                                : sigmoid(theta.mu);
    return state;
}

// One fit of the family estimator against a (possibly permuted) response.
struct TermFit {
    double value = 0.0;  // RMS norm of the family residual
    Vector residual;     // family residual
    Vector beta_r;       // ridge branch coefficients
    Vector residual_r;
    Vector b;            // sparse branch pre-gate coefficients
    Vector residual_s;
};

TermFit fit_term(const FamilyState& state, const Matrix& X, const Vector& y,
                 WorkCounter* work) {
    TermFit fit;
    const Vector xty = X.transpose() * y;
    if (uses_ridge_branch(state)) {
        fit.beta_r = state.ridge_chol->solve(xty);
        fit.residual_r = y - X * fit.beta_r;
        if (work) ++work->forward_solves;
    }
    if (uses_sparse_branch(state)) {
        fit.b = state.sparse_chol->solve(state.gates.cwiseProduct(xty));
        fit.residual_s = y - X * state.gates.cwiseProduct(fit.b);
        if (work) ++work->forward_solves;
    }
    switch (state.family) {
        case FamilyTag::Ridge:
            fit.residual = fit.residual_r;
            break;
        case FamilyTag::SparseRidge:
            fit.residual = fit.residual_s;
            break;
        case FamilyTag::Aggregated:
            fit.residual =
                state.agg_weight * fit.residual_r + (1.0 - state.agg_weight) * fit.residual_s;
            break;
    }
    fit.value = norm2(fit.residual);
    if (work) ++work->forward_fits;
    return fit;
}

// Accumulates d(outer_weight * value_of_term)/d(lambda, gates, mu) for one
// term via adjoint solves against the shared factorizations.
struct GradientAccumulator {
    double d_lambda = 0.0;
    Vector d_gates;
    double d_mu = 0.0;
};

void accumulate_term_gradient(const FamilyState& state, const Matrix& X, const TermFit& fit,
                              double outer_weight, GradientAccumulator& accum,
                              WorkCounter* work) {
    const double n = static_cast<double>(X.rows());
    const double scale = outer_weight / (n * fit.value);
    const Vector c = X.transpose() * fit.residual;

    if (uses_ridge_branch(state) && state.agg_weight > 0.0) {
        const Vector adjoint = state.ridge_chol->solve(c);
        accum.d_lambda += scale * state.agg_weight * adjoint.dot(fit.beta_r);
        if (work) ++work->gradient_solves;
    }
    if (uses_sparse_branch(state) && state.agg_weight < 1.0) {
        const double branch = 1.0 - state.agg_weight;
        // Xᵀ of the sparse-branch residual; equals c unless aggregated.
        const Vector h = state.family == FamilyTag::Aggregated
                             ? Vector(X.transpose() * fit.residual_s)
                             : c;
        const Vector adjoint = state.sparse_chol->solve(state.gates.cwiseProduct(c));
        const Vector gram_sw = state.gram * state.gates.cwiseProduct(adjoint);
        accum.d_lambda += scale * branch * adjoint.dot(fit.b);
        accum.d_gates.noalias() +=
            (-scale * branch) *
            (c.cwiseProduct(fit.b) + adjoint.cwiseProduct(h) - gram_sw.cwiseProduct(fit.b));
        if (work) ++work->gradient_solves;
    }
    if (state.family == FamilyTag::Aggregated) {
        const double dweight = state.agg_weight * (1.0 - state.agg_weight);
        accum.d_mu += scale * dweight * fit.residual.dot(fit.residual_r - fit.residual_s);
    }
}

void check_standardized(const Vector& Y) {
    if (std::abs(norm2(Y) - 1.0) > 1e-6) {
        throw ContractViolationError(
            "criterion: the response must be standardized (RMS norm 1); got norm " +
            std::to_string(norm2(Y)));
    }
}

void check_shapes(const CriterionSpec& spec, const RegParams& theta, const Matrix& X,
                  const Vector& Y) {
    if (X.rows() != Y.size()) {
        throw InvalidInputError("criterion: X and Y row counts differ");
    }
    if (!spec.perms.perms.empty() &&
        spec.perms.n != static_cast<std::size_t>(Y.size())) {
        throw InvalidInputError("criterion: permutation length does not match the sample size");
    }
    validate_params(theta, spec.family, X.cols());
}

// Shared forward/backward evaluation. The gradient path raises
// NondifferentiablePointError at kinks unless the spec opts into the
// 0-subgradient convention, in which case the offending term contributes
// nothing.
CriterionGradient evaluate(const CriterionSpec& spec, const RegParams& theta, const Matrix& X,
                           const Vector& Y, bool want_gradient, WorkCounter* work) {
    check_shapes(spec, theta, X, Y);
    check_standardized(Y);
    if (work) ++work->evaluations;

    const FamilyState state = prepare_family_state(spec, theta, X, work);
    const std::size_t T = spec.perms.size();

    GradientAccumulator accum;
    accum.d_gates = Vector::Zero(X.cols());

    const auto handle_kink = [&](const std::string& what) {
        if (!spec.kink_subgradient_zero) {
            throw NondifferentiablePointError(what);
        }
    };

    CriterionGradient result;

    const TermFit direct = fit_term(state, X, Y, work);
    result.value = direct.value;
    if (want_gradient) {
        if (direct.value <= spec.guard_eps) {
            handle_kink("criterion gradient: direct-fit residual norm is at the kink");
        } else {
            accumulate_term_gradient(state, X, direct, 1.0, accum, work);
        }
    }

    double perm_sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const Vector permuted = apply_permutation(spec.perms.perms[t], Y);
        const TermFit fit = fit_term(state, X, permuted, work);
        const double gap = 1.0 - fit.value;
        perm_sum += std::abs(gap);
        if (want_gradient) {
            if (fit.value <= spec.guard_eps) {
                handle_kink("criterion gradient: permutation-term residual norm is at the kink (t=" +
                            std::to_string(t) + ")");
            } else if (std::abs(gap) <= spec.guard_eps) {
                handle_kink(
                    "criterion gradient: permutation term sits at the absolute-value kink (t=" +
                    std::to_string(t) + ")");
            } else {
                const double outer = -(gap > 0.0 ? 1.0 : -1.0) / static_cast<double>(T);
                accumulate_term_gradient(state, X, fit, outer, accum, work);
            }
        }
    }
    if (T > 0) {
        result.value += perm_sum / static_cast<double>(T);
    }

    if (want_gradient) {
        result.d_lambda = accum.d_lambda;
        if (uses_sparse_branch(state)) {
            // Chain the gate gradient to (kappa, gamma) once, after all terms.
            const Vector& gamma = theta.gamma;
            const double p = static_cast<double>(gamma.size());
            const double mean = gamma.mean();
            const Vector dev = gamma.array() - mean;
            double spread = dev.squaredNorm();
            double spread_grad_factor = 2.0;
            if (spec.normalized_spread) {
                spread /= p;
                spread_grad_factor = 2.0 / p;
            }
            const double sharp_base = spread + 1e-2;
            const Vector q = accum.d_gates.array() * state.gates.array() *
                             (1.0 - state.gates.array());
            const double q_dot_dev = q.dot(dev);
            result.d_kappa = sharp_base * q_dot_dev;
            result.d_gamma = theta.kappa * spread_grad_factor * q_dot_dev * dev +
                             theta.kappa * sharp_base * (q.array() - q.mean()).matrix();
        }
        if (state.family == FamilyTag::Aggregated) {
            result.d_mu = accum.d_mu;
        }
        if (!std::isfinite(result.d_lambda) || !std::isfinite(result.d_kappa) ||
            !std::isfinite(result.d_mu) ||
            (result.d_gamma.size() > 0 && !result.d_gamma.allFinite())) {
            throw NumericalError("criterion gradient: non-finite component");
        }
    }
    if (!std::isfinite(result.value)) {
        throw NumericalError("criterion: non-finite value");
    }
    return result;
}

}  // namespace

double bkks_value(const CriterionSpec& spec, const RegParams& theta, const Matrix& X,
                  const Vector& Y, WorkCounter* work) {
    return evaluate(spec, theta, X, Y, /*want_gradient=*/false, work).value;
}

double erg_value(const EmpiricalRisk& er, const RegParams& theta, const Matrix& X,
                 const Vector& Y, const PermutationSet& perms) {
    if (!er) {
        throw InvalidInputError("erg_value: empty risk function");
    }
    double value = er(X, Y, theta);
    const std::size_t T = perms.size();
    if (T == 0) {
        return value;
    }
    // Intercept-only design: first column ones, remaining columns zero.
    Matrix intercept_only = Matrix::Zero(X.rows(), X.cols());
    intercept_only.col(0).setOnes();
    const double baseline = er(intercept_only, Y, theta);
    double gap_sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const Vector permuted = apply_permutation(perms.perms[t], Y);
        gap_sum += std::abs(baseline - er(X, permuted, theta));
    }
    return value + gap_sum / static_cast<double>(T);
}

CriterionGradient criterion_gradient(const CriterionSpec& spec, const RegParams& theta,
                                     const Matrix& X, const Vector& Y, WorkCounter* work) {
    return evaluate(spec, theta, X, Y, /*want_gradient=*/true, work);
}

}  // namespace permreg
