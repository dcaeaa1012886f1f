#include "permreg/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "permreg/errors.hpp"
#include "permreg/rng.hpp"

namespace permreg {

AdamState make_adam_state(Eigen::Index dim) {
    AdamState state;
    state.m = Vector::Zero(dim);
    state.v = Vector::Zero(dim);
    return state;
}

std::pair<AdamState, Vector> adam_step(const AdamState& state, const Vector& grad,
                                       const AdamConfig& cfg, std::size_t t) {
    if (t < 1) {
        throw InvalidInputError("adam_step: step index must be >= 1");
    }
    if (state.m.size() != grad.size() || state.v.size() != grad.size()) {
        throw InvalidInputError("adam_step: state and gradient dimensions differ");
    }
    if (!grad.allFinite()) {
        throw DivergedError("adam_step: non-finite gradient");
    }
    AdamState next;
    next.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
    next.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
    const double m_correction = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double v_correction = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    const Vector m_hat = next.m / m_correction;
    const Vector v_hat = next.v / v_correction;
    Vector delta =
        ((-cfg.learning_rate) * m_hat.array() / (v_hat.array().sqrt() + cfg.eps)).matrix();
    return {std::move(next), std::move(delta)};
}

RegParams perturb_retry(const RegParams& theta, FamilyTag family, std::size_t attempt,
                        std::uint64_t seed) {
    if (attempt > 5) {
        throw DivergedError("perturb_retry: giving up after 5 attempts");
    }
    Rng rng(derive_seed(seed, attempt));
    const auto jiggle = [&rng](double value) {
        return value * (1.0 + rng.uniform(-1.0, 1.0) * 1e-6);
    };
    RegParams out = theta;
    out.lambda = jiggle(out.lambda);
    if (family != FamilyTag::Ridge) {
        out.kappa = jiggle(out.kappa);
        for (Eigen::Index j = 0; j < out.gamma.size(); ++j) {
            out.gamma(j) = jiggle(out.gamma(j));
        }
    }
    if (family == FamilyTag::Aggregated) {
        out.mu = jiggle(out.mu);
    }
    return out;
}

namespace {

// lambda and kappa are optimized as log-values so positivity needs no
// projection; gamma and mu stay in natural space.
Eigen::Index packed_dim(FamilyTag family, Eigen::Index p) {
    switch (family) {
        case FamilyTag::Ridge:
            return 1;
        case FamilyTag::SparseRidge:
            return 2 + p;
        case FamilyTag::Aggregated:
            return 3 + p;
    }
    return 1;
}

Vector pack_params(const RegParams& theta, FamilyTag family) {
    Vector packed(packed_dim(family, theta.gamma.size()));
    packed(0) = std::log(theta.lambda);
    if (family != FamilyTag::Ridge) {
        packed(1) = std::log(theta.kappa);
        packed.segment(2, theta.gamma.size()) = theta.gamma;
    }
    if (family == FamilyTag::Aggregated) {
        packed(packed.size() - 1) = theta.mu;
    }
    return packed;
}

RegParams unpack_params(const Vector& packed, FamilyTag family, Eigen::Index p) {
    RegParams theta = default_params(p);
    theta.lambda = std::exp(packed(0));
    if (family != FamilyTag::Ridge) {
        theta.kappa = std::exp(packed(1));
        theta.gamma = packed.segment(2, p);
    }
    if (family == FamilyTag::Aggregated) {
        theta.mu = packed(packed.size() - 1);
    }
    return theta;
}

Vector pack_gradient(const CriterionGradient& grad, const RegParams& theta, FamilyTag family) {
    Vector packed = Vector::Zero(packed_dim(family, theta.gamma.size()));
    packed(0) = grad.d_lambda * theta.lambda;  // d/d(log lambda)
    if (family != FamilyTag::Ridge) {
        packed(1) = grad.d_kappa * theta.kappa;  // d/d(log kappa)
        packed.segment(2, theta.gamma.size()) = grad.d_gamma;
    }
    if (family == FamilyTag::Aggregated) {
        packed(packed.size() - 1) = grad.d_mu;
    }
    return packed;
}

}  // namespace

FitResult train(FamilyTag family, const Matrix& X, const Vector& Y, const AdamConfig& cfg,
                std::size_t T, std::uint64_t seed, const TrainOptions& options) {
    const auto start = std::chrono::steady_clock::now();

    Dataset raw;
    raw.X = X;
    raw.Y = Y;
    auto [data, meta] = standardize(raw, options.standardize_x);
    const Eigen::Index p = data.X.cols();

    CriterionSpec spec;
    spec.family = family;
    spec.perms = make_permutations(static_cast<std::size_t>(data.n()), T, derive_seed(seed, 0));
    spec.guard_eps = options.guard_eps;
    spec.kink_subgradient_zero = options.kink_subgradient_zero;
    spec.normalized_spread = options.normalized_spread;

    RegParams theta = options.init.value_or(default_params(p));
    if (theta.gamma.size() == 0) {
        theta.gamma = Vector::Zero(p);
    }
    validate_params(theta, family, p);

    const std::uint64_t perturb_stream = derive_seed(seed, 1);

    FitResult result;
    result.family = family;
    result.seed = seed;
    result.T = T;
    result.meta = meta;

    // Evaluates value+gradient at theta; on a kink or a numerical failure the
    // parameters are nudged and the evaluation retried (at most 5 times).
    std::size_t eval_index = 0;
    const auto evaluate_with_retry = [&](RegParams& point) {
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt > 0) {
                point = perturb_retry(point, family, attempt,
                                      derive_seed(perturb_stream, eval_index));
            }
            try {
                CriterionGradient ev =
                    criterion_gradient(spec, point, data.X, data.Y, &result.work);
                ++eval_index;
                return ev;
            } catch (const NondifferentiablePointError&) {
                if (attempt >= 5) throw DivergedError("train: stuck at a nondifferentiable point");
            } catch (const NumericalError&) {
                if (attempt >= 5) throw DivergedError("train: criterion evaluation keeps failing");
            }
        }
    };

    AdamState adam = make_adam_state(packed_dim(family, p));
    Vector packed = pack_params(theta, family);
    double prev_value = std::numeric_limits<double>::quiet_NaN();
    bool has_prev = false;
    std::size_t steps = 0;
    bool converged = false;

    while (true) {
        CriterionGradient ev = evaluate_with_retry(theta);
        result.criterion_trace.push_back(ev.value);

        if (cfg.stop_rule == StopRule::ValueChange && has_prev &&
            std::abs(ev.value - prev_value) < cfg.tolerance) {
            converged = true;
            break;
        }
        const Vector grad = pack_gradient(ev, theta, family);
        if (cfg.stop_rule == StopRule::GradNorm &&
            grad.lpNorm<Eigen::Infinity>() < cfg.tolerance) {
            converged = true;
            break;
        }
        if (steps == cfg.max_iter) {
            break;  // budget exhausted without convergence
        }
        auto [next_state, delta] = adam_step(adam, grad, cfg, steps + 1);
        if (cfg.stop_rule == StopRule::ThetaChange &&
            delta.lpNorm<Eigen::Infinity>() < cfg.tolerance) {
            converged = true;
            break;
        }
        adam = std::move(next_state);
        packed = pack_params(theta, family);  // theta may have been perturbed
        packed += delta;
        theta = unpack_params(packed, family, p);
        ++steps;
        has_prev = true;
        prev_value = ev.value;
    }

    result.theta_hat = theta;
    result.beta_hat = beta_family(family, theta, data.X, data.Y, options.normalized_spread);
    result.iterations = steps;
    result.converged = converged;
    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace permreg
