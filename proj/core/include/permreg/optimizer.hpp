#ifndef PERMREG_OPTIMIZER_HPP
#define PERMREG_OPTIMIZER_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "permreg/criterion.hpp"

namespace permreg {

// Convergence test applied to successive criterion evaluations.
enum class StopRule {
    ValueChange,  // |value_k - value_{k-1}| < tolerance (default)
    GradNorm,     // max-norm of the packed gradient < tolerance
    ThetaChange,  // max-norm of the parameter update < tolerance
};

// ADAM settings. Defaults are the working set used throughout: learning
// rate 0.5, beta1 0.5, beta2 0.9, tolerance 1e-4, at most 10^3 iterations.
struct AdamConfig {
    double learning_rate = 0.5;
    double beta1 = 0.5;
    double beta2 = 0.9;
    double eps = 1e-8;
    std::size_t max_iter = 1000;
    double tolerance = 1e-4;
    StopRule stop_rule = StopRule::ValueChange;
};

// First/second moment accumulators.
struct AdamState {
    Vector m;
    Vector v;
};

AdamState make_adam_state(Eigen::Index dim);

// One bias-corrected ADAM update at step index t >= 1. Returns the updated
// state and the parameter delta (to be added to the parameters). Throws
// DivergedError on a non-finite gradient.
std::pair<AdamState, Vector> adam_step(const AdamState& state, const Vector& grad,
                                       const AdamConfig& cfg, std::size_t t);

// Multiplies each active component of theta by (1 + u * 1e-6), u uniform in
// [-1, 1] drawn deterministically from (seed, attempt). Recovery path for
// nondifferentiable points; attempt > 5 raises DivergedError.
RegParams perturb_retry(const RegParams& theta, FamilyTag family, std::size_t attempt,
                        std::uint64_t seed);

struct TrainOptions {
    bool standardize_x = true;
    double guard_eps = 1e-12;
    bool kink_subgradient_zero = false;
    bool normalized_spread = false;
    std::optional<RegParams> init;  // overrides the table defaults
};

// Outcome of one training run. beta_hat lives on the standardized scale;
// meta maps predictions back to the raw response (see predict()).
struct FitResult {
    FamilyTag family = FamilyTag::Ridge;
    RegParams theta_hat;
    Vector beta_hat;
    StandardizationMeta meta;
    std::vector<double> criterion_trace;  // one value per evaluation, length iterations + 1
    std::size_t iterations = 0;           // ADAM steps taken
    bool converged = false;
    double wall_time_seconds = 0.0;
    std::uint64_t seed = 0;
    std::size_t T = 0;
    WorkCounter work;
};

// Trains one estimator family on raw data: standardizes internally, fixes
// the permutation set from the seed, and runs ADAM on the criterion until
// the stop rule fires or max_iter steps were taken. Fully reproducible from
// (inputs, seed).
FitResult train(FamilyTag family, const Matrix& X, const Vector& Y, const AdamConfig& cfg,
                std::size_t T, std::uint64_t seed, const TrainOptions& options = {});

}  // namespace permreg

#endif  // PERMREG_OPTIMIZER_HPP
