#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <permreg/data.hpp>
#include <permreg/errors.hpp>
#include <permreg/eval.hpp>
#include <permreg/optimizer.hpp>

#include "test_util.hpp"

using namespace permreg;

TEST_CASE("adam_step with a zero gradient moves nothing") {
    AdamConfig cfg;
    const auto [state, delta] = adam_step(make_adam_state(3), Vector::Zero(3), cfg, 1);
    CHECK(delta.isZero());
    CHECK(state.m.isZero());
    CHECK(state.v.isZero());
}

TEST_CASE("adam_step matches the hand-computed first step") {
    AdamConfig cfg;  // lr 0.5, beta1 0.5, beta2 0.9, eps 1e-8
    Vector grad(1);
    grad << 1.0;
    const auto [state, delta] = adam_step(make_adam_state(1), grad, cfg, 1);
    CHECK(state.m(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(state.v(0) == doctest::Approx(0.1).epsilon(1e-15));
    // m_hat = 1, v_hat = 1, delta = -0.5 / (1 + 1e-8)
    CHECK(delta(0) == doctest::Approx(-0.5 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("the first adam step opposes the gradient sign") {
    AdamConfig cfg;
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Vector grad(1);
        grad << (rng.uniform01() < 0.5 ? -1.0 : 1.0) * std::pow(10.0, rng.uniform(-6.0, 6.0));
        const auto [state, delta] = adam_step(make_adam_state(1), grad, cfg, 1);
        CHECK(delta(0) * grad(0) < 0.0);
    }
}

TEST_CASE("adam_step rejects non-finite gradients and bad step indices") {
    AdamConfig cfg;
    Vector bad(1);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(adam_step(make_adam_state(1), bad, cfg, 1), DivergedError);
    CHECK_THROWS_AS(adam_step(make_adam_state(1), Vector::Zero(1), cfg, 0), InvalidInputError);
    CHECK_THROWS_AS(adam_step(make_adam_state(2), Vector::Zero(1), cfg, 1), InvalidInputError);
}

TEST_CASE("perturb_retry nudges within the documented bound and is deterministic") {
    RegParams theta = default_params(4);
    theta.lambda = 100.0;
    theta.kappa = 0.5;
    theta.gamma << 1.0, -2.0, 0.0, 3.0;
    theta.mu = 1.5;

    const RegParams once = perturb_retry(theta, FamilyTag::Aggregated, 1, 99);
    const RegParams again = perturb_retry(theta, FamilyTag::Aggregated, 1, 99);
    CHECK(once.lambda == again.lambda);
    CHECK(once.gamma == again.gamma);

    const double bound = 1e-6 * (1.0 + std::max({std::abs(theta.lambda), std::abs(theta.kappa),
                                                  theta.gamma.cwiseAbs().maxCoeff(),
                                                  std::abs(theta.mu)}));
    CHECK(std::abs(once.lambda - theta.lambda) <= bound);
    CHECK(std::abs(once.kappa - theta.kappa) <= bound);
    CHECK((once.gamma - theta.gamma).cwiseAbs().maxCoeff() <= bound);
    CHECK(std::abs(once.mu - theta.mu) <= bound);

    CHECK(perturb_retry(theta, FamilyTag::Aggregated, 2, 99).lambda != once.lambda);
}

TEST_CASE("perturb_retry gives up after five attempts") {
    CHECK_THROWS_AS(perturb_retry(default_params(2), FamilyTag::Ridge, 6, 0), DivergedError);
}

TEST_CASE("train on pure noise shrinks far below the least-squares fit") {
    // Monte-Carlo oracle: on data with no signal the trained model should
    // stay close to the intercept model while plain least squares overfits.
    // Measured over these 20 fixed seeds: mean ||beta_hat||/||beta_ols|| =
    // 0.285 (frozen bound 0.35) and mean train R² = 0.044.
    const std::size_t n = 100, p = 20;
    double ratio_sum = 0.0;
    double train_r2_sum = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(1000 + s);
        const Matrix X = testutil::random_matrix(rng, n, p);
        const Vector Y = testutil::random_vector(rng, n);

        AdamConfig cfg;
        const FitResult fit = train(FamilyTag::Ridge, X, Y, cfg, 30, 500 + s);

        Dataset raw;
        raw.X = X;
        raw.Y = Y;
        auto [std_data, meta] = standardize(raw);
        const Vector beta_ols = std_data.X.colPivHouseholderQr().solve(std_data.Y);
        const double ratio = fit.beta_hat.norm() / beta_ols.norm();
        CHECK(ratio < 1.0);  // never fits harder than plain least squares
        ratio_sum += ratio;

        const Vector pred = predict(fit.beta_hat, X, fit.meta);
        train_r2_sum += r2_score(Y, pred);
    }
    const double mean_ratio = ratio_sum / seeds;
    const double mean_train_r2 = train_r2_sum / seeds;
    CAPTURE(mean_ratio);
    CAPTURE(mean_train_r2);
    CHECK(mean_ratio <= 0.35);
    CHECK(mean_train_r2 >= -0.05);
    CHECK(mean_train_r2 <= 0.30);
}

TEST_CASE("scenario B training converges in at most a hundred steps") {
    ScenarioConfig cfg;
    cfg.scenario = Scenario::B;
    cfg.seed = 1;
    const ScenarioData data = generate_scenario(cfg);
    AdamConfig adam;
    const FitResult fit = train(FamilyTag::Ridge, data.train.X, data.train.Y, adam, 30, 1);
    CHECK(fit.converged);
    CHECK(fit.iterations <= 100);
}

TEST_CASE("an infinite tolerance stops after one step with a two-entry trace") {
    Rng rng(11);
    const Matrix X = testutil::random_matrix(rng, 30, 4);
    const Vector Y = testutil::random_vector(rng, 30);
    AdamConfig cfg;
    cfg.tolerance = std::numeric_limits<double>::infinity();
    const FitResult fit = train(FamilyTag::Ridge, X, Y, cfg, 5, 7);
    CHECK(fit.converged);
    CHECK(fit.iterations == 1);
    CHECK(fit.criterion_trace.size() == 2);
}

TEST_CASE("train is bit-reproducible for identical inputs and seed") {
    Rng rng(13);
    const Matrix X = testutil::random_matrix(rng, 40, 6);
    const Vector Y = testutil::random_vector(rng, 40);
    AdamConfig cfg;
    const FitResult first = train(FamilyTag::SparseRidge, X, Y, cfg, 10, 77);
    const FitResult second = train(FamilyTag::SparseRidge, X, Y, cfg, 10, 77);
    CHECK(first.beta_hat == second.beta_hat);
    CHECK(first.theta_hat.lambda == second.theta_hat.lambda);
    CHECK(first.theta_hat.gamma == second.theta_hat.gamma);
    CHECK(first.criterion_trace == second.criterion_trace);
    CHECK(first.iterations == second.iterations);
}

TEST_CASE("the criterion trace is finite and the invariants hold") {
    Rng rng(17);
    const Matrix X = testutil::random_matrix(rng, 50, 8);
    Vector Y = X.col(0) * 2.0 + testutil::random_vector(rng, 50, 0.5);
    AdamConfig cfg;
    for (FamilyTag family :
         {FamilyTag::Ridge, FamilyTag::SparseRidge, FamilyTag::Aggregated}) {
        const FitResult fit = train(family, X, Y, cfg, 10, 3);
        CHECK(fit.criterion_trace.size() == fit.iterations + 1);
        CHECK(fit.iterations <= cfg.max_iter);
        for (double value : fit.criterion_trace) CHECK(std::isfinite(value));
        CHECK(fit.beta_hat.allFinite());
        CHECK(std::isfinite(fit.theta_hat.lambda));
    }
}

TEST_CASE("work accounting: one criterion evaluation per step plus the final check") {
    Rng rng(19);
    const Matrix X = testutil::random_matrix(rng, 40, 5);
    const Vector Y = testutil::random_vector(rng, 40);
    AdamConfig cfg;
    const std::size_t T = 12;
    const FitResult fit = train(FamilyTag::Ridge, X, Y, cfg, T, 5);
    CHECK(fit.work.evaluations == fit.iterations + 1);
    CHECK(fit.work.forward_fits == fit.work.evaluations * (T + 1));
}

TEST_CASE("the trace trends downward (weak form)") {
    ScenarioConfig cfg;
    cfg.scenario = Scenario::B;
    cfg.seed = 9;
    const ScenarioData data = generate_scenario(cfg);
    AdamConfig adam;
    for (FamilyTag family : {FamilyTag::Ridge, FamilyTag::SparseRidge}) {
        const FitResult fit = train(family, data.train.X, data.train.Y, adam, 30, 9);
        const auto min_it =
            std::min_element(fit.criterion_trace.begin(), fit.criterion_trace.end());
        const std::size_t min_pos =
            static_cast<std::size_t>(min_it - fit.criterion_trace.begin());
        const bool min_near_end =
            min_pos + 1 >= fit.criterion_trace.size() -
                               std::max<std::size_t>(1, fit.criterion_trace.size() / 10);
        const bool improved =
            fit.criterion_trace.front() - *min_it > 10.0 * adam.tolerance;
        CHECK((min_near_end || improved));
    }
}

TEST_CASE("alternative stop rules also converge") {
    Rng rng(23);
    const Matrix X = testutil::random_matrix(rng, 30, 4);
    const Vector Y = testutil::random_vector(rng, 30);

    AdamConfig grad_rule;
    grad_rule.stop_rule = StopRule::GradNorm;
    grad_rule.tolerance = 1e-3;
    const FitResult by_grad = train(FamilyTag::Ridge, X, Y, grad_rule, 5, 31);
    CHECK(by_grad.iterations <= grad_rule.max_iter);

    AdamConfig theta_rule;
    theta_rule.stop_rule = StopRule::ThetaChange;
    theta_rule.tolerance = 1e-5;
    const FitResult by_theta = train(FamilyTag::Ridge, X, Y, theta_rule, 5, 31);
    CHECK(by_theta.iterations <= theta_rule.max_iter);
}

TEST_CASE("train rejects degenerate data") {
    Matrix X = Matrix::Ones(10, 2);  // constant columns
    Vector Y = Vector::LinSpaced(10, 0.0, 1.0);
    AdamConfig cfg;
    CHECK_THROWS_AS(train(FamilyTag::Ridge, X, Y, cfg, 5, 1), DegenerateDataError);
}

TEST_CASE("an initialization override is honored") {
    Rng rng(29);
    const Matrix X = testutil::random_matrix(rng, 25, 3);
    const Vector Y = testutil::random_vector(rng, 25);
    AdamConfig cfg;
    cfg.max_iter = 0;  // no steps: the result is the initialization
    TrainOptions options;
    RegParams init = default_params(3);
    init.lambda = 42.0;
    options.init = init;
    const FitResult fit = train(FamilyTag::Ridge, X, Y, cfg, 3, 1, options);
    CHECK(fit.iterations == 0);
    CHECK(fit.theta_hat.lambda == 42.0);
    CHECK_FALSE(fit.converged);
}
