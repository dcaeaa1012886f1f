#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <permreg/errors.hpp>
#include <permreg/estimators.hpp>

#include "test_util.hpp"

using namespace permreg;

TEST_CASE("beta_ridge vanishes under heavy shrinkage") {
    Rng rng(3);
    Matrix X(100, 100);
    Vector Y(100);
    for (Eigen::Index i = 0; i < 100; ++i) {
        Y(i) = rng.uniform(-10.0, 10.0);
        for (Eigen::Index j = 0; j < 100; ++j) X(i, j) = rng.uniform(-10.0, 10.0);
    }
    const Vector beta = beta_ridge(1e12, X, Y);
    CHECK(beta.lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("beta_ridge on the identity design") {
    Matrix X = Matrix::Identity(2, 2);
    Vector Y(2);
    Y << 1, 2;
    const Vector beta = beta_ridge(1.0, X, Y);
    CHECK(beta(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(beta(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("beta_ridge scalar case matches the closed form") {
    Matrix X(2, 1);
    X << 1, 1;
    Vector Y(2);
    Y << 1, 3;
    const Vector beta = beta_ridge(2.0, X, Y);
    CHECK(beta(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("beta_ridge rejects mismatched shapes and nonpositive lambda") {
    Matrix X = Matrix::Ones(3, 2);
    Vector Y = Vector::Ones(2);
    CHECK_THROWS_AS(beta_ridge(1.0, X, Y), InvalidInputError);
    Vector Y3 = Vector::Ones(3);
    CHECK_THROWS_AS(beta_ridge(0.0, X, Y3), InvalidInputError);
}

TEST_CASE("ridge coefficient norm is non-increasing in lambda") {
    Rng rng(7);
    const Matrix X = testutil::random_matrix(rng, 30, 8);
    const Vector Y = testutil::random_vector(rng, 30);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda = 1e-3; lambda < 1e6; lambda *= 4.0) {
        const double current = beta_ridge(lambda, X, Y).norm();
        CHECK(current <= previous * (1.0 + 1e-12));
        previous = current;
    }
}

TEST_CASE("sparsifier gates are 1/2 at gamma = 0") {
    const Vector gates = sparsifier_gates(0.1, Vector::Zero(5));
    for (Eigen::Index j = 0; j < gates.size(); ++j) {
        CHECK(gates(j) == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("sparsifier saturates for widely separated gamma") {
    Vector gamma(2);
    gamma << 10.0, -10.0;
    const Vector gates = sparsifier_gates(0.1, gamma);
    CHECK(gates(0) >= 1.0 - 1e-80);
    CHECK(gates(1) < 1e-80);
}

TEST_CASE("sparsifier with a single feature returns 1/2") {
    Vector gamma(1);
    gamma << 5.0;
    const Vector gates = sparsifier_gates(1.0, gamma);
    CHECK(gates(0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sparsifier output lies strictly inside (0,1) before saturation") {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector gamma = testutil::random_vector(rng, 6, 0.5);
        const Vector gates = sparsifier_gates(0.2, gamma);
        for (Eigen::Index j = 0; j < gates.size(); ++j) {
            CHECK(gates(j) > 0.0);
            CHECK(gates(j) < 1.0);
        }
    }
}

TEST_CASE("sparsifier is invariant to shifting gamma by a constant") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector gamma = testutil::random_vector(rng, 7, 2.0);
        const double shift = rng.uniform(-50.0, 50.0);
        const Vector base = sparsifier_gates(0.3, gamma);
        const Vector shifted = sparsifier_gates(0.3, (gamma.array() + shift).matrix());
        for (Eigen::Index j = 0; j < base.size(); ++j) {
            CHECK(shifted(j) == doctest::Approx(base(j)).epsilon(1e-9));
        }
    }
}

TEST_CASE("sparsifier matrix form is diagonal") {
    Vector gamma(3);
    gamma << 1.0, 0.0, -1.0;
    const Matrix S = sparsifier(2.0, gamma);
    const Vector gates = sparsifier_gates(2.0, gamma);
    CHECK(S.rows() == 3);
    CHECK(S.cols() == 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            CHECK(S(i, j) == (i == j ? gates(i) : 0.0));
        }
    }
}

TEST_CASE("beta_sparse at gamma = 0 reduces to a half-scaled ridge fit") {
    Rng rng(13);
    const Matrix X = testutil::random_matrix(rng, 25, 6);
    const Vector Y = testutil::random_vector(rng, 25);
    const Vector sparse = beta_sparse(3.0, 0.7, Vector::Zero(6), X, Y);
    const Vector reference = 0.5 * beta_ridge(3.0, 0.5 * X, Y);
    CHECK((sparse - reference).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("a saturated-out gate removes its feature") {
    Rng rng(19);
    const Matrix X = testutil::random_matrix(rng, 20, 2);
    const Vector Y = testutil::random_vector(rng, 20);
    Vector gamma(2);
    gamma << 40.0, -40.0;
    const Vector beta = beta_sparse(1.0, 1.0, gamma, X, Y);
    CHECK(std::abs(beta(1)) < 1e-12);
}

TEST_CASE("beta_sparse vanishes under heavy shrinkage") {
    Rng rng(23);
    const Matrix X = testutil::random_matrix(rng, 30, 5);
    const Vector Y = testutil::random_vector(rng, 30);
    const Vector beta = beta_sparse(1e12, 0.5, testutil::random_vector(rng, 5), X, Y);
    CHECK(beta.lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("beta_aggregated at mu = 0 is the exact midpoint") {
    Rng rng(37);
    const Matrix X = testutil::random_matrix(rng, 22, 4);
    const Vector Y = testutil::random_vector(rng, 22);
    const Vector gamma = testutil::random_vector(rng, 4);
    const Vector ridge = beta_ridge(2.0, X, Y);
    const Vector sparse = beta_sparse(2.0, 0.4, gamma, X, Y);
    const Vector aggregated = beta_aggregated(2.0, 0.4, gamma, 0.0, X, Y);
    CHECK((aggregated - 0.5 * ridge - 0.5 * sparse).lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("beta_aggregated saturates to the ridge branch at mu = 40") {
    Rng rng(41);
    const Matrix X = testutil::random_matrix(rng, 18, 3);
    const Vector Y = testutil::random_vector(rng, 18);
    const Vector gamma = testutil::random_vector(rng, 3);
    const Vector ridge = beta_ridge(1.5, X, Y);
    const Vector sparse = beta_sparse(1.5, 0.3, gamma, X, Y);
    const Vector aggregated = beta_aggregated(1.5, 0.3, gamma, 40.0, X, Y);
    const double tol = 1e-12 * (1.0 + ridge.lpNorm<Eigen::Infinity>() +
                                sparse.lpNorm<Eigen::Infinity>());
    CHECK((aggregated - ridge).lpNorm<Eigen::Infinity>() <= tol);
}

TEST_CASE("beta_aggregated saturates to the sparse branch at mu = -40") {
    Rng rng(43);
    const Matrix X = testutil::random_matrix(rng, 18, 3);
    const Vector Y = testutil::random_vector(rng, 18);
    const Vector gamma = testutil::random_vector(rng, 3);
    const Vector ridge = beta_ridge(1.5, X, Y);
    const Vector sparse = beta_sparse(1.5, 0.3, gamma, X, Y);
    const Vector aggregated = beta_aggregated(1.5, 0.3, gamma, -40.0, X, Y);
    const double tol = 1e-12 * (1.0 + ridge.lpNorm<Eigen::Infinity>() +
                                sparse.lpNorm<Eigen::Infinity>());
    CHECK((aggregated - sparse).lpNorm<Eigen::Infinity>() <= tol);
}

TEST_CASE("all families are bit-deterministic") {
    Rng rng(47);
    const Matrix X = testutil::random_matrix(rng, 26, 5);
    const Vector Y = testutil::random_vector(rng, 26);
    RegParams theta = default_params(5);
    theta.lambda = 4.2;
    theta.kappa = 0.6;
    theta.gamma = testutil::random_vector(rng, 5);
    theta.mu = 0.8;
    for (FamilyTag family :
         {FamilyTag::Ridge, FamilyTag::SparseRidge, FamilyTag::Aggregated}) {
        const Vector first = beta_family(family, theta, X, Y);
        const Vector second = beta_family(family, theta, X, Y);
        CHECK(first == second);
    }
}

TEST_CASE("predict with a zero model returns the stored mean") {
    StandardizationMeta meta;
    meta.x_mean = Vector::Zero(3);
    meta.x_scale = Vector::Ones(3);
    meta.y_mean = 2.0;
    meta.y_scale = 1.0;
    const Matrix X = Matrix::Random(5, 3);
    const Vector pred = predict(Vector::Zero(3), X, meta);
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        CHECK(pred(i) == doctest::Approx(2.0).epsilon(1e-15));
    }
}

TEST_CASE("predict with identity meta and identity design returns beta") {
    StandardizationMeta meta;
    meta.x_mean = Vector::Zero(4);
    meta.x_scale = Vector::Ones(4);
    Vector beta(4);
    beta << 1.0, -2.0, 0.5, 3.0;
    const Vector pred = predict(beta, Matrix::Identity(4, 4), meta);
    CHECK((pred - beta).lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("predicting with beta = 0 after standardize recovers the raw mean") {
    Rng rng(53);
    Dataset data;
    data.X = testutil::random_matrix(rng, 15, 2);
    data.Y = testutil::random_vector(rng, 15, 4.0);
    data.Y.array() += 7.0;
    auto [standardized, meta] = standardize(data);
    const Vector pred = predict(Vector::Zero(2), data.X, meta);
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        CHECK(pred(i) == doctest::Approx(data.Y.mean()).epsilon(1e-12));
    }
}

TEST_CASE("sparsity_report buckets saturated gates") {
    Vector gates(4);
    gates << 1e-9, 0.5, 1.0 - 1e-9, 0.2;
    const SparsityReport report = sparsity_report(gates);
    CHECK(report.selected_out == 1);
    CHECK(report.selected_in == 1);
    CHECK(report.undecided == 2);
}

TEST_CASE("family names round-trip") {
    for (FamilyTag family :
         {FamilyTag::Ridge, FamilyTag::SparseRidge, FamilyTag::Aggregated}) {
        CHECK(family_from_name(family_name(family)) == family);
    }
    CHECK_THROWS_AS(family_from_name("nope"), InvalidInputError);
}
