#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include <permreg/errors.hpp>
#include <permreg/linalg.hpp>

#include "test_util.hpp"

using namespace permreg;

TEST_CASE("norm2 of the zero vector is zero") {
    Vector v = Vector::Zero(4);
    CHECK(norm2(v) == 0.0);
}

TEST_CASE("norm2 of a constant vector is the absolute value") {
    Vector v = Vector::Constant(7, -3.5);
    CHECK(norm2(v) == doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("norm2 of (1,2,3) is sqrt(14/3)") {
    Vector v(3);
    v << 1, 2, 3;
    CHECK(norm2(v) == doctest::Approx(std::sqrt(14.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("norm2 rejects non-finite entries") {
    Vector v(2);
    v << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(norm2(v), InvalidInputError);
    v(1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(norm2(v), InvalidInputError);
}

TEST_CASE("norm2 is invariant under permutations and absolutely homogeneous") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        Vector v = testutil::random_vector(rng, 1 + static_cast<Eigen::Index>(rng.uniform_below(40)));
        std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
        rng.shuffle(order);
        Vector permuted(v.size());
        for (std::size_t i = 0; i < order.size(); ++i) permuted(static_cast<Eigen::Index>(i)) = v(order[i]);
        CHECK(norm2(permuted) == doctest::Approx(norm2(v)).epsilon(1e-13));

        const double c = rng.uniform(-5.0, 5.0);
        CHECK(norm2(c * v) == doctest::Approx(std::abs(c) * norm2(v)).epsilon(1e-12));
    }
}

TEST_CASE("ridge_solve on the identity returns the right-hand side") {
    Vector b(3);
    b << 1, 2, 3;
    Vector x = ridge_solve(Matrix::Identity(3, 3), b);
    CHECK((x - b).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("ridge_solve on a diagonal system") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 2;
    A(1, 1) = 4;
    Vector b(2);
    b << 2, 4;
    Vector x = ridge_solve(A, b);
    CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ridge_solve on a dense 2x2 system") {
    Matrix A(2, 2);
    A << 2, 1, 1, 2;
    Vector b(2);
    b << 3, 3;
    Vector x = ridge_solve(A, b);
    CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(x(1) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("ridge_solve reports the failing pivot on non-PD input") {
    Matrix A = Matrix::Identity(3, 3);
    A(1, 1) = -1.0;
    Vector b = Vector::Ones(3);
    try {
        ridge_solve(A, b);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.pivot() == 1);
    }
}

TEST_CASE("ridge_solve residuals stay below 1e-8 on random SPD systems") {
    Rng rng(5);
    for (Eigen::Index p : {2, 10, 50, 200}) {
        Matrix B = testutil::random_matrix(rng, p, p);
        Matrix A = B.transpose() * B + Matrix::Identity(p, p);
        Vector b = testutil::random_vector(rng, p, 3.0);
        Vector x = ridge_solve(A, b);
        const double residual = (A * x - b).lpNorm<Eigen::Infinity>();
        CHECK(residual <= 1e-8 * (1.0 + b.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("standardize maps (1,3) to (-1,1) with mean 2 and scale 1") {
    Dataset data;
    data.X = Matrix(2, 1);
    data.X << 0.0, 1.0;
    data.Y = Vector(2);
    data.Y << 1.0, 3.0;
    auto [out, meta] = standardize(data);
    CHECK(out.Y(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(out.Y(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(meta.y_mean == doctest::Approx(2.0));
    CHECK(meta.y_scale == doctest::Approx(1.0));
}

TEST_CASE("standardize leaves an already standardized response unchanged") {
    Dataset data;
    data.X = Matrix(2, 1);
    data.X << -1.0, 1.0;
    data.Y = Vector(2);
    data.Y << -1.0, 1.0;
    auto [out, meta] = standardize(data);
    CHECK(out.Y(0) == -1.0);
    CHECK(out.Y(1) == 1.0);
    CHECK(meta.y_mean == 0.0);
    CHECK(meta.y_scale == 1.0);
}

TEST_CASE("standardize rejects a constant column and names it") {
    Dataset data;
    data.X = Matrix(3, 2);
    data.X << 1, 5, 2, 5, 3, 5;
    data.Y = Vector(3);
    data.Y << 1, 2, 3;
    try {
        standardize(data);
        FAIL("expected DegenerateDataError");
    } catch (const DegenerateDataError& e) {
        CHECK(e.column() == 1);
    }
}

TEST_CASE("standardize rejects a constant response") {
    Dataset data;
    data.X = Matrix(3, 1);
    data.X << 1, 2, 3;
    data.Y = Vector::Constant(3, 4.0);
    CHECK_THROWS_AS(standardize(data), DegenerateDataError);
}

TEST_CASE("standardized output has unit response norm and centered columns") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        Dataset data;
        data.X = testutil::random_matrix(rng, 40, 7, 2.5);
        data.X.array() += 4.0;
        data.Y = testutil::random_vector(rng, 40, 9.0);
        data.Y.array() -= 13.0;
        auto [out, meta] = standardize(data);
        CHECK(std::abs(norm2(out.Y) - 1.0) <= 1e-12);
        CHECK(std::abs(out.Y.mean()) <= 1e-12);
        for (Eigen::Index j = 0; j < out.X.cols(); ++j) {
            CHECK(std::abs(out.X.col(j).mean()) <= 1e-12);
            CHECK(std::abs(norm2(out.X.col(j)) - 1.0) <= 1e-12);
        }
        CHECK(meta.y_scale > 0.0);
    }
}

TEST_CASE("standardize can leave X untouched") {
    Rng rng(23);
    Dataset data;
    data.X = testutil::random_matrix(rng, 20, 3);
    data.X.array() += 2.0;
    data.Y = testutil::random_vector(rng, 20);
    auto [out, meta] = standardize(data, /*standardize_x=*/false);
    CHECK(out.X == data.X);
    CHECK(meta.x_mean.isZero());
    CHECK(meta.x_scale.isOnes());
    CHECK(std::abs(norm2(out.Y) - 1.0) <= 1e-12);
}

TEST_CASE("standardize needs at least two rows") {
    Dataset data;
    data.X = Matrix::Ones(1, 1);
    data.Y = Vector::Ones(1);
    CHECK_THROWS_AS(standardize(data), InvalidInputError);
}
