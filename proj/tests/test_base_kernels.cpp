#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "seqkern/base_kernels.hpp"
#include "test_util.hpp"

using namespace seqkern;

TEST_CASE("kernel evaluation") {
    const Eigen::RowVector2d x(1, 2), y(3, 4);
    CHECK(kernel_eval(KernelSpec::linear(), x, y) == 11.0);
    CHECK(kernel_eval(KernelSpec::linear(0.5), x, y) == 5.5);
    CHECK(kernel_eval(KernelSpec::gaussian(0.3, 2.5), x, x) == 2.5);
    CHECK(kernel_eval(KernelSpec::gaussian(0.5, 1.0), x, y) == doctest::Approx(std::exp(-0.5 * 0.25 * 8.0)));

    const Eigen::RowVector3d a(1, 0, 0), b(0, 1, 0);
    CHECK(kernel_eval(KernelSpec::indicator(), a, b) == 0.0);
    CHECK(kernel_eval(KernelSpec::indicator(), a, a) == 1.0);

    CHECK_THROWS_AS(kernel_eval(KernelSpec::linear(), x, a), Error);
}

TEST_CASE("kernel spec validation and parsing") {
    CHECK_THROWS_AS(KernelSpec::linear(0.0).validate(), Error);
    CHECK_THROWS_AS(KernelSpec::gaussian(1.0, -1.0).validate(), Error);
    CHECK_THROWS_AS(KernelSpec::from_function({}).validate(), Error);
    CHECK_NOTHROW(KernelSpec::gaussian(0.1, 0.1).validate());

    CHECK(parse_kernel_kind("linear") == KernelKind::linear);
    CHECK(parse_kernel_kind("gaussian") == KernelKind::gaussian);
    CHECK(parse_kernel_kind("indicator") == KernelKind::indicator);
    CHECK_THROWS_AS(parse_kernel_kind("rbf"), Error);
    CHECK(to_string(KernelKind::gaussian) == "gaussian");
}

TEST_CASE("increment matrix examples") {
    const auto K = increment_matrix(KernelSpec::linear(), Sequence::scalar({0, 1, 3}), Sequence::scalar({0, 2}));
    REQUIRE(K.rows() == 2);
    REQUIRE(K.cols() == 1);
    CHECK(K(0, 0) == 2.0);
    CHECK(K(1, 0) == 4.0);

    std::mt19937_64 rng(1);
    const auto t = testing::random_sequence(rng, 5, 2);
    for (const auto& spec : {KernelSpec::linear(), KernelSpec::gaussian(0.7, 1.2)})
        CHECK(increment_matrix(spec, Sequence{{1, 1}, {1, 1}, {1, 1}}, t).isZero(0.0));

    const auto empty = increment_matrix(KernelSpec::gaussian(), Sequence::scalar({1}), Sequence::scalar({0, 1, 2}));
    CHECK(empty.rows() == 0);
    CHECK(empty.cols() == 2);
}

TEST_CASE("gaussian increment entry by hand") {
    for (double gamma : {0.3, 1.0, 2.0}) {
        const double theta = 1.7;
        const auto K = increment_matrix(KernelSpec::gaussian(gamma, theta), Sequence::scalar({0, 1}),
                                        Sequence::scalar({0, 1}));
        const double e = std::exp(-gamma * gamma / 2.0);
        CHECK(K(0, 0) == doctest::Approx(theta * (2.0 - 2.0 * e)).epsilon(1e-14));
    }
}

TEST_CASE("increment matrix properties") {
    std::mt19937_64 rng(2);
    for (int c = 0; c < 30; ++c) {
        const std::size_t d = testing::pick(rng, 1, 3);
        const auto s = testing::random_sequence(rng, testing::pick(rng, 1, 8), d);
        const auto t = testing::random_sequence(rng, testing::pick(rng, 1, 8), d);
        for (const auto& spec : {KernelSpec::linear(0.8), KernelSpec::gaussian(0.9, 1.1)}) {
            const Eigen::MatrixXd st = increment_matrix(spec, s, t), ts = increment_matrix(spec, t, s);
            CHECK((st - ts.transpose()).cwiseAbs().sum() <= 1e-13);
        }

        // Linear kernel: the four-point difference of point evaluations equals
        // the scaled Gram matrix of increments.
        const double gamma = 0.8;
        const auto P = kernel_matrix(KernelSpec::linear(gamma), s, t);
        const auto K = increment_matrix(KernelSpec::linear(gamma), s, t);
        const Eigen::MatrixXd direct = gamma * increments(s) * increments(t).transpose();
        for (Eigen::Index i = 0; i < K.rows(); ++i)
            for (Eigen::Index j = 0; j < K.cols(); ++j) {
                const double four = P(i + 1, j + 1) + P(i, j) - P(i, j + 1) - P(i + 1, j);
                CHECK(std::abs(K(i, j) - four) <= 1e-12);
                CHECK(std::abs(K(i, j) - direct(i, j)) <= 1e-12);
            }
    }
}

TEST_CASE("static kernels are symmetric and PSD") {
    std::mt19937_64 rng(3);
    for (int c = 0; c < 20; ++c) {
        const std::size_t n = testing::pick(rng, 1, 10), d = testing::pick(rng, 1, 3);
        const auto pts = testing::random_sequence(rng, n, d, 1.0);
        for (const auto& spec : {KernelSpec::linear(1.3), KernelSpec::gaussian(0.6, 2.0), KernelSpec::indicator()}) {
            const Eigen::MatrixXd G = kernel_matrix(spec, pts, pts);
            CHECK((G - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
            const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff();
            CHECK(min_eig >= -1e-10 * std::max(1.0, G.trace()));
        }
    }
}

TEST_CASE("custom kernel") {
    const auto spec = KernelSpec::from_function(
        [](Eigen::Ref<const Eigen::RowVectorXd> x, Eigen::Ref<const Eigen::RowVectorXd> y) {
            return std::pow(1.0 + x.dot(y), 2);
        });
    CHECK(kernel_eval(spec, Eigen::RowVector2d(1, 0), Eigen::RowVector2d(2, 5)) == 9.0);
    const auto K = increment_matrix(spec, Sequence::scalar({0, 1}), Sequence::scalar({0, 1}));
    CHECK(K(0, 0) == 4.0 + 1.0 - 1.0 - 1.0);
}
