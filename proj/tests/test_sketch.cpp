#include "sksc/eval.hpp"
#include "sksc/serialize.hpp"
#include "sksc/sketch.hpp"

#include "doctest.h"

#include <Eigen/SVD>

#include <random>

using namespace sksc;

namespace {

const SketchKind kAllKinds[] = {SketchKind::Rademacher, SketchKind::Gaussian,
                                SketchKind::SparseEmbedding, SketchKind::HadamardFJLT};

Eigen::MatrixXd random_matrix(Index r, Index c, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd M(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            M(i, j) = g(rng);
    return M;
}

Eigen::VectorXd unit_vector(Index n, std::uint64_t seed)
{
    Eigen::VectorXd v = random_matrix(n, 1, seed).col(0);
    return v / v.norm();
}

} // namespace

TEST_SUITE("sketch")
{
    TEST_CASE("rademacher 4x4 entries are exactly +-0.5")
    {
        const auto R = make_rademacher(4, 4, 9).materialize();
        CHECK((R.array().abs() == 0.5).all());
    }

    TEST_CASE("rademacher mean is within four standard errors of zero")
    {
        const Index rows = 1000, cols = 50;
        const auto R = make_rademacher(rows, cols, 77).materialize();
        const double se = 1.0 / std::sqrt(static_cast<double>(rows * cols * cols));
        CHECK(std::abs(R.mean()) <= 4 * se);
    }

    TEST_CASE("gaussian with one column has unit variance")
    {
        const auto R = make_gaussian(10000, 1, 5).materialize();
        const double mean = R.mean();
        const double var = (R.array() - mean).square().sum() / (R.size() - 1);
        CHECK(var == doctest::Approx(1.0).epsilon(0.1));
    }

    TEST_CASE("same seed, same operator; different seed, different operator")
    {
        for (auto kind : kAllKinds) {
            const auto a = SketchOperator::make(kind, 33, 8, 4).materialize();
            const auto b = SketchOperator::make(kind, 33, 8, 4).materialize();
            const auto c = SketchOperator::make(kind, 33, 8, 5).materialize();
            CHECK(a == b);
            CHECK(a != c);
            CHECK(SketchOperator::make(kind, 33, 8, 4) == SketchOperator::make(kind, 33, 8, 4));
        }
    }

    TEST_CASE("sparse embedding has one unit entry per row")
    {
        const auto R = make_sparse_embedding(8, 2, 3).materialize();
        CHECK((R.array() != 0).count() == 8);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto S = make_sparse_embedding(50, 7, seed).materialize();
            CHECK((S.cwiseAbs().rowwise().sum().array() == 1.0).all());
        }
    }

    TEST_CASE("full-sample fjlt on a power of two is an isometry")
    {
        const auto op = make_fjlt_hadamard(4, 4, 21);
        const auto R = op.materialize();
        CHECK((R.transpose() * R - Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-14);
        const Eigen::MatrixXd X = random_matrix(4, 6, 1);
        const auto Y = op.apply_left(X);
        for (Index j = 0; j < X.cols(); ++j)
            CHECK(Y.col(j).norm() == doctest::Approx(X.col(j).norm()).epsilon(1e-14));
    }

    TEST_CASE("fjlt pads to the next power of two")
    {
        CHECK(make_fjlt_hadamard(6, 3, 1).padded_rows() == 8);
        CHECK(make_fjlt_hadamard(8, 3, 1).padded_rows() == 8);
        CHECK(make_fjlt_hadamard(9, 3, 1).padded_rows() == 16);
        CHECK(next_pow2(1) == 1);
        CHECK_THROWS_AS(make_fjlt_hadamard(6, 9, 1), ConfigError);
    }

    TEST_CASE("walsh-hadamard transform matches the unnormalized Sylvester matrix")
    {
        Eigen::MatrixXd H(1, 1);
        H << 1;
        while (H.rows() < 16) {
            Eigen::MatrixXd next(2 * H.rows(), 2 * H.rows());
            next << H, H, H, -H;
            H = next;
        }
        const Eigen::VectorXd x = random_matrix(16, 1, 2).col(0);
        Eigen::VectorXd y = x;
        fwht<double>(y);
        CHECK((y - H * x).norm() <= 1e-13);
    }

    TEST_CASE("identity input reproduces the operator")
    {
        for (auto kind : kAllKinds) {
            const auto op = SketchOperator::make(kind, 3, 2, 8);
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
            CHECK((op.apply_right(I) - op.materialize()).norm() <= 1e-15);
        }
    }

    TEST_CASE("row of ones times rademacher gives signed sums over sqrt(n)")
    {
        const Index N = 25, n = 6;
        const auto op = make_rademacher(N, n, 13);
        const auto R = op.materialize();
        const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, N);
        const auto B = op.apply_right(ones);
        for (Index j = 0; j < n; ++j) {
            double signed_sum = 0;
            for (Index i = 0; i < N; ++i)
                signed_sum += R(i, j) > 0 ? 1.0 : -1.0;
            CHECK(B(0, j) == doctest::Approx(signed_sum / std::sqrt(6.0)).epsilon(1e-14));
        }
    }

    TEST_CASE("apply paths agree with the materialized matrix")
    {
        const Eigen::MatrixXd X = random_matrix(20, 32, 6);
        for (auto kind : kAllKinds) {
            const auto op = SketchOperator::make(kind, 32, 12, 17);
            const auto R = op.materialize();
            CHECK((op.apply_right(X) - X * R).norm() <= 1e-10 * std::max(1.0, (X * R).norm()));
            CHECK((op.apply_right(X, 3) - op.apply_right(X)).norm() == 0.0);
            const auto left = SketchOperator::make(kind, 20, 7, 18);
            const auto L = left.materialize();
            CHECK((left.apply_left(X) - L.transpose() * X).norm()
                  <= 1e-10 * std::max(1.0, (L.transpose() * X).norm()));
            const Eigen::VectorXd x = X.col(3);
            CHECK((left.apply_left(x) - L.transpose() * x).norm() <= 1e-12);
        }
    }

    TEST_CASE("doubly sketched composition realizes Rc^T X R")
    {
        const Eigen::MatrixXd X = random_matrix(30, 40, 1);
        const auto Rc = make_gaussian(30, 10, 2);
        const auto R = make_sparse_embedding(40, 8, 3);
        const auto Xc = apply_left(Rc, X);
        const auto B = apply_right(Xc, R);
        const Eigen::MatrixXd expect = Rc.materialize().transpose() * X * R.materialize();
        CHECK((B - expect).norm() <= 1e-12 * expect.norm());
    }

    TEST_CASE("dimension mismatch throws")
    {
        const auto op = make_rademacher(10, 3, 1);
        CHECK_THROWS_AS(op.apply_right(Eigen::MatrixXd::Ones(4, 9)), ConfigError);
        CHECK_THROWS_AS(op.apply_left(Eigen::MatrixXd::Ones(9, 4)), ConfigError);
        CHECK_THROWS_AS(make_gaussian(0, 3, 1), ConfigError);
        CHECK_THROWS_AS(parse_sketch_kind("bogus"), ConfigError);
    }

    TEST_CASE("expected squared norm is preserved")
    {
        for (auto kind : kAllKinds) {
            const Eigen::VectorXd x = unit_vector(64, 99);
            double sum = 0;
            for (std::uint64_t s = 0; s < 200; ++s) {
                const auto op = SketchOperator::make(kind, 64, 16, 1000 + s);
                sum += op.apply_right(Eigen::MatrixXd(x.transpose())).squaredNorm();
            }
            INFO("kind " << to_string(kind));
            const double mean = sum / 200;
            CHECK(mean >= 0.9);
            CHECK(mean <= 1.1);
        }
    }

    TEST_CASE("norm preservation: few unit vectors leave [0.5, 1.5]")
    {
        Eigen::MatrixXd V(100, 512);
        for (Index i = 0; i < 100; ++i)
            V.row(i) = unit_vector(512, 5000 + static_cast<std::uint64_t>(i)).transpose();
        for (auto kind : kAllKinds) {
            Index outside = 0;
            for (std::uint64_t s = 0; s < 20; ++s) {
                const auto Y = SketchOperator::make(kind, 512, 128, s).apply_right(V);
                for (Index i = 0; i < 100; ++i) {
                    const double q = Y.row(i).squaredNorm();
                    outside += q < 0.5 || q > 1.5;
                }
            }
            INFO("kind " << to_string(kind));
            CHECK(static_cast<double>(outside) / 2000.0 < 0.05);
        }
    }

    TEST_CASE("range is preserved by a 2*rank rademacher sketch")
    {
        const Eigen::MatrixXd X = random_matrix(40, 10, 3) * random_matrix(10, 300, 4);
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto B = make_rademacher(300, 20, s).apply_right(X);
            CHECK(check_range_preservation(X, B, 1e-8));
        }
    }

    TEST_CASE("sketch approximately inherits the leading range")
    {
        const Eigen::MatrixXd X = random_matrix(40, 8, 5) * random_matrix(8, 300, 6)
            + 0.05 * random_matrix(40, 300, 7);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Index r = 5;
        const Eigen::MatrixXd Ur = svd.matrixU().leftCols(r);
        const Eigen::MatrixXd Vr = svd.matrixV().leftCols(r);
        const Eigen::VectorXd s = svd.singularValues();
        const double tail = std::sqrt(s.tail(s.size() - r).squaredNorm());
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto op = make_rademacher(300, 20, seed);
            const auto B = op.apply_right(X);
            const Eigen::MatrixXd VtR = op.apply_right(Eigen::MatrixXd(Vr.transpose()));
            const Eigen::MatrixXd pinv = VtR.completeOrthogonalDecomposition().pseudoInverse();
            const double lhs = (B * pinv - Ur * s.head(r).asDiagonal()).norm();
            CHECK(lhs <= 5 * tail);
        }
    }

    TEST_CASE("descriptor serialization rebuilds the operator")
    {
        for (auto kind : kAllKinds) {
            const auto op = SketchOperator::make(kind, 17, 5, 123).with_jlt_params({0.25, 0.05});
            const json j = op;
            const auto back = j.get<SketchOperator>();
            CHECK(back == op);
            CHECK(back.materialize() == op.materialize());
        }
    }
}
