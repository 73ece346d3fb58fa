#include <cmath>

#include "doctest.h"
#include "probeflow/errors.hpp"
#include "probeflow/linalg.hpp"
#include "probeflow/rng.hpp"
#include "support/eigen_oracle.hpp"
#include "support/fixtures.hpp"

using namespace probeflow;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) { return fixtures::gaussian_matrix(r, c, seed); }

double orthonormality_error(const Matrix& q) {
    const Matrix g = matmul_at(q, q);
    return max_abs(g - Matrix::identity(q.cols()));
}

double reconstruction_error(const Matrix& m, const SvdResult& s) {
    Matrix us = s.u;
    for (std::size_t r = 0; r < us.rows(); ++r)
        for (std::size_t c = 0; c < us.cols(); ++c) us(r, c) *= s.singular_values[c];
    return max_abs(matmul_bt(us, s.v) - m);
}

}  // namespace

TEST_CASE("matrix products agree with each other") {
    const Matrix a = random_matrix(3, 4, 1);
    const Matrix b = random_matrix(4, 2, 2);
    CHECK(max_abs(matmul(a, b) - matmul_bt(a, b.transposed())) < 1e-14);
    CHECK(max_abs(matmul(a, b) - matmul_at(a.transposed(), b)) < 1e-14);
    CHECK_THROWS_AS(matmul(a, a), ContractError);
}

TEST_CASE("svd of a diagonal matrix returns sorted absolute entries") {
    const std::vector<double> d{3, 4};
    const SvdResult s = svd(Matrix::diagonal(d));
    REQUIRE(s.singular_values.size() == 2);
    CHECK(s.singular_values[0] == doctest::Approx(4).epsilon(1e-15));
    CHECK(s.singular_values[1] == doctest::Approx(3).epsilon(1e-15));
}

TEST_CASE("svd of the identity") {
    const SvdResult s = svd(Matrix::identity(3));
    for (double v : s.singular_values) CHECK(v == doctest::Approx(1.0));
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(std::abs(s.u(r, c)) == doctest::Approx(r == c ? 1.0 : 0.0));
            CHECK(std::abs(s.v(r, c)) == doctest::Approx(r == c ? 1.0 : 0.0));
        }
}

TEST_CASE("svd singular values match the eigen oracle on a 5x3 matrix") {
    const Matrix m = random_matrix(5, 3, 53);
    const SvdResult s = svd(m);
    const auto expected = oracle::singular_values(m);
    REQUIRE(s.singular_values.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(s.singular_values[i] - expected[i]) < 1e-8);
}

TEST_CASE("svd factors are orthonormal and reconstruct the input") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng shape(seed);
        const std::size_t r = 1 + shape.uniform_index(8);
        const std::size_t c = 1 + shape.uniform_index(8);
        const Matrix m = random_matrix(r, c, 1000 + seed);
        const SvdResult s = svd(m);
        CHECK(orthonormality_error(s.u) < 1e-12);
        CHECK(orthonormality_error(s.v) < 1e-12);
        CHECK(reconstruction_error(m, s) < 1e-12);
        for (std::size_t i = 1; i < s.singular_values.size(); ++i) CHECK(s.singular_values[i - 1] >= s.singular_values[i]);
    }
}

TEST_CASE("svd handles rank-deficient and zero matrices") {
    Matrix m(4, 3);
    for (std::size_t r = 0; r < 4; ++r) {
        m(r, 0) = static_cast<double>(r + 1);
        m(r, 1) = 2.0 * static_cast<double>(r + 1);
    }
    const SvdResult s = svd(m);
    CHECK(s.singular_values[1] < 1e-12);
    CHECK(orthonormality_error(s.u) < 1e-12);
    CHECK(orthonormality_error(s.v) < 1e-12);
    CHECK(reconstruction_error(m, s) < 1e-12);

    const SvdResult z = svd(Matrix(4, 6));
    for (double v : z.singular_values) CHECK(v == 0.0);
    CHECK(orthonormality_error(z.u) < 1e-12);
}

TEST_CASE("svd rejects empty and non-finite input") {
    CHECK_THROWS_AS(svd(Matrix()), ValidationError);
    Matrix m(2, 2, 1.0);
    m(1, 0) = NAN;
    CHECK_THROWS_AS(svd(m), ValidationError);
}

TEST_CASE("svd is deterministic") {
    const Matrix m = random_matrix(6, 4, 77);
    const SvdResult a = svd(m);
    const SvdResult b = svd(m);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.singular_values == b.singular_values);
}

TEST_CASE("nuclear norm examples") {
    const std::vector<double> d{3, 4};
    CHECK(nuclear_norm(Matrix::diagonal(d)) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(nuclear_norm(Matrix(4, 6)) == 0.0);
    const Matrix m = random_matrix(3, 4, 34);
    CHECK(std::abs(nuclear_norm(m) - oracle::nuclear_norm(m)) < 1e-8);
}

TEST_CASE("nuclear norm is absolutely homogeneous") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix m = random_matrix(4, 5, 500 + seed);
        const double base = nuclear_norm(m);
        for (double c : {-3.5, 0.25, 7.0}) {
            const double scaled = nuclear_norm(c * m);
            CHECK(std::abs(scaled - std::abs(c) * base) <= 1e-10 * std::abs(c) * base);
        }
    }
}

TEST_CASE("nuclear norm lies within the rank bounds of the Frobenius norm") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng shape(seed + 9);
        const std::size_t r = 1 + shape.uniform_index(7);
        const std::size_t c = 1 + shape.uniform_index(7);
        const Matrix m = random_matrix(r, c, 700 + seed);
        const double f = frobenius_norm(m);
        const double k = std::sqrt(static_cast<double>(std::min(r, c)));
        const double nn = nuclear_norm(m);
        CHECK(nn >= f / k - 1e-12);
        CHECK(nn <= k * f + 1e-12);
    }
}

TEST_CASE("nuclear norm subgradient examples") {
    const std::vector<double> d{3, 4};
    CHECK(max_abs(nuclear_norm_subgradient(Matrix::diagonal(d)) - Matrix::identity(2)) < 1e-14);
    CHECK(max_abs(nuclear_norm_subgradient(2.5 * Matrix::identity(3)) - Matrix::identity(3)) < 1e-14);
    const Matrix zero_grad = nuclear_norm_subgradient(Matrix(3, 2));
    CHECK(zero_grad.rows() == 3);
    CHECK(max_abs(zero_grad) == 0.0);
}

TEST_CASE("nuclear norm subgradient matches finite differences on a full-rank 3x3") {
    Matrix m = random_matrix(3, 3, 33);
    const Matrix g = nuclear_norm_subgradient(m);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double saved = m.values()[i];
        m.values()[i] = saved + 1e-5;
        const double up = nuclear_norm(m);
        m.values()[i] = saved - 1e-5;
        const double down = nuclear_norm(m);
        m.values()[i] = saved;
        worst = std::max(worst, std::abs((up - down) / 2e-5 - g.values()[i]));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("first-order expansion of the nuclear norm has quadratic remainder") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix m = random_matrix(4, 3, 900 + seed);
        Matrix e = random_matrix(4, 3, 950 + seed);
        e *= 1.0 / frobenius_norm(e);
        const auto terms = nuclear_norm_terms(m);
        const auto remainder = [&](double eps) {
            return std::abs(nuclear_norm(m + eps * e) - terms.value - eps * inner_product(terms.subgradient, e));
        };
        // Halving ε should shrink the remainder about fourfold.
        const double r1 = remainder(1e-3);
        const double r2 = remainder(5e-4);
        CHECK(r1 < 1e-4);
        CHECK(r2 < 0.4 * r1 + 1e-12);
    }
}

TEST_CASE("nuclear norm is invariant under orthogonal transforms") {
    const Matrix w = random_matrix(4, 6, 41);
    const Matrix q = svd(random_matrix(4, 4, 42)).u;
    CHECK(std::abs(nuclear_norm(matmul(q, w)) - nuclear_norm(w)) < 1e-8);
}
