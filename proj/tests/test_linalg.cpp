#include <catch2/catch_amalgamated.hpp>

#include "entverdict/linalg.hpp"
#include "support/generators.hpp"

using namespace entverdict;
using Catch::Matchers::WithinAbs;

namespace {

Mat4 spectral_rebuild(const EigenResult<4>& eig) {
    Mat4 m;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto v = eig.vector(k);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                m(i, j) += eig.values[k] * v[i] * std::conj(v[j]);
    }
    return m;
}

double gram_identity_deviation(const EigenResult<4>& eig) {
    double dev = 0.0;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < 4; ++i)
                dot += std::conj(eig.vectors(i, a)) * eig.vectors(i, b);
            dev = std::max(dev, std::abs(dot - (a == b ? Complex(1.0) : Complex(0.0))));
        }
    return dev;
}

}  // namespace

TEST_CASE("kron follows the 2i+j composite index convention") {
    SECTION("identity stays identity") {
        REQUIRE(max_entry_distance(kron(identity2(), identity2()), identity4()) == 0.0);
    }
    SECTION("|H><H| x |V><V| lands on composite index 1") {
        const Mat2 hh = Mat2::diagonal({1.0, 0.0});
        const Mat2 vv = Mat2::diagonal({0.0, 1.0});
        REQUIRE(max_entry_distance(kron(hh, vv), Mat4::diagonal({0.0, 1.0, 0.0, 0.0})) == 0.0);
    }
    SECTION("sigma_x tensor sigma_x is the anti-diagonal of ones") {
        const Mat4 m = kron(pauli_x(), pauli_x());
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                REQUIRE(m(i, j) == (j == 3 - i ? Complex(1.0) : Complex(0.0)));
    }
}

TEST_CASE("kron is bilinear with multiplicative trace") {
    Xoshiro256StarStar rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat2 a = testgen::random_complex2(rng);
        const Mat2 a2 = testgen::random_complex2(rng);
        const Mat2 b = testgen::random_complex2(rng);
        REQUIRE(max_entry_distance(kron(a + a2, b), kron(a, b) + kron(a2, b)) < 1e-12);
        REQUIRE_THAT(std::abs(kron(a, b).trace() - a.trace() * b.trace()),
                     WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("hermitian_eigen reproduces closed-form spectra") {
    SECTION("identity") {
        const auto eig = hermitian_eigen(identity4());
        for (double v : eig.values) REQUIRE_THAT(v, WithinAbs(1.0, 1e-13));
    }
    SECTION("diagonal gets sorted ascending") {
        const auto eig = hermitian_eigen(Mat4::diagonal({4.0, 1.0, 3.0, 2.0}));
        const std::array<double, 4> expected{1.0, 2.0, 3.0, 4.0};
        for (std::size_t k = 0; k < 4; ++k)
            REQUIRE_THAT(eig.values[k], WithinAbs(expected[k], 1e-13));
    }
    SECTION("central 2x2 coherence block splits into beta plus/minus gamma") {
        // diag(0.3, 0.2, 0.2, 0.3) with 0.25 on the (1,2)/(2,1) block.
        Mat4 m = Mat4::diagonal({0.3, 0.2, 0.2, 0.3});
        m(1, 2) = 0.25;
        m(2, 1) = 0.25;
        const auto eig = hermitian_eigen(m);
        const std::array<double, 4> expected{-0.05, 0.3, 0.3, 0.45};
        for (std::size_t k = 0; k < 4; ++k)
            REQUIRE_THAT(eig.values[k], WithinAbs(expected[k], 1e-12));
    }
}

TEST_CASE("hermitian_eigen rejects unusable input") {
    Mat4 skew;
    skew(0, 1) = Complex(0.0, 1.0);
    skew(1, 0) = Complex(0.0, 1.0);  // conjugate would need -i
    REQUIRE_THROWS_AS(hermitian_eigen(skew), NotHermitian);
    try {
        hermitian_eigen(skew);
    } catch (const NotHermitian& e) {
        REQUIRE_THAT(e.deviation, WithinAbs(1.0, 1e-12));
    }

    Mat4 nan_matrix;
    nan_matrix(2, 2) = std::nan("");
    REQUIRE_THROWS_AS(hermitian_eigen(nan_matrix), InvalidArgument);
}

TEST_CASE("eigendecomposition survives 1000 random Hermitian matrices") {
    Xoshiro256StarStar rng(20250822);
    for (int trial = 0; trial < 1000; ++trial) {
        const Mat4 h = testgen::random_hermitian4(rng);
        const auto eig = hermitian_eigen(h);

        REQUIRE(max_entry_distance(spectral_rebuild(eig), h) < 1e-9);
        REQUIRE(gram_identity_deviation(eig) < 1e-10);
        for (std::size_t k = 0; k + 1 < 4; ++k) REQUIRE(eig.values[k] <= eig.values[k + 1]);
        for (std::size_t k = 0; k < 4; ++k) {
            const auto v = eig.vector(k);
            const auto hv = h * v;
            for (std::size_t i = 0; i < 4; ++i)
                REQUIRE_THAT(std::abs(hv[i] - eig.values[k] * v[i]), WithinAbs(0.0, 1e-9));
        }
    }
}

TEST_CASE("spectrum is invariant under unitary conjugation") {
    Xoshiro256StarStar rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat4 h = testgen::random_hermitian4(rng);
        const Mat4 u = testgen::random_unitary4(rng);
        const auto before = hermitian_eigen(h).values;
        const auto after = hermitian_eigen(u * h * u.adjoint()).values;
        for (std::size_t k = 0; k < 4; ++k)
            REQUIRE_THAT(after[k], WithinAbs(before[k], 1e-9));
    }
}

TEST_CASE("max_entry_distance is the entrywise modulus metric") {
    Xoshiro256StarStar rng(5);
    const Mat2 m = testgen::random_complex2(rng);
    REQUIRE(max_entry_distance(m, m) == 0.0);
    REQUIRE_THAT(max_entry_distance(identity2(), Mat2::diagonal({1.0, 0.5})),
                 WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(max_entry_distance(pauli_x(), pauli_y()), WithinAbs(std::sqrt(2.0), 1e-15));
}

TEST_CASE("trace_distance on Hermitian pairs") {
    const Mat4 rho = Mat4::diagonal({0.25, 0.25, 0.25, 0.25});
    REQUIRE_THAT(trace_distance(rho, rho), WithinAbs(0.0, 1e-14));

    const Mat4 hh = Mat4::diagonal({1.0, 0.0, 0.0, 0.0});
    const Mat4 vv = Mat4::diagonal({0.0, 0.0, 0.0, 1.0});
    REQUIRE_THAT(trace_distance(hh, vv), WithinAbs(1.0, 1e-13));

    REQUIRE_THAT(trace_distance(rho, Mat4::diagonal({0.5, 0.5, 0.0, 0.0})),
                 WithinAbs(0.5, 1e-13));

    Mat4 skew;
    skew(0, 1) = Complex(0.0, 1.0);
    skew(1, 0) = Complex(0.0, 1.0);
    REQUIRE_THROWS_AS(trace_distance(skew, rho), NotHermitian);
}
