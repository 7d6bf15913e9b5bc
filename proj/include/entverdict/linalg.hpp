// linalg.hpp -- dense complex 2x2 / 4x4 matrices, Kronecker products, and a
// cyclic complex Jacobi eigensolver for Hermitian matrices.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <sstream>

#include "entverdict/errors.hpp"

namespace entverdict {

using Complex = std::complex<double>;

inline constexpr double default_hermitian_tol = 1e-9;

// Dense square complex matrix, row-major. Only the two dimensions that occur
// in two-qubit polarization analysis are supported.
template <std::size_t N>
class SquareMatrix {
    static_assert(N == 2 || N == 4, "only 2x2 and 4x4 matrices are supported");

public:
    using value_type = Complex;

    SquareMatrix() = default;  // zero matrix

    static SquareMatrix identity() {
        SquareMatrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    static SquareMatrix diagonal(const std::array<double, N>& d) {
        SquareMatrix m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
        return m;
    }

    static SquareMatrix from_rows(const std::array<std::array<Complex, N>, N>& rows) {
        SquareMatrix m;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) m(i, j) = rows[i][j];
        return m;
    }

    static constexpr std::size_t dim() { return N; }

    Complex& operator()(std::size_t i, std::size_t j) { return e_[i * N + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return e_[i * N + j]; }

    SquareMatrix operator+(const SquareMatrix& o) const {
        SquareMatrix r;
        for (std::size_t k = 0; k < N * N; ++k) r.e_[k] = e_[k] + o.e_[k];
        return r;
    }

    SquareMatrix operator-(const SquareMatrix& o) const {
        SquareMatrix r;
        for (std::size_t k = 0; k < N * N; ++k) r.e_[k] = e_[k] - o.e_[k];
        return r;
    }

    SquareMatrix operator*(const SquareMatrix& o) const {
        SquareMatrix r;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                const Complex a = (*this)(i, k);
                for (std::size_t j = 0; j < N; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
        return t;
    }

    SquareMatrix transpose() const {
        SquareMatrix r;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    SquareMatrix conj() const {
        SquareMatrix r;
        for (std::size_t k = 0; k < N * N; ++k) r.e_[k] = std::conj(e_[k]);
        return r;
    }

    SquareMatrix adjoint() const { return conj().transpose(); }

private:
    std::array<Complex, N * N> e_{};
};

using Mat2 = SquareMatrix<2>;
using Mat4 = SquareMatrix<4>;

template <std::size_t N>
inline SquareMatrix<N> operator*(Complex s, const SquareMatrix<N>& m) {
    SquareMatrix<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r(i, j) = s * m(i, j);
    return r;
}

template <std::size_t N>
inline SquareMatrix<N> operator*(double s, const SquareMatrix<N>& m) {
    return Complex(s, 0.0) * m;
}

template <std::size_t N>
inline std::array<Complex, N> operator*(const SquareMatrix<N>& m, const std::array<Complex, N>& v) {
    std::array<Complex, N> r{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i] += m(i, j) * v[j];
    return r;
}

inline Mat2 identity2() { return Mat2::identity(); }
inline Mat4 identity4() { return Mat4::identity(); }

inline Mat2 pauli_x() { return Mat2::from_rows({{{0.0, 1.0}, {1.0, 0.0}}}); }

inline Mat2 pauli_y() {
    return Mat2::from_rows({{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}}});
}

inline Mat2 pauli_z() { return Mat2::from_rows({{{1.0, 0.0}, {0.0, -1.0}}}); }

template <std::size_t N>
inline bool all_finite(const SquareMatrix<N>& m) {
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

// Max entry modulus of (m - m^dagger)/2; zero iff m is exactly Hermitian.
template <std::size_t N>
inline double hermiticity_deviation(const SquareMatrix<N>& m) {
    double dev = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))) / 2.0);
    return dev;
}

template <std::size_t N>
inline SquareMatrix<N> hermitian_part(const SquareMatrix<N>& m) {
    SquareMatrix<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            r(i, j) = (m(i, j) + std::conj(m(j, i))) / 2.0;
    return r;
}

// Kronecker product with composite row index 2i+j, so basis order is
// |HH>, |HV>, |VH>, |VV> when both factors are in the H/V basis.
inline Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 r;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l)
                    r(2 * i + j, 2 * k + l) = a(i, k) * b(j, l);
    return r;
}

template <std::size_t N>
inline double max_entry_distance(const SquareMatrix<N>& a, const SquareMatrix<N>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

// Full spectral decomposition of a Hermitian matrix.
template <std::size_t N>
struct EigenResult {
    std::array<double, N> values;  // ascending
    SquareMatrix<N> vectors;       // orthonormal columns; column k pairs with values[k]

    std::array<Complex, N> vector(std::size_t k) const {
        std::array<Complex, N> v;
        for (std::size_t i = 0; i < N; ++i) v[i] = vectors(i, k);
        return v;
    }
};

namespace detail {

template <std::size_t N>
inline double off_diagonal_norm(const SquareMatrix<N>& a) {
    double s = 0.0;
    for (std::size_t p = 0; p + 1 < N; ++p)
        for (std::size_t q = p + 1; q < N; ++q) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
}

}  // namespace detail

// Cyclic complex Jacobi rotations. Each rotation dephases the pivot entry and
// then applies a real Givens rotation chosen from tan(2*theta) = 2r/(a_pp - a_qq),
// zeroing the pivot. Converges when the off-diagonal Frobenius norm drops
// below 1e-14, capped at 100 sweeps.
template <std::size_t N>
inline EigenResult<N> hermitian_eigen(const SquareMatrix<N>& m,
                                      double hermitian_tol = default_hermitian_tol) {
    if (!all_finite(m)) throw InvalidArgument("hermitian_eigen: non-finite entry");
    const double dev = hermiticity_deviation(m);
    if (dev > hermitian_tol) {
        std::ostringstream os;
        os << "hermitian_eigen: input deviates from Hermitian by " << dev;
        throw NotHermitian(os.str(), dev);
    }

    SquareMatrix<N> a = hermitian_part(m);
    SquareMatrix<N> v = SquareMatrix<N>::identity();

    constexpr int max_sweeps = 100;
    constexpr double off_target = 1e-14;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::off_diagonal_norm(a) < off_target) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const Complex apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) continue;

                const Complex phase = apq / r;              // e^{i phi}
                const Complex cphase = std::conj(phase);
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (app - aqq) / (2.0 * r);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // a <- a * U with U embedding [[c, -s], [s*conj(phase), c*conj(phase)]]
                for (std::size_t i = 0; i < N; ++i) {
                    const Complex aip = a(i, p);
                    const Complex aiq = a(i, q);
                    a(i, p) = aip * c + aiq * cphase * s;
                    a(i, q) = -aip * s + aiq * cphase * c;
                }
                // a <- U^dagger * a
                for (std::size_t j = 0; j < N; ++j) {
                    const Complex apj = a(p, j);
                    const Complex aqj = a(q, j);
                    a(p, j) = c * apj + s * phase * aqj;
                    a(q, j) = -s * apj + c * phase * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                // accumulate eigenvectors
                for (std::size_t i = 0; i < N; ++i) {
                    const Complex vip = v(i, p);
                    const Complex viq = v(i, q);
                    v(i, p) = vip * c + viq * cphase * s;
                    v(i, q) = -vip * s + viq * cphase * c;
                }
            }
        }
    }
    if (!converged && detail::off_diagonal_norm(a) >= off_target)
        throw NumericalFailure("hermitian_eigen: Jacobi sweep cap reached without convergence");

    std::array<std::size_t, N> order;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    EigenResult<N> out;
    for (std::size_t k = 0; k < N; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < N; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

// (1/2) * sum |lambda_k(a - b)|. Both inputs must be Hermitian.
template <std::size_t N>
inline double trace_distance(const SquareMatrix<N>& a, const SquareMatrix<N>& b,
                             double hermitian_tol = default_hermitian_tol) {
    const double da = hermiticity_deviation(a);
    if (da > hermitian_tol) throw NotHermitian("trace_distance: first argument not Hermitian", da);
    const double db = hermiticity_deviation(b);
    if (db > hermitian_tol) throw NotHermitian("trace_distance: second argument not Hermitian", db);
    const auto eig = hermitian_eigen(a - b, hermitian_tol);
    double s = 0.0;
    for (double lam : eig.values) s += std::abs(lam);
    return s / 2.0;
}

}  // namespace entverdict
