// states.hpp -- validated density matrices, the X-form parameter family, and
// Bloch-vector qubit states.

#pragma once

#include <cmath>
#include <sstream>

#include "entverdict/errors.hpp"
#include "entverdict/linalg.hpp"

namespace entverdict {

inline constexpr double default_density_tol = 1e-9;

// Unit vector on the Bloch sphere.
struct BlochVector {
    double nx = 0.0;
    double ny = 0.0;
    double nz = 1.0;

    double norm() const { return std::sqrt(nx * nx + ny * ny + nz * nz); }
};

inline constexpr BlochVector plus_x{1.0, 0.0, 0.0};
inline constexpr BlochVector minus_x{-1.0, 0.0, 0.0};
inline constexpr BlochVector plus_y{0.0, 1.0, 0.0};
inline constexpr BlochVector minus_y{0.0, -1.0, 0.0};
inline constexpr BlochVector plus_z{0.0, 0.0, 1.0};
inline constexpr BlochVector minus_z{0.0, 0.0, -1.0};

// rho = (I + n.sigma)/2, a pure qubit state.
inline Mat2 bloch_state(const BlochVector& n) {
    if (std::abs(n.norm() - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "bloch_state: vector norm " << n.norm() << " is not 1";
        throw InvalidArgument(os.str());
    }
    Mat2 r;
    r(0, 0) = (1.0 + n.nz) / 2.0;
    r(0, 1) = Complex(n.nx, -n.ny) / 2.0;
    r(1, 0) = Complex(n.nx, n.ny) / 2.0;
    r(1, 1) = (1.0 - n.nz) / 2.0;
    return r;
}

// The five real parameters of the X-form family: diagonal (alpha, beta,
// beta_prime, alpha_prime) in the |HH>,|HV>,|VH>,|VV> basis, anti-diagonal
// corner coherence gamma. gamma is kept nonnegative; the corner phase is a
// local-unitary artifact and lives in the fit residual instead.
struct XStateParams {
    double alpha = 0.0;
    double beta = 0.0;
    double beta_prime = 0.0;
    double gamma = 0.0;
    double alpha_prime = 0.0;
};

inline void validate_x_params(const XStateParams& p) {
    const double vals[] = {p.alpha, p.beta, p.beta_prime, p.gamma, p.alpha_prime};
    for (double v : vals)
        if (!std::isfinite(v)) throw InvalidArgument("x-state params: non-finite value");
    const char* names[] = {"alpha", "beta", "beta_prime", "gamma", "alpha_prime"};
    for (int i = 0; i < 5; ++i) {
        if (vals[i] < -1e-9) {
            std::ostringstream os;
            os << "x-state params: " << names[i] << " = " << vals[i] << " is negative";
            throw InvalidArgument(os.str());
        }
    }
    const double sum = p.alpha + p.beta + p.beta_prime + p.alpha_prime;
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "x-state params: diagonal sum " << sum << " is not 1";
        throw InvalidArgument(os.str());
    }
    if (p.gamma * p.gamma > p.alpha * p.alpha_prime + 1e-9) {
        std::ostringstream os;
        os << "x-state params: gamma^2 = " << p.gamma * p.gamma
           << " exceeds alpha*alpha_prime = " << p.alpha * p.alpha_prime;
        throw InvalidArgument(os.str());
    }
}

// Physical two-qubit state: Hermitian, unit trace, PSD within tolerance.
// Construct through validate_density so the invariants always hold.
class DensityMatrix {
public:
    const Mat4& matrix() const { return m_; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    friend DensityMatrix validate_density(const Mat4&, double);
    explicit DensityMatrix(const Mat4& m) : m_(m) {}
    Mat4 m_;
};

inline DensityMatrix validate_density(const Mat4& m, double tol = default_density_tol) {
    if (tol <= 0.0) throw InvalidArgument("validate_density: tolerance must be positive");
    if (!all_finite(m)) throw InvalidArgument("validate_density: non-finite entry");
    const double dev = hermiticity_deviation(m);
    if (dev > tol) {
        std::ostringstream os;
        os << "density matrix deviates from Hermitian by " << dev;
        throw NotHermitian(os.str(), dev);
    }
    const double trace_dev = std::abs(m.trace() - Complex(1.0, 0.0));
    if (trace_dev > tol) {
        std::ostringstream os;
        os << "density matrix trace off by " << trace_dev;
        throw BadTrace(os.str(), trace_dev);
    }
    const auto eig = hermitian_eigen(m, tol);
    const double violation = std::max(0.0, -eig.values.front());
    if (violation > tol) {
        std::ostringstream os;
        os << "density matrix has eigenvalue " << eig.values.front();
        throw NotPsd(os.str(), violation);
    }
    return DensityMatrix(m);
}

// The X-form matrix: diagonal (alpha, beta, beta_prime, alpha_prime), corners
// (0,3) and (3,0) equal to gamma, everything else zero.
inline DensityMatrix x_state_to_density(const XStateParams& p) {
    validate_x_params(p);
    Mat4 m;
    m(0, 0) = p.alpha;
    m(1, 1) = p.beta;
    m(2, 2) = p.beta_prime;
    m(3, 3) = p.alpha_prime;
    m(0, 3) = p.gamma;
    m(3, 0) = p.gamma;
    return validate_density(m, default_density_tol);
}

struct XFit {
    XStateParams params;
    double residual = 0.0;
};

// Rejected fit.  Carries the best-effort parameters so callers can still
// report them alongside the residual.
class FitRejected : public Error {
public:
    FitRejected(const std::string& what, XStateParams params, double residual)
        : Error(what), params(params), residual(residual) {}
    XStateParams params;
    double residual;
};

// Reads the family parameters off the matrix without judging the residual:
// diagonal in order, gamma = |entry(0,3)|, all renormalized so the diagonal
// sums to exactly 1.  The residual is the largest modulus among the
// off-diagonal entries that the family fixes to zero, together with the
// imaginary part of the corner.
inline XFit fit_x_state_raw(const DensityMatrix& rho) {
    const Mat4& m = rho.matrix();
    double residual = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            if (i == j) continue;
            if ((i == 0 && j == 3) || (i == 3 && j == 0)) continue;
            residual = std::max(residual, std::abs(m(i, j)));
        }
    residual = std::max(residual, std::abs(m(0, 3).imag()));

    XStateParams p;
    p.alpha = m(0, 0).real();
    p.beta = m(1, 1).real();
    p.beta_prime = m(2, 2).real();
    p.alpha_prime = m(3, 3).real();
    p.gamma = std::abs(m(0, 3));
    const double s = p.alpha + p.beta + p.beta_prime + p.alpha_prime;
    if (s <= 0.0) throw InvalidArgument("fit_x_state: nonpositive diagonal sum");
    p.alpha /= s;
    p.beta /= s;
    p.beta_prime /= s;
    p.alpha_prime /= s;
    p.gamma /= s;
    return {p, residual};
}

inline XFit fit_x_state(const DensityMatrix& rho, double noise_floor) {
    if (noise_floor < 0.0) throw InvalidArgument("fit_x_state: negative noise floor");
    XFit fit = fit_x_state_raw(rho);
    if (fit.residual > noise_floor) {
        std::ostringstream os;
        os << "x-state fit residual " << fit.residual << " exceeds noise floor " << noise_floor;
        throw FitRejected(os.str(), fit.params, fit.residual);
    }
    return fit;
}

}  // namespace entverdict
