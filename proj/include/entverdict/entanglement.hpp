// entanglement.hpp -- partial transpose, PPT verdict, closed-form X-state
// condition, negativity / concurrence, and the explicit eight-term separable
// decomposition with its verifier.

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "entverdict/errors.hpp"
#include "entverdict/linalg.hpp"
#include "entverdict/states.hpp"

namespace entverdict {

inline constexpr double default_boundary_tol = 1e-9;

enum class Subsystem { First, Second };

enum class Verdict { Entangled, Separable };

inline const char* to_string(Verdict v) {
    return v == Verdict::Entangled ? "entangled" : "separable";
}

// Transpose one tensor factor's indices.  Hermiticity and trace survive;
// positivity need not, and that is the whole point.
inline Mat4 partial_transpose(const DensityMatrix& rho, Subsystem subsystem) {
    const Mat4& m = rho.matrix();
    Mat4 r;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) {
                    if (subsystem == Subsystem::Second)
                        r(2 * i + l, 2 * k + j) = m(2 * i + j, 2 * k + l);
                    else
                        r(2 * k + j, 2 * i + l) = m(2 * i + j, 2 * k + l);
                }
    return r;
}

struct PptReport {
    Verdict verdict = Verdict::Separable;
    double min_eigenvalue = 0.0;
    double negativity = 0.0;
    std::array<double, 4> eigenvalues{};  // ascending
};

// Peres test: the state is entangled iff the partial transpose has a negative
// eigenvalue; definitive for two qubits.  Eigenvalues within boundary_tol of
// zero count as nonnegative, so the boundary verdict is Separable.
inline PptReport ppt_verdict(const DensityMatrix& rho,
                             double boundary_tol = default_boundary_tol,
                             Subsystem subsystem = Subsystem::Second) {
    if (boundary_tol < 0.0) throw InvalidArgument("ppt_verdict: negative boundary tolerance");
    const auto eig = hermitian_eigen(partial_transpose(rho, subsystem));
    PptReport report;
    report.eigenvalues = eig.values;
    report.min_eigenvalue = eig.values.front();
    for (double lam : eig.values) report.negativity += std::max(0.0, -lam);
    report.verdict =
        report.min_eigenvalue < -boundary_tol ? Verdict::Entangled : Verdict::Separable;
    return report;
}

inline double negativity(const DensityMatrix& rho) {
    return ppt_verdict(rho).negativity;
}

struct XCondition {
    bool entangled = false;
    double margin = 0.0;  // gamma - sqrt(beta * beta_prime)
};

// Closed form for the X family: the partial transpose's central block
// [[beta, gamma], [gamma, beta_prime]] dips negative exactly when
// gamma^2 > beta * beta_prime.
inline XCondition x_entanglement_condition(const XStateParams& p) {
    validate_x_params(p);
    const double b = std::max(0.0, p.beta);
    const double bp = std::max(0.0, p.beta_prime);
    const double margin = p.gamma - std::sqrt(b * bp);
    return {margin > 0.0, margin};
}

// 2 * max(0, gamma - sqrt(beta*beta_prime)); positive exactly when the PPT
// verdict on this family is Entangled.
inline double concurrence_x(const XStateParams& p) {
    return 2.0 * std::max(0.0, x_entanglement_condition(p).margin);
}

struct DecompositionTerm {
    double weight = 0.0;
    BlochVector n_a;
    BlochVector n_b;
};

// Convex combination of product states sum_k w_k rho_{n_a} (x) rho_{n_b}.
struct SeparableDecomposition {
    std::vector<DecompositionTerm> terms;
};

class NotSymmetric : public Error {
public:
    NotSymmetric(const std::string& what, double asymmetry) : Error(what), asymmetry(asymmetry) {}
    double asymmetry;
};

// The construction does not apply: a weight would be negative.  This alone
// proves entanglement only when the failing weight is beta - gamma.
class NotSeparable : public Error {
public:
    NotSeparable(const std::string& what, std::string weight_name, double weight)
        : Error(what), weight_name(std::move(weight_name)), weight(weight) {}
    std::string weight_name;
    double weight;
};

// Eight-term product decomposition of the symmetric X family:
// (alpha-gamma) on (z,z) and (-z,-z), (beta-gamma) on (z,-z) and (-z,z),
// gamma on (x,x), (-x,-x), (-y,y), (y,-y).  Weights sum to 2*alpha + 2*beta.
inline SeparableDecomposition separable_decomposition(const XStateParams& p) {
    validate_x_params(p);
    const double alpha_asym = std::abs(p.alpha - p.alpha_prime);
    const double beta_asym = std::abs(p.beta - p.beta_prime);
    if (alpha_asym > 1e-9 || beta_asym > 1e-9) {
        std::ostringstream os;
        os << "decomposition needs the symmetric family: |alpha - alpha'| = " << alpha_asym
           << ", |beta - beta'| = " << beta_asym;
        throw NotSymmetric(os.str(), std::max(alpha_asym, beta_asym));
    }
    const double alpha = (p.alpha + p.alpha_prime) / 2.0;
    const double beta = (p.beta + p.beta_prime) / 2.0;
    double w_same = alpha - p.gamma;
    double w_cross = beta - p.gamma;
    for (auto [name, w] : {std::pair<const char*, double>{"beta - gamma", w_cross},
                           {"alpha - gamma", w_same}}) {
        if (w < -1e-12) {
            std::ostringstream os;
            os << "state not separable by this construction: weight " << name << " = " << w;
            throw NotSeparable(os.str(), name, w);
        }
    }
    w_same = std::max(0.0, w_same);
    w_cross = std::max(0.0, w_cross);

    SeparableDecomposition d;
    d.terms = {
        {w_same, plus_z, plus_z},    {w_same, minus_z, minus_z},
        {w_cross, plus_z, minus_z},  {w_cross, minus_z, plus_z},
        {p.gamma, plus_x, plus_x},   {p.gamma, minus_x, minus_x},
        {p.gamma, minus_y, plus_y},  {p.gamma, plus_y, minus_y},
    };
    return d;
}

struct VerifyResult {
    bool ok = false;
    double max_error = 0.0;
};

// Rebuilds the convex combination and compares entrywise; also checks weight
// nonnegativity and normalization.  Never throws for bad decompositions;
// those come back as ok = false.
inline VerifyResult verify_decomposition(const SeparableDecomposition& d, const DensityMatrix& rho,
                                         double tol) {
    if (tol <= 0.0) throw InvalidArgument("verify_decomposition: tolerance must be positive");
    try {
        Mat4 rebuilt;
        double weight_sum = 0.0;
        bool weights_ok = true;
        for (const auto& term : d.terms) {
            if (!(term.weight >= 0.0)) weights_ok = false;
            weight_sum += term.weight;
            rebuilt = rebuilt + term.weight * kron(bloch_state(term.n_a), bloch_state(term.n_b));
        }
        VerifyResult r;
        r.max_error = max_entry_distance(rebuilt, rho.matrix());
        r.ok = weights_ok && std::abs(weight_sum - 1.0) <= 1e-12 && r.max_error <= tol;
        return r;
    } catch (const Error&) {
        return {false, std::numeric_limits<double>::infinity()};
    }
}

}  // namespace entverdict
