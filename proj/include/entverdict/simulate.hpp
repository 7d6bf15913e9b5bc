// simulate.hpp -- synthetic coincidence data and seeded random state
// families.  Everything here is a pure function of (seed, plan), so fixtures
// can pin exact values.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "entverdict/errors.hpp"
#include "entverdict/rng.hpp"
#include "entverdict/states.hpp"
#include "entverdict/tomography.hpp"

namespace entverdict {

using RngSeed = std::uint64_t;

struct SimulationPlan {
    DensityMatrix state;
    std::vector<MeasurementSetting> settings;
    std::uint64_t counts_per_setting = 10000;
    RngSeed seed = 0;
};

inline void validate_plan(const SimulationPlan& plan) {
    if (plan.counts_per_setting < 1)
        throw InvalidArgument("simulation plan: counts_per_setting must be positive");
    if (plan.settings.empty()) throw InvalidArgument("simulation plan: no settings");
}

// Noise-free expectation: count = round(N * p).  The seed is unused.
inline std::vector<CoincidenceRecord> ideal_counts(const SimulationPlan& plan) {
    validate_plan(plan);
    std::vector<CoincidenceRecord> out;
    out.reserve(plan.settings.size());
    for (const auto& s : plan.settings) {
        const double mean =
            static_cast<double>(plan.counts_per_setting) * predicted_probability(plan.state, s);
        out.push_back({s, static_cast<std::uint64_t>(std::llround(mean)), std::nullopt});
    }
    return out;
}

// Independent Poisson draw per setting, each from its own substream so the
// records do not depend on evaluation order.
inline std::vector<CoincidenceRecord> sample_counts(const SimulationPlan& plan) {
    validate_plan(plan);
    std::vector<CoincidenceRecord> out;
    out.reserve(plan.settings.size());
    for (std::size_t k = 0; k < plan.settings.size(); ++k) {
        const auto& s = plan.settings[k];
        const double mean =
            static_cast<double>(plan.counts_per_setting) * predicted_probability(plan.state, s);
        Xoshiro256StarStar rng(derive_seed(plan.seed, k));
        out.push_back({s, poisson(rng, mean), std::nullopt});
    }
    return out;
}

enum class Regime { Separable, Entangled, Boundary, Any };

namespace detail {

// Flat Dirichlet(1,1,1,1) via sorted-uniform spacings.
inline void simplex4(Xoshiro256StarStar& rng, double& a, double& b, double& c, double& d) {
    double u1 = rng.uniform();
    double u2 = rng.uniform();
    double u3 = rng.uniform();
    if (u1 > u2) std::swap(u1, u2);
    if (u2 > u3) std::swap(u2, u3);
    if (u1 > u2) std::swap(u1, u2);
    a = u1;
    b = u2 - u1;
    c = u3 - u2;
    d = 1.0 - u3;
}

}  // namespace detail

// Draws (alpha, beta, beta_prime, alpha_prime) from the flat simplex, then
// gamma uniformly inside the regime's interval.  Regimes whose interval comes
// up empty resample the simplex; after 10^4 misses a fixed fallback keeps the
// function total.
inline XStateParams random_x_state(RngSeed seed, Regime regime) {
    Xoshiro256StarStar rng(seed);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        XStateParams p;
        detail::simplex4(rng, p.alpha, p.beta, p.beta_prime, p.alpha_prime);
        const double lo = std::sqrt(p.beta * p.beta_prime);
        const double hi = std::sqrt(p.alpha * p.alpha_prime);
        switch (regime) {
            case Regime::Separable:
                p.gamma = rng.uniform() * std::min(lo, hi);
                return p;
            case Regime::Entangled:
                if (hi <= lo) continue;
                p.gamma = lo + (1.0 - rng.uniform()) * (hi - lo);
                return p;
            case Regime::Boundary:
                if (lo > hi) continue;
                p.gamma = lo;
                return p;
            case Regime::Any:
                p.gamma = rng.uniform() * hi;
                return p;
        }
    }
    switch (regime) {
        case Regime::Entangled: return {0.5, 0.0, 0.0, 0.5, 0.5};
        case Regime::Boundary: return {0.25, 0.25, 0.25, 0.25, 0.25};
        default: return {0.25, 0.25, 0.25, 0.0, 0.25};
    }
}

// Symmetric subfamily (alpha = alpha', beta = beta' bitwise), where the
// closed-form boundaries are exactly beta and alpha.
inline XStateParams random_symmetric_x_state(RngSeed seed, Regime regime) {
    Xoshiro256StarStar rng(seed);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        XStateParams p;
        p.alpha = 0.5 * rng.uniform();
        p.beta = 0.5 - p.alpha;
        p.beta_prime = p.beta;
        p.alpha_prime = p.alpha;
        switch (regime) {
            case Regime::Separable:
                p.gamma = rng.uniform() * std::min(p.beta, p.alpha);
                return p;
            case Regime::Entangled:
                if (p.alpha <= p.beta) continue;
                p.gamma = p.beta + (1.0 - rng.uniform()) * (p.alpha - p.beta);
                return p;
            case Regime::Boundary:
                if (p.beta > p.alpha) continue;
                p.gamma = p.beta;
                return p;
            case Regime::Any:
                p.gamma = rng.uniform() * p.alpha;
                return p;
        }
    }
    switch (regime) {
        case Regime::Entangled: return {0.5, 0.0, 0.0, 0.5, 0.5};
        case Regime::Boundary: return {0.25, 0.25, 0.25, 0.25, 0.25};
        default: return {0.25, 0.25, 0.25, 0.0, 0.25};
    }
}

// G G^dagger / tr(G G^dagger) for G with independent standard complex
// Gaussian entries; PSD by construction.
inline DensityMatrix random_density_matrix(RngSeed seed) {
    Xoshiro256StarStar rng(seed);
    Mat4 g;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const auto z = gaussian_pair(rng);
            g(i, j) = Complex(z.z0, z.z1);
        }
    Mat4 m = g * g.adjoint();
    const double tr = m.trace().real();
    if (tr <= 0.0) throw NumericalFailure("random_density_matrix: degenerate draw");
    m = (1.0 / tr) * m;
    return validate_density(m, default_density_tol);
}

}  // namespace entverdict
