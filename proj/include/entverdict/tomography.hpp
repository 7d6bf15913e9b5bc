// tomography.hpp -- 16-setting polarization tomography: projector dictionary,
// Born-rule probabilities, linear inversion in the Pauli operator basis, and
// projection of noisy reconstructions back to the physical state space.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "entverdict/errors.hpp"
#include "entverdict/linalg.hpp"
#include "entverdict/states.hpp"

namespace entverdict {

enum class PolLabel { H, V, D, A, R, L };

inline const char* to_string(PolLabel l) {
    switch (l) {
        case PolLabel::H: return "H";
        case PolLabel::V: return "V";
        case PolLabel::D: return "D";
        case PolLabel::A: return "A";
        case PolLabel::R: return "R";
        case PolLabel::L: return "L";
    }
    throw InvalidArgument("bad polarization label");
}

inline std::optional<PolLabel> parse_pol_label(const std::string& s) {
    if (s == "H") return PolLabel::H;
    if (s == "V") return PolLabel::V;
    if (s == "D") return PolLabel::D;
    if (s == "A") return PolLabel::A;
    if (s == "R") return PolLabel::R;
    if (s == "L") return PolLabel::L;
    return std::nullopt;
}

// Orthogonal partner within the same polarization basis.
inline PolLabel complement(PolLabel l) {
    switch (l) {
        case PolLabel::H: return PolLabel::V;
        case PolLabel::V: return PolLabel::H;
        case PolLabel::D: return PolLabel::A;
        case PolLabel::A: return PolLabel::D;
        case PolLabel::R: return PolLabel::L;
        case PolLabel::L: return PolLabel::R;
    }
    throw InvalidArgument("bad polarization label");
}

struct Projector {
    PolLabel label;
    std::array<Complex, 2> ket;
};

// Fixed dictionary: H=(1,0), V=(0,1), D=(1,1)/sqrt2, A=(1,-1)/sqrt2,
// R=(1,i)/sqrt2, L=(1,-i)/sqrt2.
inline Projector projector(PolLabel l) {
    const double h = 1.0 / std::sqrt(2.0);
    switch (l) {
        case PolLabel::H: return {l, {Complex(1.0), Complex(0.0)}};
        case PolLabel::V: return {l, {Complex(0.0), Complex(1.0)}};
        case PolLabel::D: return {l, {Complex(h), Complex(h)}};
        case PolLabel::A: return {l, {Complex(h), Complex(-h)}};
        case PolLabel::R: return {l, {Complex(h), Complex(0.0, h)}};
        case PolLabel::L: return {l, {Complex(h), Complex(0.0, -h)}};
    }
    throw InvalidArgument("bad polarization label");
}

struct MeasurementSetting {
    PolLabel first;
    PolLabel second;

    auto operator<=>(const MeasurementSetting&) const = default;
};

struct CoincidenceRecord {
    MeasurementSetting setting;
    std::uint64_t count = 0;
    std::optional<std::string> duration_tag;
};

// {H,V,D,R} x {H,V,D,R} in row-major order, starting at (H,H).
inline std::vector<MeasurementSetting> standard_settings_16() {
    const PolLabel letters[] = {PolLabel::H, PolLabel::V, PolLabel::D, PolLabel::R};
    std::vector<MeasurementSetting> out;
    out.reserve(16);
    for (PolLabel a : letters)
        for (PolLabel b : letters) out.push_back({a, b});
    return out;
}

inline Mat2 ketbra(const std::array<Complex, 2>& ket) {
    Mat2 m;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = ket[i] * std::conj(ket[j]);
    return m;
}

inline Mat4 setting_operator(const MeasurementSetting& s) {
    return kron(ketbra(projector(s.first).ket), ketbra(projector(s.second).ket));
}

// Born rule tr(rho * |a><a| (x) |b><b|), clamped onto [0, 1].
inline double predicted_probability(const DensityMatrix& rho, const MeasurementSetting& s) {
    const double p = (rho.matrix() * setting_operator(s)).trace().real();
    return std::clamp(p, 0.0, 1.0);
}

class IncompleteSettings : public Error {
public:
    IncompleteSettings(const std::string& what, std::vector<MeasurementSetting> missing)
        : Error(what), missing(std::move(missing)) {}
    std::vector<MeasurementSetting> missing;
};

class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, double condition) : Error(what), condition(condition) {}
    double condition;
};

class ZeroCounts : public Error {
public:
    using Error::Error;
};

namespace detail {

// Cyclic Jacobi for a dense real symmetric matrix of runtime size; used on
// the 16x16 Gram matrix of the tomography design.
struct RealSymEigen {
    std::vector<double> values;             // ascending
    std::vector<std::vector<double>> vecs;  // vecs[k] pairs with values[k]
};

inline RealSymEigen real_sym_eigen(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
    if (scale == 0.0) scale = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (std::sqrt(2.0 * off) < 1e-14 * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double tau = (a[p][p] - a[q][q]) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = aip * c + aiq * s;
                    a[i][q] = -aip * s + aiq * c;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a[p][j];
                    const double aqj = a[q][j];
                    a[p][j] = apj * c + aqj * s;
                    a[q][j] = -apj * s + aqj * c;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v[i][p];
                    const double viq = v[i][q];
                    v[i][p] = vip * c + viq * s;
                    v[i][q] = -vip * s + viq * c;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x][x] < a[y][y]; });
    RealSymEigen out;
    out.values.resize(n);
    out.vecs.assign(n, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a[order[k]][order[k]];
        for (std::size_t i = 0; i < n; ++i) out.vecs[k][i] = v[i][order[k]];
    }
    return out;
}

// Two-qubit Pauli operator basis E_mu = sigma_i (x) sigma_j, mu = 4i + j.
inline const std::array<Mat4, 16>& pauli_basis() {
    static const std::array<Mat4, 16> basis = [] {
        const std::array<Mat2, 4> sigma = {identity2(), pauli_x(), pauli_y(), pauli_z()};
        std::array<Mat4, 16> b;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) b[4 * i + j] = kron(sigma[i], sigma[j]);
        return b;
    }();
    return basis;
}

}  // namespace detail

// Condition number of the Gram matrix of the design built from the given
// settings; measures how close the set is to informational incompleteness.
inline double reconstruction_condition(const std::vector<MeasurementSetting>& settings) {
    const auto& basis = detail::pauli_basis();
    std::vector<std::array<double, 16>> design;
    design.reserve(settings.size());
    for (const auto& s : settings) {
        const Mat4 proj = setting_operator(s);
        std::array<double, 16> row;
        for (std::size_t mu = 0; mu < 16; ++mu)
            row[mu] = (proj * basis[mu]).trace().real() / 4.0;
        design.push_back(row);
    }
    std::vector<std::vector<double>> gram(16, std::vector<double>(16, 0.0));
    for (const auto& row : design)
        for (std::size_t mu = 0; mu < 16; ++mu)
            for (std::size_t nu = 0; nu < 16; ++nu) gram[mu][nu] += row[mu] * row[nu];
    const auto eig = detail::real_sym_eigen(gram);
    const double lo = eig.values.front();
    const double hi = eig.values.back();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

// Linear inversion from real-valued per-setting counts (or probabilities; any
// common scale cancels in the final trace normalization).
//
// Count -> probability normalization: a setting whose full complement
// quadruple {(a,b),(a,b~),(a~,b),(a~,b~)} is present is divided by that
// quadruple's total; the rest divide by the mean total over the complete
// quadruples.  Per-quadruple totals cancel source-brightness drift.
inline Mat4 linear_reconstruct_real(
    const std::vector<std::pair<MeasurementSetting, double>>& records,
    const std::vector<MeasurementSetting>& required_settings = standard_settings_16()) {
    std::map<MeasurementSetting, double> by_setting;
    double total = 0.0;
    for (const auto& [setting, count] : records) {
        if (!std::isfinite(count) || count < 0.0)
            throw InvalidArgument("linear_reconstruct: negative or non-finite count");
        if (!by_setting.emplace(setting, count).second) {
            std::ostringstream os;
            os << "linear_reconstruct: duplicate setting (" << to_string(setting.first) << ","
               << to_string(setting.second) << ")";
            throw InvalidArgument(os.str());
        }
        total += count;
    }

    std::vector<MeasurementSetting> missing;
    for (const auto& s : required_settings)
        if (!by_setting.count(s)) missing.push_back(s);
    if (!missing.empty()) {
        std::ostringstream os;
        os << "linear_reconstruct: missing settings:";
        for (const auto& s : missing)
            os << " (" << to_string(s.first) << "," << to_string(s.second) << ")";
        throw IncompleteSettings(os.str(), missing);
    }
    if (total <= 0.0) throw ZeroCounts("linear_reconstruct: all counts are zero");

    // Complete complement quadruples, keyed by basis-canonical representative.
    auto quad_of = [](const MeasurementSetting& s) {
        return std::array<MeasurementSetting, 4>{
            MeasurementSetting{s.first, s.second},
            MeasurementSetting{s.first, complement(s.second)},
            MeasurementSetting{complement(s.first), s.second},
            MeasurementSetting{complement(s.first), complement(s.second)}};
    };
    auto quad_key = [](const MeasurementSetting& s) {
        return MeasurementSetting{std::min(s.first, complement(s.first)),
                                  std::min(s.second, complement(s.second))};
    };
    std::map<MeasurementSetting, double> quad_total;
    for (const auto& [setting, count] : by_setting) {
        (void)count;
        const auto key = quad_key(setting);
        if (quad_total.count(key)) continue;
        double q = 0.0;
        bool complete = true;
        for (const auto& member : quad_of(setting)) {
            auto it = by_setting.find(member);
            if (it == by_setting.end()) {
                complete = false;
                break;
            }
            q += it->second;
        }
        if (complete) quad_total.emplace(key, q);
    }
    if (quad_total.empty())
        throw IncompleteSettings(
            "linear_reconstruct: no complete complement quadruple to normalize counts against",
            {});
    double fallback = 0.0;
    for (const auto& [key, q] : quad_total) {
        (void)key;
        fallback += q;
    }
    fallback /= static_cast<double>(quad_total.size());
    if (fallback <= 0.0) throw ZeroCounts("linear_reconstruct: normalization total is zero");

    // Probabilities and the Pauli-basis design matrix.
    const auto& basis = detail::pauli_basis();
    std::vector<std::array<double, 16>> design;
    std::vector<double> probs;
    for (const auto& [setting, count] : by_setting) {
        auto it = quad_total.find(quad_key(setting));
        const double divisor = (it != quad_total.end() && it->second > 0.0) ? it->second : fallback;
        probs.push_back(count / divisor);
        const Mat4 proj = setting_operator(setting);
        std::array<double, 16> row;
        for (std::size_t mu = 0; mu < 16; ++mu)
            row[mu] = (proj * basis[mu]).trace().real() / 4.0;
        design.push_back(row);
    }

    // Normal equations G s = r for the 16 real Pauli components s_mu.
    std::vector<std::vector<double>> gram(16, std::vector<double>(16, 0.0));
    std::array<double, 16> rhs{};
    for (std::size_t k = 0; k < design.size(); ++k)
        for (std::size_t mu = 0; mu < 16; ++mu) {
            rhs[mu] += design[k][mu] * probs[k];
            for (std::size_t nu = 0; nu < 16; ++nu)
                gram[mu][nu] += design[k][mu] * design[k][nu];
        }
    const auto eig = detail::real_sym_eigen(gram);
    const double lo = eig.values.front();
    const double hi = eig.values.back();
    if (lo <= 0.0 || hi / lo > 1e12) {
        const double cond = lo <= 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
        std::ostringstream os;
        os << "linear_reconstruct: settings are not informationally complete (Gram condition "
           << cond << ")";
        throw SingularSystem(os.str(), cond);
    }
    std::array<double, 16> sol{};
    for (std::size_t k = 0; k < 16; ++k) {
        double proj_coeff = 0.0;
        for (std::size_t mu = 0; mu < 16; ++mu) proj_coeff += eig.vecs[k][mu] * rhs[mu];
        proj_coeff /= eig.values[k];
        for (std::size_t mu = 0; mu < 16; ++mu) sol[mu] += proj_coeff * eig.vecs[k][mu];
    }

    Mat4 rho;
    for (std::size_t mu = 0; mu < 16; ++mu) rho = rho + (sol[mu] / 4.0) * basis[mu];
    const double tr = rho.trace().real();
    if (tr <= 0.0) throw NumericalFailure("linear_reconstruct: nonpositive reconstructed trace");
    return (1.0 / tr) * rho;
}

inline Mat4 linear_reconstruct(
    const std::vector<CoincidenceRecord>& records,
    const std::vector<MeasurementSetting>& required_settings = standard_settings_16()) {
    std::vector<std::pair<MeasurementSetting, double>> real_records;
    real_records.reserve(records.size());
    for (const auto& r : records)
        real_records.emplace_back(r.setting, static_cast<double>(r.count));
    return linear_reconstruct_real(real_records, required_settings);
}

// Clip negative eigenvalues to zero, renormalize the spectrum to unit sum,
// rebuild.  A fixed point on states that are already physical.
inline DensityMatrix project_to_physical(const Mat4& raw) {
    if (!all_finite(raw)) throw InvalidArgument("project_to_physical: non-finite entry");
    const double dev = hermiticity_deviation(raw);
    if (dev > 1e-9) throw NotHermitian("project_to_physical: input not Hermitian", dev);
    const double tr_dev = std::abs(raw.trace() - Complex(1.0, 0.0));
    if (tr_dev > 0.1) throw BadTrace("project_to_physical: trace too far from 1", tr_dev);

    const auto eig = hermitian_eigen(raw);
    std::array<double, 4> clipped;
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        clipped[k] = std::max(0.0, eig.values[k]);
        sum += clipped[k];
    }
    if (sum <= 0.0) throw NumericalFailure("project_to_physical: spectrum vanished after clipping");

    Mat4 out;
    for (std::size_t k = 0; k < 4; ++k) {
        const double w = clipped[k] / sum;
        if (w == 0.0) continue;
        const auto v = eig.vector(k);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) out(i, j) += w * v[i] * std::conj(v[j]);
    }
    return validate_density(out, default_density_tol);
}

}  // namespace entverdict
